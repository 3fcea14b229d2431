#pragma once

// Hand-rolled generators shared by the property tests.

#include "tscausal/core_data.hpp"
#include "tscausal/graphs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testgen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline long long integer(Rng& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

inline bool coin(Rng& rng, double p = 0.5) { return uniform(rng) < p; }

inline double normal(Rng& rng) {
    const double u1 = uniform(rng) + 1e-300, u2 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Eigen::VectorXd normal_vector(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

inline Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index j = 0; j < p; ++j) m.col(j) = normal_vector(rng, n);
    return m;
}

inline std::vector<std::string> names(std::size_t d) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < d; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

/// Random valid window graph: lag-0 Directed edges respect a random order.
inline tscausal::WindowCausalGraph window_graph(Rng& rng, std::size_t d, int gamma_max, double density = 0.3) {
    tscausal::WindowCausalGraph g(names(d), gamma_max);
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            for (int lag = 1; lag <= gamma_max; ++lag)
                if (coin(rng, density)) g.add_edge(p, lag, q);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            if (!coin(rng, density)) continue;
            const auto u = order[a], v = order[b];
            switch (integer(rng, 0, 2)) {
            case 0: g.add_edge(u, 0, v); break;
            case 1: g.add_edge(u, 0, v, tscausal::EdgeMark::Bidirected); break;
            default: g.add_edge(u, 0, v, tscausal::EdgeMark::Unoriented); break;
            }
        }
    return g;
}

inline tscausal::SummaryCausalGraph summary_graph(Rng& rng, std::size_t d, double density = 0.3) {
    tscausal::SummaryCausalGraph g(names(d));
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            if (coin(rng, density)) g.add_edge(p, q);
    return g;
}

inline tscausal::ExtendedSummaryCausalGraph extended_graph(Rng& rng, std::size_t d, double density = 0.3) {
    tscausal::ExtendedSummaryCausalGraph g(names(d));
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            if (coin(rng, density)) g.add_past_edge(p, q);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            if (!coin(rng, density)) continue;
            const auto mark = static_cast<tscausal::EdgeMark>(integer(rng, 0, 2));
            g.add_present_edge(order[a], order[b], mark);
        }
    return g;
}

/// Kolmogorov-Smirnov distance between a sample and Uniform(0, 1).
inline double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / n - p[i]);
        d = std::max(d, p[i] - static_cast<double>(i) / n);
    }
    return d;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace testgen
