#pragma once

#include <cstddef>
#include <vector>

namespace tscausal::detail {

/// Calls f(subset) for every k-subset of `pool` in lexicographic order of
/// positions. Stops early when f returns true; returns whether it did.
template <class F>
bool for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, F&& f) {
    if (k > pool.size()) return false;
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[i] = i;
    std::vector<std::size_t> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pos[i]];
        if (f(subset)) return true;
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == pool.size() - k + (i - 1)) --i;
        if (i == 0) return false;
        ++pos[i - 1];
        for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

} // namespace tscausal::detail
