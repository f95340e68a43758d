#include "netlab/pointset.hpp"

#include <algorithm>
#include <cmath>

namespace netlab {

bool contains(const Sites& s, std::int64_t x) {
    return std::binary_search(s.begin(), s.end(), x);
}

Sites intersect(const Sites& a, const Sites& b) {
    Sites out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Sites unite(const Sites& a, const Sites& b) {
    Sites out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Sites step_forward(const ArrowField& field, const Sites& state, std::int64_t t, ArrowUse use) {
    Sites next;
    next.reserve(2 * state.size());
    std::int32_t buf[64];
    for (std::int64_t x : state) {
        int n = field.arrows_at(x, t, use, buf);
        for (int i = 0; i < n; ++i) next.push_back(x + buf[i]);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

std::vector<std::pair<std::int64_t, std::int64_t>> half_step(const ArrowField& field,
                                                             const Sites& state, std::int64_t t,
                                                             ArrowUse use) {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    pairs.reserve(2 * state.size());
    std::int32_t buf[64];
    for (std::int64_t x : state) {
        int n = field.arrows_at(x, t, use, buf);
        for (int i = 0; i < n; ++i) pairs.emplace_back(x, x + buf[i]);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

Sites step_dual(const ArrowField& field, const Sites& state, std::int64_t t, ArrowUse use) {
    Sites prev;
    if (state.empty()) return prev;
    const std::int32_t jump = field.kernel().max_jump();
    std::int32_t buf[64];
    for (std::int64_t x = state.front() - jump; x <= state.back() + jump; ++x) {
        int n = field.arrows_at(x, t - 1, use, buf);
        for (int i = 0; i < n; ++i) {
            if (contains(state, x + buf[i])) {
                prev.push_back(x);
                break;
            }
        }
    }
    return prev;
}

std::pair<bool, bool> duality_check(const ArrowField& field, const Sites& A, const Sites& B,
                                    std::int64_t t0, std::int64_t T, ArrowUse use) {
    Sites xi = A;
    for (std::int64_t s = t0; s < T; ++s) xi = step_forward(field, xi, s, use);
    bool fwd = !intersect(xi, B).empty();

    Sites phi = B;
    for (std::int64_t s = T; s > t0; --s) phi = step_dual(field, phi, s, use);
    bool bwd = !intersect(A, phi).empty();
    return {fwd, bwd};
}

DualTrace dual_martingale_trace(const ArrowField& field, const Sites& B, std::int64_t top_time,
                                std::int64_t T, double rho, ArrowUse use) {
    DualTrace tr;
    Sites phi = B;
    for (std::int64_t k = 0; k <= T; ++k) {
        tr.sizes.push_back(static_cast<std::int64_t>(phi.size()));
        tr.martingale.push_back(std::pow(1.0 - rho, static_cast<double>(phi.size())));
        if (phi.empty() && !tr.absorbed_at) tr.absorbed_at = k;
        if (k < T && !phi.empty()) phi = step_dual(field, phi, top_time - k, use);
        else if (k < T) phi.clear();
    }
    return tr;
}

} // namespace netlab
