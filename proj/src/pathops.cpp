#include "netlab/pathops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace netlab {

PotentialTable::PotentialTable(const IncrementKernel& pbar, std::int32_t x_max,
                               std::int64_t t_max, double walk_sigma2)
    // Spitzer's asymptote 1 / sigma_pbar^2 = 1 / (2 sigma^2) holds for
    // aperiodic pbar; on a sublattice of spacing g the local CLT gains a
    // factor g, hence so does the slope.
    : x_max_(x_max), gcd_(pbar.lattice_gcd()),
      slope_(static_cast<double>(pbar.lattice_gcd()) / (2.0 * walk_sigma2)) {
    values_ = potential_kernel_table(pbar, x_max, t_max);
    // Fit the asymptote constant from the outer quarter of the table.
    double acc = 0.0;
    int n = 0;
    for (std::int32_t x = (3 * x_max) / 4; x <= x_max; ++x) {
        if (x % gcd_ != 0) continue;
        acc += values_[static_cast<std::size_t>(x + x_max)] - slope_ * x;
        acc += values_[static_cast<std::size_t>(-x + x_max)] - slope_ * x;
        n += 2;
    }
    offset_ = n > 0 ? acc / n : 0.0;
}

double PotentialTable::at(std::int64_t x) const {
    if (x % gcd_ != 0)
        throw Error(ErrorCode::unreachable_state,
                    "PotentialTable: site off the reachable sublattice");
    if (std::abs(x) <= x_max_) return values_[static_cast<std::size_t>(x + x_max_)];
    return slope_ * static_cast<double>(std::abs(x)) + offset_;
}

StickyPairTrace sticky_pair(const ArrowField& field, std::int64_t x1, std::int64_t x2,
                            std::int64_t horizon, double epsilon) {
    StickyPairTrace tr;
    tr.epsilon = epsilon;
    tr.sigma2 = field.kernel().sigma2();
    tr.x1.reserve(static_cast<std::size_t>(horizon) + 1);
    tr.x2.reserve(static_cast<std::size_t>(horizon) + 1);
    tr.coloc.reserve(static_cast<std::size_t>(horizon) + 1);
    std::int64_t a = x1, b = x2, z = 0;
    for (std::int64_t s = 0;; ++s) {
        if (a == b) ++z;
        tr.x1.push_back(a);
        tr.x2.push_back(b);
        tr.coloc.push_back(z);
        if (s == horizon) break;
        if (a == b) {
            ArrowSet ar = field.at(a, s);
            a += ar.w1;
            b = a - ar.w1 + ar.w2;
        } else {
            // Distinct sites: the shared field gives independent arrows.
            a += field.at(a, s).w1;
            b += field.at(b, s).w2;
        }
    }
    return tr;
}

std::vector<double> residual_product(const StickyPairTrace& trace, double epsilon) {
    const double step = trace.sigma2 * epsilon * epsilon;
    std::vector<double> r(trace.x1.size());
    for (std::size_t n = 0; n < r.size(); ++n) {
        const double zint = step * static_cast<double>(n > 0 ? trace.coloc[n - 1] : 0);
        r[n] = trace.y1(n) * trace.y2(n) - (1.0 - epsilon) * zint;
    }
    return r;
}

std::vector<double> residual_potential(const StickyPairTrace& trace, const PotentialTable& abar,
                                       double epsilon, double sigma2) {
    std::vector<double> r(trace.x1.size());
    const double step = sigma2 * epsilon * epsilon;
    for (std::size_t n = 0; n < r.size(); ++n) {
        const double zint = step * static_cast<double>(n > 0 ? trace.coloc[n - 1] : 0);
        r[n] = epsilon * abar.at(trace.x1[n] - trace.x2[n]) - zint / sigma2;
    }
    return r;
}

std::vector<double> residual_potential_unrescaled(const StickyPairTrace& trace,
                                                  const PotentialTable& abar, double epsilon) {
    std::vector<double> r(trace.x1.size());
    for (std::size_t n = 0; n < r.size(); ++n) {
        const double hits = static_cast<double>(n > 0 ? trace.coloc[n - 1] : 0);
        r[n] = abar.at(trace.x1[n] - trace.x2[n]) - epsilon * hits;
    }
    return r;
}

std::vector<LatticePath> hop_closure(std::vector<LatticePath> paths, std::int64_t horizon,
                                     std::size_t cap) {
    for (const auto& p : paths)
        if (p.end_time() != horizon)
            throw Error(ErrorCode::bad_config, "hop_closure: all paths must end at the horizon");

    std::set<LatticePath> closed(paths.begin(), paths.end());
    std::vector<LatticePath> work(closed.begin(), closed.end());

    auto try_hop = [&](const LatticePath& p, const LatticePath& q,
                       std::vector<LatticePath>& fresh) {
        // Hop from p onto q at time t: strict for the carrier, q may start
        // exactly at t.
        const std::int64_t lo = std::max(p.start_time + 1, q.start_time);
        for (std::int64_t t = lo; t <= horizon; ++t) {
            if (p.at(t) != q.at(t)) continue;
            LatticePath r;
            r.start_time = p.start_time;
            r.positions.assign(p.positions.begin(),
                               p.positions.begin() + (t - p.start_time + 1));
            r.positions.insert(r.positions.end(),
                               q.positions.begin() + (t - q.start_time + 1),
                               q.positions.end());
            if (closed.insert(r).second) {
                if (closed.size() > cap)
                    throw Error(ErrorCode::explosion_cap, "hop_closure: fixpoint exceeds cap");
                fresh.push_back(std::move(r));
            }
        }
    };

    while (!work.empty()) {
        std::vector<LatticePath> fresh;
        for (const auto& w : work) {
            for (const auto& other : closed) {
                try_hop(w, other, fresh);
                try_hop(other, w, fresh);
            }
        }
        work = std::move(fresh);
    }
    return {closed.begin(), closed.end()};
}

} // namespace netlab
