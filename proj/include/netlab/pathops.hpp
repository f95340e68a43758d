#pragma once

#include <cstdint>
#include <vector>

#include "netlab/field.hpp"
#include "netlab/kernel.hpp"
#include "netlab/path.hpp"

namespace netlab {

// Potential kernel Abar of a symmetric difference kernel, tabulated on
// [-x_max, x_max] with the 1/sqrt(t) tail extrapolated away, and extended
// beyond the table by the asymptote |x| / (2 sigma^2) + C with C fitted at
// the table edge.
class PotentialTable {
public:
    PotentialTable(const IncrementKernel& pbar, std::int32_t x_max, std::int64_t t_max,
                   double walk_sigma2);

    double at(std::int64_t x) const;
    std::int32_t lattice_gcd() const { return gcd_; }

private:
    std::vector<double> values_; // index x + x_max
    std::int32_t x_max_;
    std::int32_t gcd_;
    double slope_;  // 1 / (2 sigma^2)
    double offset_; // fitted constant of the asymptote
};

// One sticky random-walk pair: X1 follows omega^1 arrows, X2 follows
// omega^2 arrows of the same realization, so the two walks share moves
// except where the field branches.  Lattice trajectories plus the cumulative
// co-location count that becomes Z under diffusive rescaling.
struct StickyPairTrace {
    double epsilon = 0.0;
    double sigma2 = 0.0;
    std::vector<std::int64_t> x1, x2;
    std::vector<std::int64_t> coloc; // coloc[n] = #{0 <= s <= n : x1[s] == x2[s]}

    std::size_t steps() const { return x1.size() - 1; }

    // Rescaled coordinates per the diffusive map; Z(n) at lattice time n.
    double y1(std::size_t n) const { return epsilon * static_cast<double>(x1[n]); }
    double y2(std::size_t n) const { return epsilon * static_cast<double>(x2[n]); }
    double z(std::size_t n) const {
        return sigma2 * epsilon * epsilon * static_cast<double>(coloc[n]);
    }
};

StickyPairTrace sticky_pair(const ArrowField& field, std::int64_t x1, std::int64_t x2,
                            std::int64_t horizon, double epsilon);

// R(n) = Y1 Y2 - (1 - eps) * integral of the co-location time up to (not
// including) lattice step n; a mean-flat (martingale) sequence.
std::vector<double> residual_product(const StickyPairTrace& trace, double epsilon);

// Rescaled form eps * Abar(X1 - X2) - sigma^{-2} * co-location integral.
std::vector<double> residual_potential(const StickyPairTrace& trace, const PotentialTable& abar,
                                       double epsilon, double sigma2);

// Unrescaled form Abar(S(n)) - eps * #{s < n : S(s) = 0}, S = X1 - X2.
std::vector<double> residual_potential_unrescaled(const StickyPairTrace& trace,
                                                  const PotentialTable& abar, double epsilon);

// Smallest superset of `paths` closed under concatenation at intersection
// times: hop from pi onto pi' at time t when sigma_pi < t, sigma_pi' <= t
// and pi(t) = pi'(t).  All paths must share the horizon.
std::vector<LatticePath> hop_closure(std::vector<LatticePath> paths, std::int64_t horizon,
                                     std::size_t cap = 1'000'000);

} // namespace netlab
