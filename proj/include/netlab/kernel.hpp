#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netlab/error.hpp"
#include "netlab/rng.hpp"

namespace netlab {

struct KernelEntry {
    std::int32_t dx;
    double p;
};

// Finite-support increment law a(.) on the integers: normalized, mean zero,
// with the gcd of support differences equal to 1 so the walk it drives is
// irreducible and aperiodic.  Immutable after construction.
class IncrementKernel {
public:
    // Validates and caches moments.  gamma is the moment order certified
    // finite (> 3); sigma2 and m_gamma are computed from the entries.
    static IncrementKernel validate(std::vector<KernelEntry> entries, double gamma);

    // Same construction but allows a periodic/reducible support, for derived
    // laws such as the difference kernel whose support may live on a
    // sublattice.  lattice_gcd() reports the spacing.
    static IncrementKernel validate_on_sublattice(std::vector<KernelEntry> entries, double gamma);

    const std::vector<KernelEntry>& entries() const { return entries_; }
    double gamma() const { return gamma_; }
    double sigma2() const { return sigma2_; }
    double m_gamma() const { return m_gamma_; }
    std::int32_t max_jump() const { return max_jump_; }
    std::int32_t lattice_gcd() const { return lattice_gcd_; }
    std::size_t size() const { return entries_.size(); }

    // Probability of displacement dx (0 off support).
    double prob(std::int32_t dx) const;

    // Index into entries() of displacement dx, or -1.
    int index_of(std::int32_t dx) const;

    // CDF-inversion draw.
    std::int32_t sample(SiteStream& s) const {
        double u = s.next_unit();
        double acc = 0.0;
        for (const auto& e : entries_) {
            acc += e.p;
            if (u < acc) return e.dx;
        }
        return entries_.back().dx;
    }

    // Empty placeholder; only validate()/validate_on_sublattice() produce a
    // usable kernel.
    IncrementKernel() = default;

private:
    static IncrementKernel build(std::vector<KernelEntry> entries, double gamma,
                                 bool require_aperiodic);

    std::vector<KernelEntry> entries_; // sorted by dx
    double gamma_ = 0.0;
    double sigma2_ = 0.0;
    double m_gamma_ = 0.0;
    std::int32_t max_jump_ = 0;
    std::int32_t lattice_gcd_ = 1;
};

// Joint law of the arrow pair (omega1, omega2) at one site: with probability
// 1 - epsilon a single shared arrow, with probability epsilon two
// independent draws from the base law.
struct PairLaw {
    IncrementKernel base;
    double epsilon;

    // Mass of the outcome (x1, x2).
    double prob(std::int32_t x1, std::int32_t x2) const {
        double m = epsilon * base.prob(x1) * base.prob(x2);
        if (x1 == x2) m += (1.0 - epsilon) * base.prob(x1);
        return m;
    }
};

// Per-displacement arrow probabilities of the Bernoulli net dominating the
// discrete net with branching probability epsilon: psi(x) = 1 - exp(-r a(x))
// with r solving epsilon = 1 - r/(e^r - 1).
struct BernoulliKernel {
    IncrementKernel base;
    double epsilon;
    double r;
    std::vector<double> psi; // aligned with base.entries()
    double rho;              // P(arrow set nonempty) = 1 - e^{-r}

    double psi_at(std::int32_t dx) const {
        int i = base.index_of(dx);
        return i < 0 ? 0.0 : psi[static_cast<std::size_t>(i)];
    }
};

// Unique r > 0 with epsilon = 1 - r/(e^r - 1), residual <= 1e-12, by
// bisection on the monotone map.
double solve_branching_rate(double epsilon);

BernoulliKernel bernoulli_kernel(const IncrementKernel& a, double epsilon);

// Autocorrelation kernel Pbar(0, y) = sum_z a(z + y) a(z) of the difference
// of two independent a-walks.  Symmetric, mean zero, second moment 2 sigma^2;
// may be periodic (support on a sublattice).
IncrementKernel difference_kernel(const IncrementKernel& a);

struct PotentialResult {
    double at_t_max;                              // Abar_{t_max}(x)
    double limit;                                 // extrapolated t -> infinity value
    std::vector<std::pair<std::int64_t, double>> partials; // (t, Abar_t(x)) at geometric horizons
};

// Potential kernel Abar(x) = lim_t [Gbar_t(0,0) - Gbar_t(x,0)] of a
// symmetric mean-zero kernel, by iterating the transition operator on a
// windowed array and extrapolating the 1/sqrt(t) tail from geometrically
// spaced horizons.  x must lie on the reachable sublattice.
PotentialResult potential_kernel(const IncrementKernel& pbar, std::int64_t x, std::int64_t t_max);

// Abar on all reachable |x| <= x_max at once (one operator sweep), indexed by
// x + x_max.  Unreachable sites hold NaN.
std::vector<double> potential_kernel_table(const IncrementKernel& pbar, std::int32_t x_max,
                                           std::int64_t t_max);

// Named presets: "simple" = {+-1: 1/2}, "lazy" = {-1: 1/4, 0: 1/2, +1: 1/4},
// "geom(p)" = symmetric geometric tails truncated below total mass 1e-12.
IncrementKernel kernel_preset(const std::string& name);

// Plain-text kernel description: one "displacement probability" pair per
// line, '#' comments.
IncrementKernel parse_kernel_file(const std::string& path);
IncrementKernel parse_kernel_text(const std::string& text);

// Resolves either a preset name or a path.
IncrementKernel resolve_kernel(const std::string& spec);

} // namespace netlab
