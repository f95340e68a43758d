#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netlab/error.hpp"
#include "netlab/field.hpp"
#include "netlab/path.hpp"

namespace netlab {

// Diffusive scaling (x, t) -> (eps x, sigma^2 eps^2 t).
struct ScalingMap {
    double epsilon;
    double sigma;

    double space(std::int64_t x) const { return epsilon * static_cast<double>(x); }
    double time(std::int64_t t) const {
        return sigma * sigma * epsilon * epsilon * static_cast<double>(t);
    }
    // Floor rounding throughout: the lattice time at or below rescaled time.
    // The nudge keeps exact lattice values from flooring one step down when
    // the division rounds just below an integer.
    std::int64_t lattice_time(double t) const {
        return static_cast<std::int64_t>(
            std::floor(t / (sigma * sigma * epsilon * epsilon) + 1e-9));
    }
    std::int64_t lattice_space(double x) const {
        return static_cast<std::int64_t>(std::floor(x / epsilon + 1e-9));
    }
};

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

// Standard error of the mean by nonparametric bootstrap over replicas.
double bootstrap_se(std::span<const double> xs, int resamples = 1000, std::uint64_t seed = 0x626f6f74);

// Upper tail of the chi-square distribution with df degrees of freedom
// (regularized incomplete gamma Q(df/2, x/2)).
double chi_square_pvalue(double statistic, int df);

// Two-sided Kolmogorov-Smirnov p-value for statistic d at sample size n.
double ks_pvalue(double d, std::size_t n);

// Standard normal CDF via erfc; |abs error| well below 1e-12.
double normal_cdf(double x);

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
};

// Least squares on (log x, log y).
PowerFit fit_power(std::span<const double> xs, std::span<const double> ys);

// Expected points per unit length of the standard Brownian net started from
// everything at time 0, at time t: e^{-t}/sqrt(pi t) + 2 Phi(sqrt(2 t)).
double brownian_net_density(double t);

// Number of distinct rescaled positions in (a, b) at rescaled time t + h
// among paths with rescaled start time <= t.
std::int64_t counting_eta(const std::vector<LatticePath>& paths, double t, double h, double a,
                          double b, const ScalingMap& scaling);

// ---------------------------------------------------------------------------
// Experiments.
// ---------------------------------------------------------------------------

struct NetDensityRow {
    double epsilon = 0.0;
    double measured = 0.0; // rescaled density
    double se = 0.0;
    double oracle = 0.0;
    double rel_gap = 0.0;
};

// Rescaled net density at rescaled time t against the Brownian-net oracle,
// for each epsilon in the sweep.
std::vector<NetDensityRow> density_convergence_experiment(const IncrementKernel& kernel,
                                                          const std::vector<double>& epsilons,
                                                          double t, std::size_t replicas,
                                                          std::uint64_t seed, int jobs);

struct TightnessRow {
    double delta = 0.0;
    double p_hat = 0.0;
    double se = 0.0;
};

// P(the branching-coalescing cloud from the rescaled box [-M, M] x [0, delta]
// reaches x-distance 2M within rescaled time 2 delta), per delta.
std::vector<TightnessRow> tightness_event_estimate(Mode mode, const IncrementKernel& kernel,
                                                   double epsilon, double M,
                                                   const std::vector<double>& deltas,
                                                   std::size_t replicas, std::uint64_t seed,
                                                   int jobs);

struct ExcursionRow {
    std::int64_t ell = 0;
    double p_hat = 0.0;
    double se = 0.0;
};

// P(sup_{t <= T} max xi_t >= ell) for the net started from a single site.
std::vector<ExcursionRow> large_excursion_tail(Mode mode, const IncrementKernel& kernel,
                                               double epsilon, std::int64_t T,
                                               const std::vector<std::int64_t>& ells,
                                               std::size_t replicas, std::uint64_t seed, int jobs);

struct BlockDensityResult {
    double surviving_fraction = 0.0; // P(|xi_T| >= p * upsilon L), p = 1/sqrt(2)
    double se = 0.0;
    std::int64_t T = 0;
};

// upsilon L evenly spread initial sites on [0, L], run to T = R0 / upsilon^2.
BlockDensityResult density_after_block(Mode mode, const IncrementKernel& kernel, double epsilon,
                                       double upsilon, std::int64_t L, double R0,
                                       std::size_t replicas, std::uint64_t seed, int jobs);

} // namespace netlab
