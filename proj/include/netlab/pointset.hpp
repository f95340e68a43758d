#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netlab/field.hpp"

namespace netlab {

// Occupied sites at one time, sorted and duplicate-free.
using Sites = std::vector<std::int64_t>;

bool contains(const Sites& s, std::int64_t x);
Sites intersect(const Sites& a, const Sites& b);
Sites unite(const Sites& a, const Sites& b);

// xi_{t+1} from xi_t: union over occupied x of {x + d : d in arrows(x, t)}.
Sites step_forward(const ArrowField& field, const Sites& state, std::int64_t t,
                   ArrowUse use = ArrowUse::net);

// Half-integer state: the set of used transitions (pi(t), pi(t+1)).
std::vector<std::pair<std::int64_t, std::int64_t>> half_step(const ArrowField& field,
                                                             const Sites& state, std::int64_t t,
                                                             ArrowUse use = ArrowUse::net);

// Dual step from time t to t-1: x survives iff some arrow from (x, t-1)
// lands in the current set.  Candidate x range is the backward light cone.
Sites step_dual(const ArrowField& field, const Sites& state, std::int64_t t,
                ArrowUse use = ArrowUse::net);

// Indicators of {Xi_{t0,T}(A) cap B != 0} and {A cap Phi_{T,t0}(B) != 0}
// computed on the same realization; they agree pathwise.
std::pair<bool, bool> duality_check(const ArrowField& field, const Sites& A, const Sites& B,
                                    std::int64_t t0, std::int64_t T,
                                    ArrowUse use = ArrowUse::net);

struct DualTrace {
    std::vector<std::int64_t> sizes;   // |phi_0|, |phi_1|, ...
    std::vector<double> martingale;    // (1 - rho)^{|phi_t|}
    std::optional<std::int64_t> absorbed_at;
};

// Backward trace of the dual started from B at top_time, run for T steps.
DualTrace dual_martingale_trace(const ArrowField& field, const Sites& B, std::int64_t top_time,
                                std::int64_t T, double rho, ArrowUse use = ArrowUse::bernoulli);

// ---------------------------------------------------------------------------
// Replica experiments (point-set statistics).
// ---------------------------------------------------------------------------

struct StatRow {
    std::string label;
    double value = 0.0;
    double se = 0.0;
    double reference = 0.0;
};

struct InvarianceReport {
    double rho = 0.0;
    std::vector<StatRow> occupation;   // aggregate + per-site rows
    std::vector<StatRow> correlations; // lag 1..8, value = covariance estimate vs 0
    std::vector<StatRow> pair_freq;    // half-step pair frequency vs psi(y)
    std::vector<StatRow> martingale;   // dual martingale mean per t vs (1-rho)^{|B|}
};

// Bernoulli-net invariance: Bernoulli(rho) initial data on a window of core
// width L, evolved T steps; occupation / pair-correlation / half-step pair
// statistics in the clean core, plus a dual-martingale flatness trace up to
// t_dual.  SEs are replica-level standard errors.
InvarianceReport invariance_test(const IncrementKernel& kernel, double epsilon, std::int64_t L,
                                 std::int64_t T, std::int64_t t_dual, std::size_t replicas,
                                 std::uint64_t seed, int jobs);

struct DensityPoint {
    std::int64_t T = 0;
    double p_hat = 0.0;
    double se = 0.0;
};

// Occupation probability of a clean-core site at each T, started from the
// maximal configuration (every site of the window), translation-averaged
// over a core of width core_width.
std::vector<DensityPoint> density_curve(Mode mode, const IncrementKernel& kernel, double epsilon,
                                        const std::vector<std::int64_t>& T_list,
                                        std::int64_t core_width, std::size_t replicas,
                                        std::uint64_t seed, int jobs);

struct DensityDrop {
    double rho0 = 0.0;       // target initial density
    double p0 = 0.0, se0 = 0.0;
    double pT = 0.0, seT = 0.0;
    double drop = 0.0, se = 0.0;
};

// Pure-coalescing density reduction: web dynamics from Bernoulli(rho_eps)
// initial data, density drop between times 0 and T.
DensityDrop coalescing_density_reduction(const IncrementKernel& kernel, double epsilon,
                                         std::int64_t T, std::int64_t core_width,
                                         std::size_t replicas, std::uint64_t seed, int jobs);

} // namespace netlab
