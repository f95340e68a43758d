// Replica experiments: invariant-law checks, density curves, tightness and
// excursion estimates.  All of them draw arrows from seed-keyed fields, so a
// replica is identified by (seed0 + index) and results are independent of
// the job count.

#include <algorithm>
#include <cmath>

#include "netlab/parallel.hpp"
#include "netlab/pointset.hpp"
#include "netlab/stats.hpp"

namespace netlab {

namespace {

constexpr std::uint64_t kTagInit = 0x696e6974ULL; // "init": initial data draws

Sites bernoulli_initial(std::uint64_t seed, std::int64_t lo, std::int64_t hi, double rho) {
    Sites s;
    for (std::int64_t x = lo; x <= hi; ++x)
        if (SiteStream(seed, kTagInit, x, -1).next_unit() < rho) s.push_back(x);
    return s;
}

Sites full_interval(std::int64_t lo, std::int64_t hi) {
    Sites s;
    s.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t x = lo; x <= hi; ++x) s.push_back(x);
    return s;
}

void clip(Sites& s, std::int64_t lo, std::int64_t hi) {
    s.erase(s.begin(), std::lower_bound(s.begin(), s.end(), lo));
    s.erase(std::upper_bound(s.begin(), s.end(), hi), s.end());
}

// Count of occupied sites in [lo, hi].
std::int64_t count_in(const Sites& s, std::int64_t lo, std::int64_t hi) {
    return std::upper_bound(s.begin(), s.end(), hi) - std::lower_bound(s.begin(), s.end(), lo);
}

// One forward step followed by a clip to the influence region of the core
// [core_lo, core_hi] at the final time T: sites farther than one light cone
// of the remaining steps cannot affect core statistics at T.
void step_clipped(const ArrowField& field, Sites& state, std::int64_t t, std::int64_t T,
                  std::int64_t core_lo, std::int64_t core_hi, ArrowUse use = ArrowUse::net) {
    state = step_forward(field, state, t, use);
    const std::int64_t reach = std::int64_t(field.kernel().max_jump()) * (T - (t + 1));
    clip(state, core_lo - reach, core_hi + reach);
}

} // namespace

InvarianceReport invariance_test(const IncrementKernel& kernel, double epsilon, std::int64_t L,
                                 std::int64_t T, std::int64_t t_dual, std::size_t replicas,
                                 std::uint64_t seed, int jobs) {
    if (L < 16) throw Error(ErrorCode::margin_too_small, "invariance_test: core too narrow");
    const int kMaxLag = 8;
    const BernoulliKernel bk = bernoulli_kernel(kernel, epsilon);
    const double rho = bk.rho;
    const std::int64_t jump = kernel.max_jump();
    const std::int64_t core_lo = -L / 2, core_hi = core_lo + L - 1;
    // Statistics reach core_hi + kMaxLag (correlations) and one extra step
    // (half-integer pairs); the dual trace needs its own light cone around 0.
    const std::int64_t t_top = std::max(T + 1, t_dual);
    const std::int64_t x_half =
        std::max(L / 2 + kMaxLag + jump * (T + 1), jump * t_dual) + jump + 1;

    struct Rep {
        std::vector<char> core;          // occupancy of [core_lo, core_hi]
        std::vector<double> corr;        // lag 1..kMaxLag products, core mean
        std::vector<double> pair;        // half-step pair frequency per support y
        std::vector<double> martingale;  // M_0..M_t_dual
    };
    auto one = [&](std::size_t rep) -> Rep {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = Mode::bernoulli;
        cfg.window = {-x_half, x_half, 0, t_top};
        RngField field(cfg);

        Sites state = bernoulli_initial(cfg.seed, -x_half, x_half, rho);
        // Keep the lag margin clean as well: clip against the widened core.
        // The Bernoulli net follows every arrow in the mask, not just the
        // coupled pair; product Bernoulli(rho) is invariant only for that
        // dynamics.
        for (std::int64_t t = 0; t < T; ++t)
            step_clipped(field, state, t, T + 1, core_lo, core_hi + kMaxLag,
                         ArrowUse::bernoulli);

        Rep r;
        r.core.assign(static_cast<std::size_t>(L), 0);
        std::vector<char> wide(static_cast<std::size_t>(L + kMaxLag), 0);
        for (std::int64_t x : state) {
            if (x >= core_lo && x <= core_hi) r.core[static_cast<std::size_t>(x - core_lo)] = 1;
            if (x >= core_lo && x <= core_hi + kMaxLag)
                wide[static_cast<std::size_t>(x - core_lo)] = 1;
        }
        for (int k = 1; k <= kMaxLag; ++k) {
            double acc = 0.0;
            for (std::int64_t i = 0; i < L; ++i)
                acc += r.core[static_cast<std::size_t>(i)] * wide[static_cast<std::size_t>(i + k)];
            r.corr.push_back(acc / static_cast<double>(L));
        }

        auto pairs = half_step(field, state, T, ArrowUse::bernoulli);
        r.pair.assign(kernel.size(), 0.0);
        for (const auto& [from, to] : pairs)
            if (from >= core_lo && from <= core_hi) {
                int idx = kernel.index_of(static_cast<std::int32_t>(to - from));
                r.pair[static_cast<std::size_t>(idx)] += 1.0 / static_cast<double>(L);
            }

        auto trace = dual_martingale_trace(field, {0}, t_dual, t_dual, rho);
        r.martingale = trace.martingale;
        return r;
    };
    auto reps = run_replicas<Rep>(replicas, jobs, one);
    const double n = static_cast<double>(replicas);

    InvarianceReport rep;
    rep.rho = rho;

    // Occupation: core-average row, the 3-SE outlier fraction, then per site.
    std::vector<double> site_freq(static_cast<std::size_t>(L), 0.0);
    std::vector<double> core_means(replicas, 0.0);
    for (std::size_t r = 0; r < replicas; ++r) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < L; ++i) {
            site_freq[static_cast<std::size_t>(i)] += reps[r].core[static_cast<std::size_t>(i)];
            acc += reps[r].core[static_cast<std::size_t>(i)];
        }
        core_means[r] = acc / static_cast<double>(L);
    }
    for (auto& f : site_freq) f /= n;
    auto ms = mean_se(core_means);
    rep.occupation.push_back({"core_mean", ms.mean, ms.se, rho});
    const double site_se = std::sqrt(rho * (1.0 - rho) / n);
    std::int64_t outliers = 0;
    for (std::int64_t i = 0; i < L; ++i)
        if (std::abs(site_freq[static_cast<std::size_t>(i)] - rho) > 3.0 * site_se) ++outliers;
    rep.occupation.push_back(
        {"frac_sites_beyond_3se", static_cast<double>(outliers) / static_cast<double>(L), 0.0, 0.0});
    for (std::int64_t i = 0; i < L; ++i)
        rep.occupation.push_back({"site " + std::to_string(core_lo + i),
                                  site_freq[static_cast<std::size_t>(i)], site_se, rho});

    for (int k = 1; k <= kMaxLag; ++k) {
        std::vector<double> vals(replicas);
        for (std::size_t r = 0; r < replicas; ++r)
            vals[r] = reps[r].corr[static_cast<std::size_t>(k - 1)] - rho * rho;
        auto m = mean_se(vals);
        rep.correlations.push_back({"lag " + std::to_string(k), m.mean, m.se, 0.0});
    }

    for (std::size_t yi = 0; yi < kernel.size(); ++yi) {
        std::vector<double> vals(replicas);
        for (std::size_t r = 0; r < replicas; ++r) vals[r] = reps[r].pair[yi];
        auto m = mean_se(vals);
        rep.pair_freq.push_back({"y=" + std::to_string(kernel.entries()[yi].dx), m.mean, m.se,
                                 bk.psi[yi]});
    }

    for (std::int64_t t = 0; t <= t_dual; ++t) {
        std::vector<double> vals(replicas);
        for (std::size_t r = 0; r < replicas; ++r)
            vals[r] = reps[r].martingale[static_cast<std::size_t>(t)];
        auto m = mean_se(vals);
        rep.martingale.push_back({"t=" + std::to_string(t), m.mean, m.se, 1.0 - rho});
    }
    return rep;
}

std::vector<DensityPoint> density_curve(Mode mode, const IncrementKernel& kernel, double epsilon,
                                        const std::vector<std::int64_t>& T_list,
                                        std::int64_t core_width, std::size_t replicas,
                                        std::uint64_t seed, int jobs) {
    if (T_list.empty()) throw Error(ErrorCode::bad_config, "density_curve: empty T list");
    if (core_width < 1) throw Error(ErrorCode::margin_too_small, "density_curve: empty core");
    std::vector<std::int64_t> Ts = T_list;
    std::sort(Ts.begin(), Ts.end());
    const std::int64_t T_max = Ts.back();
    const std::int64_t jump = kernel.max_jump();
    const std::int64_t core_lo = -core_width / 2, core_hi = core_lo + core_width - 1;
    const std::int64_t x_half = core_width / 2 + jump * T_max + 1;

    auto one = [&](std::size_t rep) -> std::vector<double> {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = mode;
        cfg.window = {-x_half, x_half, 0, T_max};
        RngField field(cfg);

        Sites state = full_interval(-x_half, x_half);
        std::vector<double> fr;
        std::size_t next = 0;
        for (std::int64_t t = 0; t <= T_max; ++t) {
            while (next < Ts.size() && Ts[next] == t) {
                fr.push_back(static_cast<double>(count_in(state, core_lo, core_hi)) /
                             static_cast<double>(core_width));
                ++next;
            }
            if (t == T_max) break;
            step_clipped(field, state, t, T_max, core_lo, core_hi);
        }
        return fr;
    };
    auto reps = run_replicas<std::vector<double>>(replicas, jobs, one);

    std::vector<DensityPoint> out;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        std::vector<double> vals(replicas);
        for (std::size_t r = 0; r < replicas; ++r) vals[r] = reps[r][i];
        auto m = mean_se(vals);
        out.push_back({Ts[i], m.mean, m.se});
    }
    return out;
}

DensityDrop coalescing_density_reduction(const IncrementKernel& kernel, double epsilon,
                                         std::int64_t T, std::int64_t core_width,
                                         std::size_t replicas, std::uint64_t seed, int jobs) {
    if (core_width < 1)
        throw Error(ErrorCode::margin_too_small, "coalescing_density_reduction: empty core");
    const double rho = bernoulli_kernel(kernel, epsilon).rho;
    const std::int64_t jump = kernel.max_jump();
    const std::int64_t core_lo = -core_width / 2, core_hi = core_lo + core_width - 1;
    const std::int64_t x_half = core_width / 2 + jump * T + 1;

    struct Rep {
        double p0 = 0.0, pT = 0.0;
    };
    auto one = [&](std::size_t rep) -> Rep {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = Mode::web; // pure coalescence; epsilon only sets rho
        cfg.window = {-x_half, x_half, 0, std::max<std::int64_t>(T, 1)};
        RngField field(cfg);

        Sites state = bernoulli_initial(cfg.seed, -x_half, x_half, rho);
        Rep r;
        r.p0 = static_cast<double>(count_in(state, core_lo, core_hi)) /
               static_cast<double>(core_width);
        for (std::int64_t t = 0; t < T; ++t) step_clipped(field, state, t, T, core_lo, core_hi);
        r.pT = static_cast<double>(count_in(state, core_lo, core_hi)) /
               static_cast<double>(core_width);
        return r;
    };
    auto reps = run_replicas<Rep>(replicas, jobs, one);

    std::vector<double> p0(replicas), pT(replicas), drop(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        p0[r] = reps[r].p0;
        pT[r] = reps[r].pT;
        drop[r] = reps[r].p0 - reps[r].pT;
    }
    DensityDrop d;
    d.rho0 = rho;
    auto m0 = mean_se(p0);
    auto mT = mean_se(pT);
    auto md = mean_se(drop);
    d.p0 = m0.mean;
    d.se0 = m0.se;
    d.pT = mT.mean;
    d.seT = mT.se;
    d.drop = md.mean;
    d.se = md.se;
    return d;
}

std::vector<NetDensityRow> density_convergence_experiment(const IncrementKernel& kernel,
                                                          const std::vector<double>& epsilons,
                                                          double t, std::size_t replicas,
                                                          std::uint64_t seed, int jobs) {
    if (t <= 0.0) throw Error(ErrorCode::non_positive_time, "density convergence: need t > 0");
    const double oracle = brownian_net_density(t);
    std::vector<NetDensityRow> out;
    std::uint64_t seed_block = seed;
    for (double eps : epsilons) {
        ScalingMap sc{eps, std::sqrt(kernel.sigma2())};
        const std::int64_t T = sc.lattice_time(t);
        // Wide core: the per-replica count grows with the core while the
        // cost stays dominated by the shrinking light-cone margin.
        const std::int64_t core = std::max<std::int64_t>(1024, std::llround(16.0 / eps));
        Mode mode = eps > 0.0 ? Mode::net : Mode::web;
        auto pts = density_curve(mode, kernel, eps, {T}, core, replicas, seed_block, jobs);
        NetDensityRow row;
        row.epsilon = eps;
        row.measured = pts[0].p_hat / eps;
        row.se = pts[0].se / eps;
        row.oracle = oracle;
        row.rel_gap = std::abs(row.measured - oracle) / oracle;
        out.push_back(row);
        seed_block += replicas;
    }
    return out;
}

std::vector<TightnessRow> tightness_event_estimate(Mode mode, const IncrementKernel& kernel,
                                                   double epsilon, double M,
                                                   const std::vector<double>& deltas,
                                                   std::size_t replicas, std::uint64_t seed,
                                                   int jobs) {
    ScalingMap sc{epsilon, std::sqrt(kernel.sigma2())};
    const std::int64_t M_lat = sc.lattice_space(M);
    const std::int64_t edge = 2 * M_lat;
    std::vector<TightnessRow> out;
    std::uint64_t seed_block = seed;
    for (double delta : deltas) {
        const std::int64_t t_in = sc.lattice_time(delta);   // last injection time
        const std::int64_t t_end = sc.lattice_time(2 * delta);
        auto one = [&](std::size_t rep) -> double {
            SimConfig cfg;
            cfg.seed = seed_block + rep;
            cfg.kernel = kernel;
            cfg.epsilon = epsilon;
            cfg.mode = mode;
            cfg.window = {-edge - 1, edge + 1, 0, std::max<std::int64_t>(t_end, 1)};
            RngField field(cfg);
            // The cloud from every box point: inject the full interval at
            // each time in [0, t_in], then run free.  Touching |x| >= 2M at
            // any step means some path from the box got there.
            Sites state;
            for (std::int64_t t = 0; t <= t_end; ++t) {
                if (t <= t_in) state = unite(state, full_interval(-M_lat, M_lat));
                if (!state.empty() && (state.front() <= -edge || state.back() >= edge)) return 1.0;
                if (t == t_end) break;
                state = step_forward(field, state, t);
            }
            return 0.0;
        };
        auto hits = run_replicas<double>(replicas, jobs, one);
        auto m = mean_se(hits);
        double p = m.mean;
        out.push_back({delta, p,
                       std::sqrt(p * (1.0 - p) / static_cast<double>(replicas))});
        seed_block += replicas;
    }
    return out;
}

std::vector<ExcursionRow> large_excursion_tail(Mode mode, const IncrementKernel& kernel,
                                               double epsilon, std::int64_t T,
                                               const std::vector<std::int64_t>& ells,
                                               std::size_t replicas, std::uint64_t seed,
                                               int jobs) {
    const std::int64_t jump = kernel.max_jump();
    auto one = [&](std::size_t rep) -> std::int64_t {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = mode;
        cfg.window = {-jump * T - 1, jump * T + 1, 0, T};
        RngField field(cfg);
        Sites state{0};
        std::int64_t sup = 0;
        for (std::int64_t t = 0; t < T; ++t) {
            state = step_forward(field, state, t);
            sup = std::max(sup, state.back());
        }
        return sup;
    };
    auto sups = run_replicas<std::int64_t>(replicas, jobs, one);

    std::vector<ExcursionRow> out;
    for (std::int64_t ell : ells) {
        std::size_t hits = 0;
        for (std::int64_t s : sups) hits += s >= ell;
        double p = static_cast<double>(hits) / static_cast<double>(replicas);
        out.push_back({ell, p, std::sqrt(p * (1.0 - p) / static_cast<double>(replicas))});
    }
    return out;
}

BlockDensityResult density_after_block(Mode mode, const IncrementKernel& kernel, double epsilon,
                                       double upsilon, std::int64_t L, double R0,
                                       std::size_t replicas, std::uint64_t seed, int jobs) {
    const std::int64_t m = std::max<std::int64_t>(1, std::llround(upsilon * static_cast<double>(L)));
    const std::int64_t T = std::max<std::int64_t>(1, std::llround(R0 / (upsilon * upsilon)));
    const std::int64_t jump = kernel.max_jump();
    const double threshold = static_cast<double>(m) / std::sqrt(2.0);

    Sites initial;
    for (std::int64_t i = 0; i < m; ++i) initial.push_back(i * L / m);
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());

    auto one = [&](std::size_t rep) -> double {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = mode;
        cfg.window = {-jump * T - 1, L + jump * T + 1, 0, T};
        RngField field(cfg);
        Sites state = initial;
        for (std::int64_t t = 0; t < T; ++t) state = step_forward(field, state, t);
        return static_cast<double>(state.size()) >= threshold ? 1.0 : 0.0;
    };
    auto hits = run_replicas<double>(replicas, jobs, one);
    auto ms = mean_se(hits);
    BlockDensityResult res;
    res.surviving_fraction = ms.mean;
    res.se = std::sqrt(ms.mean * (1.0 - ms.mean) / static_cast<double>(replicas));
    res.T = T;
    return res;
}

} // namespace netlab
