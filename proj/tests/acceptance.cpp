// Acceptance suite: one line per criterion, nonzero exit iff any fails.
// Heavy Monte-Carlo settings follow the documented thresholds; seeds are
// fixed so the verdict is a deterministic property of the build.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "netlab/field.hpp"
#include "netlab/netsim.hpp"
#include "netlab/pathops.hpp"
#include "netlab/pointset.hpp"
#include "netlab/rbp.hpp"
#include "netlab/runner.hpp"
#include "netlab/stats.hpp"

using namespace netlab;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Criterion 1 helper: exhaustive pathwise duality on the query cone.
//
// A = B = {0}, jump-1 kernel with k displacements.  Both set dynamics are
// symmetric in (w1, w2), so unordered per-site outcomes suffice; a site is
// "queryable" at row t iff |x| <= max(t, T - t) (forward cone of A union the
// dual sweep cone of B).  For T = 3 the full cone has 17 sites, so the
// forward cone (9 sites) is exhausted while the dual-only remainder cycles
// through fixed pseudo-random completions; smaller T is fully exhausted.
// ---------------------------------------------------------------------------

struct ExhaustStats {
    std::uint64_t checked = 0;
    std::uint64_t disagreements = 0;
};

ExhaustStats exhaustive_duality(const std::vector<std::int32_t>& support, std::int64_t T,
                                int completions) {
    constexpr int R = 4; // window radius; cones for T <= 3 fit inside
    const int W = 2 * R + 1;
    const int k = static_cast<int>(support.size());

    // Unordered displacement pairs.
    std::vector<std::pair<std::int32_t, std::int32_t>> outcomes;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) outcomes.emplace_back(support[i], support[j]);

    // Site slots: exhaustively enumerated forward-cone sites first, then the
    // dual-only remainder.
    std::vector<int> slot(static_cast<std::size_t>(T) * W, -1);
    auto slot_at = [&](std::int64_t t, std::int64_t x) -> int& {
        return slot[static_cast<std::size_t>(t) * W + static_cast<std::size_t>(x + R)];
    };
    int n_fwd = 0, n_all = 0;
    for (std::int64_t t = 0; t < T; ++t)
        for (std::int64_t x = -t; x <= t; ++x) slot_at(t, x) = n_fwd++;
    n_all = n_fwd;
    for (std::int64_t t = 0; t < T; ++t)
        for (std::int64_t x = -(T - t); x <= T - t; ++x)
            if (slot_at(t, x) < 0) slot_at(t, x) = n_all++;
    const bool full = n_fwd == n_all;
    if (full) completions = 1;

    std::vector<std::int32_t> w1(static_cast<std::size_t>(n_all)),
        w2(static_cast<std::size_t>(n_all));

    auto evaluate = [&]() -> bool {
        std::uint32_t xi = 1u << R; // {0}
        for (std::int64_t t = 0; t < T; ++t) {
            std::uint32_t nxt = 0;
            for (int x = -R; x <= R; ++x)
                if (xi & (1u << (x + R))) {
                    int s = slot_at(t, x);
                    nxt |= 1u << (x + w1[static_cast<std::size_t>(s)] + R);
                    nxt |= 1u << (x + w2[static_cast<std::size_t>(s)] + R);
                }
            xi = nxt;
        }
        bool fwd = (xi >> R) & 1u;

        std::uint32_t phi = 1u << R;
        for (std::int64_t t = T - 1; t >= 0; --t) {
            std::uint32_t prv = 0;
            for (int x = -R; x <= R; ++x) {
                int s = (x >= -R && x <= R) ? slot_at(t, x) : -1;
                if (s < 0) continue;
                std::uint32_t reach =
                    (1u << (x + w1[static_cast<std::size_t>(s)] + R)) |
                    (1u << (x + w2[static_cast<std::size_t>(s)] + R));
                if (phi & reach) prv |= 1u << (x + R);
            }
            phi = prv;
        }
        bool bwd = (phi >> R) & 1u;
        return fwd == bwd;
    };

    ExhaustStats st;
    for (int comp = 0; comp < completions; ++comp) {
        // Fix the dual-only sites for this completion.
        SiteStream fill(0x636f6e65u + static_cast<std::uint64_t>(comp));
        for (int s = n_fwd; s < n_all; ++s) {
            auto o = outcomes[fill.next_u64() % outcomes.size()];
            w1[static_cast<std::size_t>(s)] = o.first;
            w2[static_cast<std::size_t>(s)] = o.second;
        }
        std::vector<std::size_t> choice(static_cast<std::size_t>(n_fwd), 0);
        for (;;) {
            for (int s = 0; s < n_fwd; ++s) {
                auto o = outcomes[choice[static_cast<std::size_t>(s)]];
                w1[static_cast<std::size_t>(s)] = o.first;
                w2[static_cast<std::size_t>(s)] = o.second;
            }
            ++st.checked;
            if (!evaluate()) ++st.disagreements;
            std::size_t i = 0;
            while (i < choice.size() && ++choice[i] == outcomes.size()) choice[i++] = 0;
            if (i == choice.size()) break;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// Harness.
// ---------------------------------------------------------------------------

struct Verdict {
    bool pass;
    std::string detail;
};

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("netlab-acc-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Verdict criterion1() {
    const std::vector<std::int32_t> lazy_support{-1, 0, 1};
    std::uint64_t checked = 0, bad = 0;
    for (std::int64_t T : {1, 2, 3}) {
        auto st = exhaustive_duality(lazy_support, T, 3);
        checked += st.checked;
        bad += st.disagreements;
    }

    std::size_t sampled = 0, agree = 0;
    const std::int64_t Ts[3] = {4, 8, 16};
    SimConfig cfg;
    cfg.kernel = kernel_preset("lazy");
    cfg.epsilon = 0.2;
    cfg.mode = Mode::net;
    for (std::size_t i = 0; i < 100000; ++i) {
        std::int64_t T = Ts[i % 3];
        cfg.seed = 0xd0a11 + i;
        cfg.window = {-2 - T, 2 + T, 0, T};
        RngField field(cfg);
        SiteStream pick(cfg.seed ^ 0x5e75);
        Sites A, B;
        for (std::int64_t x = -2; x <= 2; ++x) {
            if (pick.next_unit() < 0.4) A.push_back(x);
            if (pick.next_unit() < 0.4) B.push_back(x);
        }
        if (A.empty()) A = {0};
        if (B.empty()) B = {-1};
        auto [fwd, bwd] = duality_check(field, A, B, 0, T);
        ++sampled;
        agree += fwd == bwd;
    }

    bool pass = bad == 0 && agree == sampled;
    return {pass, "exhaustive " + std::to_string(checked) + " configs, " +
                      std::to_string(bad) + " disagreements; sampled " + std::to_string(agree) +
                      "/" + std::to_string(sampled)};
}

Verdict criterion2() {
    SimConfig cfg;
    cfg.seed = 0xc0;
    cfg.kernel = kernel_preset("lazy");
    cfg.epsilon = 0.1;
    cfg.mode = Mode::coupled;
    cfg.window = {-5000, 5000, 0, 999};
    RngField field(cfg);
    std::uint64_t n = 0, violations = 0;
    for (std::int64_t t = 0; t < 1000; ++t)
        for (std::int64_t x = -5000; x <= 5000; ++x) {
            ArrowSet a = field.at(x, t);
            std::uint64_t net = (1ULL << cfg.kernel.index_of(a.w1)) |
                                (1ULL << cfg.kernel.index_of(a.w2));
            ++n;
            if (a.bern_mask == 0 || (net & ~a.bern_mask) != 0) ++violations;
        }
    return {violations == 0, std::to_string(n) + " coupled sites, " +
                                 std::to_string(violations) + " containment violations"};
}

Verdict criterion3() {
    TempDir dir("invariance");
    nlohmann::json cfg{{"experiment", "invariance"}, {"eps", 0.05},     {"kernel", "lazy"},
                       {"L", 512},                   {"T", 32},         {"t_dual", 64},
                       {"replicas", 10000},          {"seed", 31}};
    auto res = run_experiment(cfg, dir.path.string(), 1);
    std::string fails;
    for (const auto& n : res.notes)
        if (n.rfind("FAIL", 0) == 0) fails += " [" + n + "]";
    return {res.thresholds_ok,
            "occupation/correlations/pair-frequencies/dual-martingale checks" +
                (fails.empty() ? std::string(" all within tolerance") : fails)};
}

Verdict criterion4() {
    TempDir dir("density");
    // T_max must stay far below eps^-2: near that crossover the branching
    // equilibrium floor flattens the coalescing t^-1/2 decay.
    nlohmann::json cfg{{"experiment", "density"}, {"eps", 0.001},
                       {"Ts", {64, 256, 1024, 4096}}, {"core", 64},
                       {"replicas", 20000},       {"seed", 41}};
    auto res = run_experiment(cfg, dir.path.string(), 1);
    std::string detail;
    for (const auto& n : res.notes)
        if (n.find("slope") != std::string::npos || n.find("spread") != std::string::npos)
            detail += (detail.empty() ? "" : "; ") + n;
    return {res.thresholds_ok, detail};
}

Verdict criterion5() {
    auto kernel = kernel_preset("lazy");
    std::size_t identity_bad = 0;

    auto one = rbp_tail(kernel, 0.01, {16, 64, 256, 1024}, 1, 20000, 51, 1);
    identity_bad += one.identity_violations;
    std::vector<double> xs, ys;
    for (const auto& r : one.rows)
        if (r.K == 1 && r.p_hat > 0) {
            xs.push_back(static_cast<double>(r.T));
            ys.push_back(r.p_hat);
        }
    auto fit1 = fit_power(xs, ys);

    xs.clear();
    ys.clear();
    struct GridPoint {
        double eps;
        std::vector<std::int64_t> Ts;
        std::uint64_t seed;
    };
    // The quadratic tail scaling in eps * sqrt(T) holds for small values of
    // that parameter; beyond ~0.5 the probability saturates and the local
    // slope drops, so the grid stops at 0.4.
    for (const auto& g : {GridPoint{0.02, {25, 100, 400}, 52}, GridPoint{0.05, {16, 64}, 53}}) {
        auto res = rbp_tail(kernel, g.eps, g.Ts, 2, 50000, g.seed, 1);
        identity_bad += res.identity_violations;
        for (const auto& r : res.rows)
            if (r.K == 2 && r.p_hat > 0) {
                xs.push_back(g.eps * std::sqrt(static_cast<double>(r.T)));
                ys.push_back(r.p_hat);
            }
    }
    auto fit2 = fit_power(xs, ys);

    bool pass = fit1.slope >= 0.4 && fit1.slope <= 0.6 && fit2.slope >= 1.7 &&
                fit2.slope <= 2.3 && identity_bad == 0;
    return {pass, "P(R>=1) slope " + fmt(fit1.slope) + " (want 0.5 +- 0.1); P(R>=2) slope " +
                      fmt(fit2.slope) + " (want 2 +- 0.3); identity violations " +
                      std::to_string(identity_bad)};
}

Verdict criterion6() {
    TempDir dir("sticky");
    nlohmann::json cfg{{"experiment", "sticky"},  {"eps_list", {0.05, 0.02}}, {"kernel", "lazy"},
                       {"grid", 16},              {"replicas", 100000},       {"seed", 7000000}};
    auto res = run_experiment(cfg, dir.path.string(), 1);
    std::size_t n_checks = 0, n_fail = 0;
    for (const auto& n : res.notes) {
        ++n_checks;
        if (n.rfind("FAIL", 0) == 0) ++n_fail;
    }
    return {res.thresholds_ok, "residual flatness on 2 x 16-point grid: " +
                                   std::to_string(n_checks - n_fail) + "/" +
                                   std::to_string(n_checks) + " within 3 SE"};
}

Verdict criterion7() {
    TempDir dir("hopcheck");
    nlohmann::json cfg{{"experiment", "hopcheck"}, {"eps", 0.3},  {"kernel", "lazy"},
                       {"horizon", 8},             {"replicas", 1000}, {"seed", 71}};
    auto res = run_experiment(cfg, dir.path.string(), 1);

    // Idempotence and monotonicity of the closure operator.
    bool props = true;
    for (std::uint64_t seed = 0; seed < 50 && props; ++seed) {
        SimConfig sim;
        sim.seed = 0x4a0b + seed;
        sim.kernel = kernel_preset("lazy");
        sim.epsilon = 0.3;
        sim.mode = Mode::net;
        sim.window = {-40, 40, 0, 6};
        RngField f(sim);
        std::vector<LatticePath> paths;
        for (std::int64_t x : {-2, 0, 3})
            for (auto ch : {Chooser::first(), Chooser::second()})
                paths.push_back(follow_path(f, x, 0, 6, ch));
        auto once = hop_closure(paths, 6);
        props = props && once == hop_closure(once, 6);
        auto sub = hop_closure({paths[0], paths[3]}, 6);
        props = props &&
                std::includes(once.begin(), once.end(), sub.begin(), sub.end());
    }
    return {res.thresholds_ok && props,
            std::string("closure == enumeration on 1000 realizations: ") +
                (res.thresholds_ok ? "yes" : "NO") +
                "; idempotence/monotonicity: " + (props ? "hold" : "VIOLATED")};
}

Verdict criterion8() {
    TempDir dir("netdensity");
    // The gap-ordering check compares the largest and smallest eps; they
    // must differ enough that the systematic discretization gap at the
    // larger eps (~5%) dominates the ~1% Monte-Carlo noise at the smaller.
    nlohmann::json cfg{{"experiment", "net-density"}, {"eps_list", {0.05, 0.02, 0.0125}},
                       {"kernel", "lazy"},            {"t", 1.0},
                       {"replicas", 256},             {"seed", 81}};
    auto res = run_experiment(cfg, dir.path.string(), 1);
    std::string detail;
    for (const auto& n : res.notes) detail += (detail.empty() ? "" : "; ") + n;
    return {res.thresholds_ok, detail};
}

Verdict criterion9() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"simple", "lazy"}) {
        auto base = kernel_preset(name);
        auto pbar = difference_kernel(base);
        auto r = potential_kernel(pbar, 40, std::int64_t(1) << 14);
        // Spitzer slope with the sublattice period factor: g / (2 sigma^2).
        double target = static_cast<double>(pbar.lattice_gcd()) / (2.0 * base.sigma2());
        double ratio = r.limit / 40.0 / target;
        pass = pass && ratio >= 0.9 && ratio <= 1.1;
        detail += (detail.empty() ? "" : "; ") + std::string(name) +
                  ": Abar(40)/40 = " + fmt(r.limit / 40.0) + " vs " + fmt(target);
    }
    return {pass, detail};
}

Verdict criterion10() {
    TempDir dir("golden");
    std::vector<nlohmann::json> cfgs{
        {{"experiment", "duality"}, {"eps", 0.2}, {"Ts", {2, 4}}, {"replicas", 2000}, {"seed", 101}},
        {{"experiment", "rbp"}, {"eps", 0.1}, {"Ts", {4, 16}}, {"K_max", 2}, {"replicas", 2000},
         {"seed", 202}},
        {{"experiment", "density"}, {"eps", 0.05}, {"Ts", {16, 64}}, {"core", 32},
         {"replicas", 500}, {"seed", 303}},
        {{"experiment", "sticky"}, {"eps_list", {0.05}}, {"grid", 8}, {"horizon", 400},
         {"replicas", 2000}, {"seed", 404}},
        {{"experiment", "dump-arrows"}, {"mode", "coupled"}, {"eps", 0.1}, {"seed", 505}},
    };
    std::size_t replays = 0, mismatches = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        fs::path sub = dir.path / ("g" + std::to_string(i));
        run_experiment(cfgs[i], sub.string(), 1);
        for (int jobs : {1, 3, 7}) {
            std::string report;
            ++replays;
            if (replay_manifest((sub / "manifest.json").string(), jobs, &report) != 0)
                ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(replays) + " replays over jobs {1,3,7}, " +
                                 std::to_string(mismatches) + " byte mismatches"};
}

const char* kNames[10] = {
    "exact pathwise duality",
    "net-in-bernoulli coupling containment",
    "bernoulli-net invariant law",
    "density decay exponent",
    "relevant-branching-point tail exponents",
    "sticky-pair martingale residual flatness",
    "hopping closure equals net enumeration",
    "rescaled density vs brownian-net oracle",
    "potential kernel asymptote",
    "byte-identical replay at any parallelism",
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    Verdict (*criteria[10])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        if (!wanted.empty() && !wanted.count(i + 1)) continue;
        auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        std::printf("criterion %2d [%s]: %s — %s (%.1fs)\n", i + 1, kNames[i],
                    v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures;
}
