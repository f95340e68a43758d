#include "netlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "netlab/netsim.hpp"
#include "netlab/parallel.hpp"
#include "netlab/pathops.hpp"
#include "netlab/pointset.hpp"
#include "netlab/rbp.hpp"
#include "netlab/stats.hpp"

namespace netlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kTagSets = 0x73657473ULL; // "sets": random A/B draws

double get_num(const json& cfg, const std::string& key, double dflt) {
    return cfg.contains(key) ? cfg.at(key).get<double>() : dflt;
}
std::int64_t get_int(const json& cfg, const std::string& key, std::int64_t dflt) {
    return cfg.contains(key) ? cfg.at(key).get<std::int64_t>() : dflt;
}
std::string get_str(const json& cfg, const std::string& key, const std::string& dflt) {
    return cfg.contains(key) ? cfg.at(key).get<std::string>() : dflt;
}
template <typename T>
std::vector<T> get_list(const json& cfg, const std::string& key, std::vector<T> dflt) {
    if (!cfg.contains(key)) return dflt;
    return cfg.at(key).get<std::vector<T>>();
}

std::string f(double v) { return CsvTable::fmt(v); }
std::string f(std::int64_t v) { return CsvTable::fmt(v); }
std::string fu(std::uint64_t v) { return CsvTable::fmt(v); }

// Random nonempty subset of [lo, hi], one inclusion coin per site plus a
// forced element so the set is never empty.
Sites random_sites(std::uint64_t seed, std::uint64_t idx, std::int64_t lo, std::int64_t hi,
                   std::uint64_t salt) {
    SiteStream s(seed, kTagSets + salt, static_cast<std::int64_t>(idx), -3);
    Sites out;
    for (std::int64_t x = lo; x <= hi; ++x)
        if (s.next_unit() < 0.5) out.push_back(x);
    if (out.empty()) {
        std::int64_t span = hi - lo + 1;
        out.push_back(lo + static_cast<std::int64_t>(s.next_u64() % static_cast<std::uint64_t>(span)));
    }
    return out;
}

struct Ctx {
    const json& cfg;
    IncrementKernel kernel;
    double eps;
    std::uint64_t seed;
    std::size_t replicas;
    int jobs;
    // outputs: filename -> full content, built before anything touches disk
    std::map<std::string, std::string> files;
    bool ok = true;
    std::vector<std::string> notes;

    void check(bool cond, const std::string& what) {
        notes.push_back(std::string(cond ? "pass: " : "FAIL: ") + what);
        ok = ok && cond;
    }
};

void run_duality(Ctx& c) {
    auto Ts = get_list<std::int64_t>(c.cfg, "Ts", {get_int(c.cfg, "T", 16)});
    const std::int64_t jump = c.kernel.max_jump();
    CsvTable csv({"T", "agree", "replicas", "seed0"});
    std::uint64_t seed_block = c.seed;
    for (std::int64_t T : Ts) {
        auto one = [&](std::size_t i) -> double {
            SimConfig sim;
            sim.seed = seed_block + i;
            sim.kernel = c.kernel;
            sim.epsilon = c.eps;
            sim.mode = Mode::net;
            sim.window = {-2 - jump * T, 2 + jump * T, 0, T};
            RngField field(sim);
            Sites A = random_sites(seed_block, i, -2, 2, 1);
            Sites B = random_sites(seed_block, i, -2, 2, 2);
            auto [fwd, bwd] = duality_check(field, A, B, 0, T);
            return fwd == bwd ? 1.0 : 0.0;
        };
        auto agree = run_replicas<double>(c.replicas, c.jobs, one);
        std::int64_t n_agree = 0;
        for (double a : agree) n_agree += a > 0.5;
        csv.add_row({f(T), f(n_agree), fu(c.replicas), fu(seed_block)});
        c.check(n_agree == static_cast<std::int64_t>(c.replicas),
                "pathwise duality agreement at T=" + std::to_string(T));
        seed_block += c.replicas;
    }
    c.files["duality.csv"] = csv.str();
}

void run_invariance(Ctx& c) {
    const std::int64_t L = get_int(c.cfg, "L", 512);
    const std::int64_t T = get_int(c.cfg, "T", 32);
    const std::int64_t t_dual = get_int(c.cfg, "t_dual", 64);
    auto rep = invariance_test(c.kernel, c.eps, L, T, t_dual, c.replicas, c.seed, c.jobs);

    CsvTable csv({"site_or_lag", "stat", "value", "se"});
    auto emit = [&](const std::vector<StatRow>& rows, const std::string& stat) {
        for (const auto& r : rows) csv.add_row({r.label, stat, f(r.value), f(r.se)});
    };
    emit(rep.occupation, "occupation");
    emit(rep.correlations, "correlation");
    emit(rep.pair_freq, "pair_freq");
    emit(rep.martingale, "martingale");
    c.files["invariance.csv"] = csv.str();

    const auto& core = rep.occupation[0];
    c.check(std::abs(core.value - rep.rho) <= 3.0 * core.se, "core occupation within 3 SE of rho");
    c.check(rep.occupation[1].value <= 0.01, "per-site 3-SE outlier fraction <= 1%");
    for (const auto& r : rep.correlations)
        c.check(std::abs(r.value - r.reference) <= 3.0 * r.se, "correlation " + r.label);
    for (const auto& r : rep.pair_freq)
        c.check(std::abs(r.value - r.reference) <= 3.0 * r.se, "pair frequency " + r.label);
    for (const auto& r : rep.martingale)
        // the t=0 value is deterministic (se = 0); allow summation rounding
        c.check(std::abs(r.value - r.reference) <= 3.0 * r.se + 1e-12,
                "dual martingale " + r.label);
}

void run_density(Ctx& c) {
    auto Ts = get_list<std::int64_t>(c.cfg, "Ts", {64, 256, 1024, 4096});
    const std::int64_t core = get_int(c.cfg, "core", 64);
    Mode mode = parse_mode(get_str(c.cfg, "mode", "net"));
    auto pts = density_curve(mode, c.kernel, c.eps, Ts, core, c.replicas, c.seed, c.jobs);

    CsvTable csv({"epsilon", "T", "p_hat", "se", "replicas", "seed0"});
    for (const auto& p : pts)
        csv.add_row({f(c.eps), f(p.T), f(p.p_hat), f(p.se), fu(c.replicas), fu(c.seed)});
    c.files["density.csv"] = csv.str();

    std::vector<double> xs, ys, scaled;
    for (const auto& p : pts)
        if (p.T > 0 && p.p_hat > 0) {
            xs.push_back(static_cast<double>(p.T));
            ys.push_back(p.p_hat);
            scaled.push_back(p.p_hat * std::sqrt(static_cast<double>(p.T)));
        }
    if (xs.size() >= 3) {
        auto fit = fit_power(xs, ys);
        c.check(fit.slope >= -0.6 && fit.slope <= -0.4,
                "log-log decay slope " + f(fit.slope) + " in [-0.6, -0.4]");
        double lo = *std::min_element(scaled.begin(), scaled.end());
        double hi = *std::max_element(scaled.begin(), scaled.end());
        c.check(hi <= 2.0 * lo, "p_hat * sqrt(T) spread " + f(hi / lo) + " <= 2");
    }
}

void run_pdec(Ctx& c) {
    auto eps_list = get_list<double>(c.cfg, "eps_list", {c.eps});
    auto Ts = get_list<std::int64_t>(c.cfg, "Ts", {256, 1024});
    const std::int64_t core = get_int(c.cfg, "core", 256);
    CsvTable csv({"epsilon", "T", "rho0", "p0", "se0", "pT", "seT", "drop", "se", "ratio"});
    std::vector<double> ratios;
    std::uint64_t seed_block = c.seed;
    for (double eps : eps_list)
        for (std::int64_t T : Ts) {
            auto d = coalescing_density_reduction(c.kernel, eps, T, core, c.replicas, seed_block,
                                                  c.jobs);
            double ratio = T > 0 ? d.drop / (eps * eps * std::sqrt(static_cast<double>(T))) : 0.0;
            csv.add_row({f(eps), f(T), f(d.rho0), f(d.p0), f(d.se0), f(d.pT), f(d.seT), f(d.drop),
                         f(d.se), f(ratio)});
            if (T > 0) ratios.push_back(ratio);
            seed_block += c.replicas;
        }
    c.files["pdec.csv"] = csv.str();
    if (ratios.size() >= 2) {
        double lo = *std::min_element(ratios.begin(), ratios.end());
        double hi = *std::max_element(ratios.begin(), ratios.end());
        c.check(lo > 0 && hi <= 4.0 * lo,
                "drop / (eps^2 sqrt(T)) spread " + f(lo > 0 ? hi / lo : -1.0) + " <= 4");
    }
}

void run_sticky(Ctx& c) {
    auto eps_list = get_list<double>(c.cfg, "eps_list", {c.eps});
    const int grid = static_cast<int>(get_int(c.cfg, "grid", 16));
    const std::int64_t x1 = get_int(c.cfg, "x1", 0);
    const std::int64_t x2 = get_int(c.cfg, "x2", 0);
    const double sigma2 = c.kernel.sigma2();
    const std::int64_t jump = c.kernel.max_jump();

    auto pbar = difference_kernel(c.kernel);
    PotentialTable abar(pbar, 512, std::int64_t(1) << 15, sigma2);

    CsvTable csv({"epsilon", "t", "mean_R_product", "se", "mean_R_potential", "se", "mean_Z",
                  "se"});
    std::uint64_t seed_block = c.seed;
    for (double eps : eps_list) {
        std::int64_t horizon = get_int(c.cfg, "horizon", 0);
        if (horizon <= 0)
            horizon = static_cast<std::int64_t>(std::llround(0.5 / (sigma2 * eps * eps)));
        std::vector<std::int64_t> ts;
        for (int i = 1; i <= grid; ++i) ts.push_back(horizon * i / grid);

        auto one = [&](std::size_t i) -> std::vector<double> {
            SimConfig sim;
            sim.seed = seed_block + i;
            sim.kernel = c.kernel;
            sim.epsilon = eps;
            sim.mode = Mode::sticky_pair;
            std::int64_t reach = jump * horizon + std::max(std::abs(x1), std::abs(x2)) + 1;
            sim.window = {-reach, reach, 0, horizon};
            RngField field(sim);
            auto trace = sticky_pair(field, x1, x2, horizon, eps);
            auto rp = residual_product(trace, eps);
            auto ra = residual_potential(trace, abar, eps, sigma2);
            std::vector<double> out;
            out.reserve(3 * ts.size());
            for (std::int64_t t : ts) {
                auto n = static_cast<std::size_t>(t);
                out.push_back(rp[n] - rp[0]);
                out.push_back(ra[n] - ra[0]);
                out.push_back(trace.z(n));
            }
            return out;
        };
        auto reps = run_replicas<std::vector<double>>(c.replicas, c.jobs, one);
        for (std::size_t gi = 0; gi < ts.size(); ++gi) {
            std::vector<double> vp(c.replicas), va(c.replicas), vz(c.replicas);
            for (std::size_t r = 0; r < c.replicas; ++r) {
                vp[r] = reps[r][3 * gi];
                va[r] = reps[r][3 * gi + 1];
                vz[r] = reps[r][3 * gi + 2];
            }
            auto mp = mean_se(vp);
            auto ma = mean_se(va);
            auto mz = mean_se(vz);
            double t_resc = sigma2 * eps * eps * static_cast<double>(ts[gi]);
            csv.add_row({f(eps), f(t_resc), f(mp.mean), f(mp.se), f(ma.mean), f(ma.se), f(mz.mean),
                         f(mz.se)});
            c.check(std::abs(mp.mean) <= 3.0 * mp.se,
                    "product residual flat at eps=" + f(eps) + " t=" + f(t_resc));
            c.check(std::abs(ma.mean) <= 3.0 * ma.se,
                    "potential residual flat at eps=" + f(eps) + " t=" + f(t_resc));
        }
        seed_block += c.replicas;
    }
    c.files["sticky.csv"] = csv.str();
}

void run_hopcheck(Ctx& c) {
    const std::int64_t H = get_int(c.cfg, "horizon", 8);
    const std::int64_t jump = c.kernel.max_jump();
    auto one = [&](std::size_t i) -> double {
        SimConfig sim;
        sim.seed = c.seed + i;
        sim.kernel = c.kernel;
        sim.epsilon = c.eps;
        sim.mode = Mode::sticky_pair;
        sim.window = {-jump * H - 1, jump * H + 1, 0, H};
        RngField field(sim);
        // W^1 and W^2 trajectories from every point of the forward light
        // cone of (0, 0), the discrete double web.
        std::vector<LatticePath> web;
        for (std::int64_t s = 0; s <= H; ++s)
            for (std::int64_t y = -jump * s; y <= jump * s; ++y) {
                web.push_back(follow_path(field, y, s, H, Chooser::first()));
                web.push_back(follow_path(field, y, s, H, Chooser::second()));
            }
        auto closure = hop_closure(std::move(web), H);
        std::vector<LatticePath> from_origin;
        for (auto& p : closure)
            if (p.start_time == 0 && p.positions.front() == 0) from_origin.push_back(p);
        std::sort(from_origin.begin(), from_origin.end());
        auto net = enumerate_net_paths(field, 0, 0, H);
        return from_origin == net ? 1.0 : 0.0;
    };
    auto oks = run_replicas<double>(c.replicas, c.jobs, one);

    json out;
    out["realizations"] = json::array();
    bool all_ok = true;
    for (std::size_t i = 0; i < c.replicas; ++i) {
        bool ok = oks[i] > 0.5;
        all_ok = all_ok && ok;
        out["realizations"].push_back({{"seed", c.seed + i}, {"ok", ok}});
    }
    out["all_ok"] = all_ok;
    c.files["hopcheck.json"] = out.dump(2) + "\n";
    c.check(all_ok, "hop closure equals net path enumeration on every realization");
}

void run_rbp(Ctx& c) {
    auto Ts = get_list<std::int64_t>(c.cfg, "Ts", {16, 64, 256, 1024});
    const int K_max = static_cast<int>(get_int(c.cfg, "K_max", 2));
    auto res = rbp_tail(c.kernel, c.eps, Ts, K_max, c.replicas, c.seed, c.jobs);
    CsvTable csv({"epsilon", "T", "K", "p_hat", "se", "replicas"});
    for (const auto& r : res.rows)
        csv.add_row({f(r.epsilon), f(r.T), f(std::int64_t(r.K)), f(r.p_hat), f(r.se),
                     fu(r.replicas)});
    c.files["rbp.csv"] = csv.str();
    c.check(res.identity_violations == 0, "pathwise identity {R_T>=1} = {|xi_T|>=2}");
}

void run_rbp_graph(Ctx& c) {
    const std::int64_t U = get_int(c.cfg, "T", 12);
    const std::int64_t jump = c.kernel.max_jump();
    struct Row {
        std::int64_t rbps = 0, vertices = 0, edges = 0;
        bool ok = true;
    };
    auto one = [&](std::size_t i) -> Row {
        SimConfig sim;
        sim.seed = c.seed + i;
        sim.kernel = c.kernel;
        sim.epsilon = c.eps;
        sim.mode = Mode::net;
        sim.window = {-jump * U - 1, jump * U + 1, 0, U};
        RngField field(sim);
        auto g = build_graph(field, {0}, 0, U);
        Row row;
        row.vertices = static_cast<std::int64_t>(g.vertices.size());
        row.edges = static_cast<std::int64_t>(g.edges.size());
        for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
            int d = g.out_degree(v);
            if (g.vertices[static_cast<std::size_t>(v)].kind == RbpGraph::Kind::rbp) {
                ++row.rbps;
                row.ok = row.ok && d == 2;
            } else if (g.vertices[static_cast<std::size_t>(v)].kind == RbpGraph::Kind::initial) {
                row.ok = row.ok && (d == 1 || d == 2);
            }
        }
        return row;
    };
    auto rows = run_replicas<Row>(c.replicas, c.jobs, one);
    CsvTable csv({"replica", "rbps", "vertices", "edges", "ok"});
    bool all_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv.add_row({fu(i), f(rows[i].rbps), f(rows[i].vertices), f(rows[i].edges),
                     rows[i].ok ? "1" : "0"});
        all_ok = all_ok && rows[i].ok;
    }
    c.files["rbp-graph.csv"] = csv.str();
    c.check(all_ok, "graph degree structure (RBP out-degree 2, initial 1..2)");
}

void run_tightness(Ctx& c) {
    Mode mode = parse_mode(get_str(c.cfg, "mode", "net"));
    const double M = get_num(c.cfg, "M", 2.0);
    auto deltas = get_list<double>(c.cfg, "deltas", {0.2, 0.1, 0.05});
    auto rows = tightness_event_estimate(mode, c.kernel, c.eps, M, deltas, c.replicas, c.seed,
                                         c.jobs);
    CsvTable csv({"delta", "p_hat", "se"});
    for (const auto& r : rows) csv.add_row({f(r.delta), f(r.p_hat), f(r.se)});
    c.files["tightness.csv"] = csv.str();
}

void run_excursion(Ctx& c) {
    Mode mode = parse_mode(get_str(c.cfg, "mode", "net"));
    const std::int64_t T = get_int(c.cfg, "T", 1000);
    auto ells = get_list<std::int64_t>(c.cfg, "ells", {0, 16, 32, 64, 96, 128});
    auto rows = large_excursion_tail(mode, c.kernel, c.eps, T, ells, c.replicas, c.seed, c.jobs);
    CsvTable csv({"ell", "p_hat", "se"});
    for (const auto& r : rows) csv.add_row({f(r.ell), f(r.p_hat), f(r.se)});
    c.files["excursion.csv"] = csv.str();
}

void run_net_density(Ctx& c) {
    auto eps_list = get_list<double>(c.cfg, "eps_list", {0.02, 0.005});
    const double t = get_num(c.cfg, "t", 1.0);
    auto rows = density_convergence_experiment(c.kernel, eps_list, t, c.replicas, c.seed, c.jobs);
    CsvTable csv({"epsilon", "measured", "se", "oracle", "rel_gap"});
    for (const auto& r : rows)
        csv.add_row({f(r.epsilon), f(r.measured), f(r.se), f(r.oracle), f(r.rel_gap)});
    c.files["net-density.csv"] = csv.str();
    if (rows.size() >= 2) {
        const auto& hi = *std::max_element(rows.begin(), rows.end(),
                                           [](auto& a, auto& b) { return a.epsilon < b.epsilon; });
        const auto& lo = *std::min_element(rows.begin(), rows.end(),
                                           [](auto& a, auto& b) { return a.epsilon < b.epsilon; });
        c.check(lo.rel_gap < hi.rel_gap, "oracle gap shrinks from eps=" + f(hi.epsilon) +
                                             " to eps=" + f(lo.epsilon));
        c.check(lo.rel_gap < 0.15, "oracle gap at eps=" + f(lo.epsilon) + " below 15%");
    }
}

void run_denbc(Ctx& c) {
    Mode mode = parse_mode(get_str(c.cfg, "mode", "net"));
    const double upsilon = get_num(c.cfg, "upsilon", 1.0 / 16.0);
    const double R0 = get_num(c.cfg, "R0", 4.0);
    auto Ls = get_list<std::int64_t>(c.cfg, "Ls", {get_int(c.cfg, "L", 512)});
    CsvTable csv({"upsilon", "L", "T", "fraction", "se"});
    std::uint64_t seed_block = c.seed;
    for (std::int64_t L : Ls) {
        auto r = density_after_block(mode, c.kernel, c.eps, upsilon, L, R0, c.replicas, seed_block,
                                     c.jobs);
        csv.add_row({f(upsilon), f(L), f(r.T), f(r.surviving_fraction), f(r.se)});
        seed_block += c.replicas;
    }
    c.files["denbc.csv"] = csv.str();
}

void run_dump_arrows(Ctx& c) {
    SimConfig sim;
    sim.seed = c.seed;
    sim.kernel = c.kernel;
    sim.epsilon = c.eps;
    sim.mode = parse_mode(get_str(c.cfg, "mode", "net"));
    sim.window = {get_int(c.cfg, "x_min", -8), get_int(c.cfg, "x_max", 8),
                  get_int(c.cfg, "t_min", 0), get_int(c.cfg, "t_max", 8)};
    RngField field(sim);
    std::string out;
    for (std::int64_t t = sim.window.t_min; t <= sim.window.t_max; ++t)
        for (std::int64_t x = sim.window.x_min; x <= sim.window.x_max; ++x) {
            ArrowSet a = field.at(x, t);
            out += f(x) + " " + f(t) + " " + f(std::int64_t(a.w1)) + " " + f(std::int64_t(a.w2));
            if (sim.mode == Mode::bernoulli || sim.mode == Mode::coupled) {
                std::int32_t buf[64];
                int n = field.arrows_at(x, t, ArrowUse::bernoulli, buf);
                for (int i = 0; i < n; ++i) out += " " + f(std::int64_t(buf[i]));
            }
            out += '\n';
        }
    c.files["dump-arrows.txt"] = out;
}

} // namespace

RunResult run_experiment(const json& cfg, const std::string& outdir, int jobs) {
    const std::string experiment = cfg.at("experiment").get<std::string>();
    Ctx c{cfg,
          resolve_kernel(get_str(cfg, "kernel", "lazy")),
          get_num(cfg, "eps", 0.0),
          static_cast<std::uint64_t>(get_int(cfg, "seed", 1)),
          static_cast<std::size_t>(get_int(cfg, "replicas", 1000)),
          jobs,
          {},
          true,
          {}};

    auto started = utc_timestamp();
    auto t0 = std::chrono::steady_clock::now();
    if (experiment == "duality")
        run_duality(c);
    else if (experiment == "invariance")
        run_invariance(c);
    else if (experiment == "density")
        run_density(c);
    else if (experiment == "pdec")
        run_pdec(c);
    else if (experiment == "sticky")
        run_sticky(c);
    else if (experiment == "hopcheck")
        run_hopcheck(c);
    else if (experiment == "rbp")
        run_rbp(c);
    else if (experiment == "rbp-graph")
        run_rbp_graph(c);
    else if (experiment == "tightness")
        run_tightness(c);
    else if (experiment == "excursion")
        run_excursion(c);
    else if (experiment == "net-density")
        run_net_density(c);
    else if (experiment == "denbc")
        run_denbc(c);
    else if (experiment == "dump-arrows")
        run_dump_arrows(c);
    else
        throw Error(ErrorCode::bad_config, "unknown experiment: " + experiment);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunResult res;
    res.thresholds_ok = c.ok;
    res.notes = c.notes;
    res.manifest.version = kVersion;
    res.manifest.experiment = experiment;
    res.manifest.config = cfg;
    res.manifest.seed0 = c.seed;
    res.manifest.replica_count = c.replicas;
    res.manifest.started_at = started;
    res.manifest.elapsed_s = elapsed;

    fs::create_directories(outdir);
    std::vector<fs::path> written;
    try {
        for (const auto& [name, content] : c.files) {
            fs::path p = fs::path(outdir) / name;
            write_text_file(p.string(), content);
            written.push_back(p);
            res.manifest.outputs.push_back({name, sha256_hex(content)});
        }
        res.manifest.save((fs::path(outdir) / "manifest.json").string());
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
    return res;
}

int replay_manifest(const std::string& manifest_path, int jobs, std::string* report) {
    RunManifest m = RunManifest::load(manifest_path);
    std::string rep;
    if (m.version != kVersion)
        rep += "warning: version mismatch (manifest " + m.version + ", library " + kVersion +
               "); comparison attempted anyway\n";

    fs::path scratch = fs::path(manifest_path).parent_path() / "replay-scratch";
    auto res = run_experiment(m.config, scratch.string(), jobs);

    std::map<std::string, std::string> fresh;
    for (const auto& o : res.manifest.outputs) fresh[o.path] = o.sha256;

    bool identical = true;
    for (const auto& o : m.outputs) {
        auto it = fresh.find(o.path);
        if (it == fresh.end()) {
            rep += "missing output in replay: " + o.path + "\n";
            identical = false;
        } else if (it->second != o.sha256) {
            rep += "differs: " + o.path + "\n";
            identical = false;
        } else {
            rep += "identical: " + o.path + "\n";
        }
    }
    if (report) *report = rep;
    return identical ? 0 : 2;
}

} // namespace netlab
