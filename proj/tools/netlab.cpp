// netlab: experiment runner for discrete branching-coalescing net models.
//
// Each subcommand assembles a config (flags over optional config-file
// defaults), hands it to run_experiment, and reports threshold checks.
// Exit codes: 0 ok, 1 execution/config error, 2 threshold violation under
// --assert (or replay mismatch).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netlab/error.hpp"
#include "netlab/runner.hpp"

using nlohmann::json;

namespace {

json parse_config_value(const std::string& raw) {
    if (raw.find(',') != std::string::npos) {
        json arr = json::array();
        std::stringstream ss(raw);
        std::string tok;
        while (std::getline(ss, tok, ',')) arr.push_back(json::parse(tok));
        return arr;
    }
    try {
        return json::parse(raw);
    } catch (const json::exception&) {
        return raw;
    }
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw netlab::Error(netlab::ErrorCode::bad_config, "cannot open config: " + path);
    json cfg = json::object();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw netlab::Error(netlab::ErrorCode::bad_config,
                                path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw netlab::Error(netlab::ErrorCode::bad_config,
                                path + ":" + std::to_string(lineno) + ": empty key or value");
        cfg[key] = parse_config_value(val);
    }
    return cfg;
}

struct Common {
    std::string kernel;
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t replicas = 0;
    int jobs = 1;
    std::string outdir = "out";
    bool do_assert = false;
    std::string config_file;
};

// Options registered on every experiment subcommand; values land in cfg only
// when the user supplied them so runner defaults stay in charge.
struct Collector {
    json cfg = json::object();
    std::vector<std::function<void()>> finishers;

    template <typename T>
    void opt(CLI::App* app, const std::string& flag, const std::string& key, T& slot,
             const std::string& help) {
        auto* o = app->add_option(flag, slot, help);
        if constexpr (std::is_same_v<T, std::vector<std::int64_t>> ||
                      std::is_same_v<T, std::vector<double>>)
            o->delimiter(',');
        finishers.push_back([this, o, key, &slot] {
            if (o->count()) cfg[key] = slot;
        });
    }
    void finish() {
        for (auto& f : finishers) f();
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete net / Bernoulli-net experiment runner"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "duality", "invariance", "density",     "pdec",  "sticky", "hopcheck",   "rbp",
        "rbp-graph", "tightness", "excursion", "net-density", "denbc", "dump-arrows"};

    struct Sub {
        CLI::App* cmd = nullptr;
        Common common;
        Collector col;
        // typed slots for experiment options
        std::int64_t T = 0, L = 0, t_dual = 0, core = 0, K_max = 0, horizon = 0, grid = 0, x1 = 0,
                     x2 = 0, x_min = 0, x_max = 0, t_min = 0, t_max = 0;
        double M = 0, t = 0, upsilon = 0, R0 = 0;
        std::string mode;
        std::vector<std::int64_t> Ts, ells, Ls;
        std::vector<double> eps_list, deltas;
    };
    std::vector<std::unique_ptr<Sub>> subs;

    for (const auto& name : experiments) {
        auto sub = std::make_unique<Sub>();
        Sub& s = *sub;
        s.cmd = app.add_subcommand(name, name + " experiment");
        s.cmd->add_option("--config", s.common.config_file, "key=value config file (flags win)");
        s.cmd->add_option("--jobs", s.common.jobs, "worker threads")->check(CLI::PositiveNumber);
        s.cmd->add_option("--outdir", s.common.outdir, "output directory");
        s.cmd->add_flag("--assert", s.common.do_assert, "exit 2 on threshold violation");
        s.col.opt(s.cmd, "--kernel", "kernel", s.common.kernel, "kernel preset or file");
        s.col.opt(s.cmd, "--eps", "eps", s.common.eps, "branching probability");
        s.col.opt(s.cmd, "--seed", "seed", s.common.seed, "base seed");
        s.col.opt(s.cmd, "--replicas", "replicas", s.common.replicas, "replica count");
        s.col.opt(s.cmd, "--T", "T", s.T, "horizon / top time");
        s.col.opt(s.cmd, "--Ts", "Ts", s.Ts, "horizon sweep");
        s.col.opt(s.cmd, "--L", "L", s.L, "window core width / block length");
        s.col.opt(s.cmd, "--Ls", "Ls", s.Ls, "block length sweep");
        s.col.opt(s.cmd, "--t-dual", "t_dual", s.t_dual, "dual trace depth");
        s.col.opt(s.cmd, "--core", "core", s.core, "measurement core width");
        s.col.opt(s.cmd, "--K-max", "K_max", s.K_max, "max tail order");
        s.col.opt(s.cmd, "--horizon", "horizon", s.horizon, "lattice horizon");
        s.col.opt(s.cmd, "--grid", "grid", s.grid, "t-grid size");
        s.col.opt(s.cmd, "--x1", "x1", s.x1, "first start");
        s.col.opt(s.cmd, "--x2", "x2", s.x2, "second start");
        s.col.opt(s.cmd, "--x-min", "x_min", s.x_min, "window x min");
        s.col.opt(s.cmd, "--x-max", "x_max", s.x_max, "window x max");
        s.col.opt(s.cmd, "--t-min", "t_min", s.t_min, "window t min");
        s.col.opt(s.cmd, "--t-max", "t_max", s.t_max, "window t max");
        s.col.opt(s.cmd, "--M", "M", s.M, "rescaled box half-width");
        s.col.opt(s.cmd, "--t", "t", s.t, "rescaled time");
        s.col.opt(s.cmd, "--upsilon", "upsilon", s.upsilon, "initial density parameter");
        s.col.opt(s.cmd, "--R0", "R0", s.R0, "time scale parameter");
        s.col.opt(s.cmd, "--mode", "mode", s.mode, "web|sticky_pair|net|bernoulli|coupled");
        s.col.opt(s.cmd, "--eps-list", "eps_list", s.eps_list, "epsilon sweep");
        s.col.opt(s.cmd, "--deltas", "deltas", s.deltas, "delta sweep");
        s.col.opt(s.cmd, "--ells", "ells", s.ells, "excursion levels");
        subs.push_back(std::move(sub));
    }

    CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and compare outputs");
    std::string manifest_path;
    int replay_jobs = 1;
    replay->add_option("manifest", manifest_path, "path to manifest.json")->required();
    replay->add_option("--jobs", replay_jobs, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (replay->parsed()) {
            std::string report;
            int rc = netlab::replay_manifest(manifest_path, replay_jobs, &report);
            std::fputs(report.c_str(), stdout);
            std::puts(rc == 0 ? "replay: byte-identical" : "replay: MISMATCH");
            return rc;
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            Sub& s = *subs[i];
            if (!s.cmd->parsed()) continue;
            json cfg = json::object();
            if (!s.common.config_file.empty()) cfg = load_config_file(s.common.config_file);
            s.col.finish();
            for (auto& [k, v] : s.col.cfg.items()) cfg[k] = v; // flags win
            cfg["experiment"] = experiments[i];
            auto res = netlab::run_experiment(cfg, s.common.outdir, s.common.jobs);
            for (const auto& n : res.notes) std::puts(n.c_str());
            std::printf("wrote %zu output(s) to %s\n", res.manifest.outputs.size(),
                        s.common.outdir.c_str());
            if (s.common.do_assert && !res.thresholds_ok) return 2;
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
