#pragma once

#include <string>
#include <vector>

#include "netlab/io.hpp"

namespace netlab {

// Outcome of one experiment run: artifacts on disk plus the acceptance-style
// threshold verdict used by the CLI's --assert flag.
struct RunResult {
    bool thresholds_ok = true;
    std::vector<std::string> notes; // one line per threshold check
    RunManifest manifest;
};

// Executes the experiment described by cfg (see the CLI for the flag-to-key
// mapping), writing <outdir>/<experiment>.csv (or .json/.txt) plus
// <outdir>/manifest.json.  Output bytes depend only on cfg, never on jobs.
RunResult run_experiment(const nlohmann::json& cfg, const std::string& outdir, int jobs);

// Re-executes a prior run from its manifest into a scratch directory and
// compares output hashes.  Returns 0 if byte-identical, 2 if not, throws on
// execution errors.
int replay_manifest(const std::string& manifest_path, int jobs, std::string* report);

} // namespace netlab
