#pragma once

#include <cstdint>
#include <vector>

#include "netlab/field.hpp"
#include "netlab/pointset.hpp"

namespace netlab {

// An (S, U)-relevant branching point: a branching site reachable from the
// initial set through which two trajectories pass that stay site-disjoint on
// (t, U].
struct Rbp {
    std::int64_t x = 0;
    std::int64_t t = 0;
    friend bool operator==(const Rbp&, const Rbp&) = default;
    friend auto operator<=>(const Rbp&, const Rbp&) = default;
};

// Pair-reachability detection: for each branching site on the reachable
// cloud, evolve the set of ordered disjoint position pairs seeded by the two
// branches; the site qualifies iff the pair set survives to U.
std::vector<Rbp> find_rbps(const ArrowField& field, const Sites& A, std::int64_t S,
                           std::int64_t U, std::size_t pair_cap = 1'000'000);

struct RbpGraph {
    enum class Kind { initial, rbp, terminal };
    struct Vertex {
        std::int64_t x = 0;
        std::int64_t t = 0;
        Kind kind = Kind::initial;
        friend bool operator==(const Vertex&, const Vertex&) = default;
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<int, int>> edges; // vertex indices, deduplicated

    int out_degree(int v) const {
        int d = 0;
        for (const auto& e : edges) d += e.first == v;
        return d;
    }
};

// Finite graph representation G_{S,U}: initial sites, RBPs, terminal sites;
// an edge z1 -> z2 iff some trajectory runs z1 to z2 without visiting an RBP
// strictly between.
RbpGraph build_graph(const ArrowField& field, const Sites& A, std::int64_t S, std::int64_t U,
                     std::size_t pair_cap = 1'000'000);

// Brute-force oracle: enumerates every path pair from A and applies the
// defining disjointness condition directly.  Exponential; test scale only.
std::vector<Rbp> find_rbps_bruteforce(const ArrowField& field, const Sites& A, std::int64_t S,
                                      std::int64_t U, std::size_t path_cap = 4096);

struct RbpTailRow {
    double epsilon = 0.0;
    std::int64_t T = 0;
    int K = 0;
    double p_hat = 0.0;
    double se = 0.0;
    std::size_t replicas = 0;
};

struct RbpTailResult {
    std::vector<RbpTailRow> rows;
    std::size_t identity_violations = 0; // pathwise {R_T >= 1} != {|xi_T| >= 2}
};

// Monte-Carlo table of P(R_T >= K), K = 1..K_max, for the net from a single
// site, plus the pathwise identity check against {|xi_T| >= 2}.
RbpTailResult rbp_tail(const IncrementKernel& kernel, double epsilon,
                       const std::vector<std::int64_t>& T_list, int K_max, std::size_t replicas,
                       std::uint64_t seed, int jobs);

} // namespace netlab
