#include <doctest.h>

#include <algorithm>

#include "netlab/rbp.hpp"

using namespace netlab;

namespace {

RngField random_net(std::uint64_t seed, double eps, std::int64_t U,
                    std::int64_t half_width = 64) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.kernel = kernel_preset("lazy");
    cfg.epsilon = eps;
    cfg.window = {-half_width, half_width, 0, U};
    cfg.mode = Mode::net;
    return RngField(cfg);
}

} // namespace

TEST_SUITE("rbp") {

TEST_CASE("hand-built field with a unique relevant branching point") {
    TableField f(kernel_preset("lazy"), Mode::net); // default arrow -1
    // Hold the walker still, branch at (0, 1), keep the branches apart.
    f.set_pair(0, 0, 0, 0);
    f.set_pair(0, 1, -1, 1);
    f.set_pair(-1, 2, 0, 0);
    f.set_pair(1, 2, 0, 0);
    auto rbps = find_rbps(f, {0}, 0, 3);
    REQUIRE(rbps.size() == 1);
    CHECK(rbps[0] == Rbp{0, 1});
    CHECK(find_rbps_bruteforce(f, {0}, 0, 3) == rbps);
}

TEST_CASE("re-coalescing branches are not relevant") {
    TableField f(kernel_preset("lazy"), Mode::net);
    f.set_pair(0, 0, 0, 0);
    f.set_pair(0, 1, -1, 1);
    f.set_pair(-1, 2, 1, 1); // both branches meet again at (0, 3)
    f.set_pair(1, 2, -1, -1);
    CHECK(find_rbps(f, {0}, 0, 3).empty());
    CHECK(find_rbps_bruteforce(f, {0}, 0, 3).empty());
    // With a shorter horizon the meeting never happens: relevant again.
    CHECK(find_rbps(f, {0}, 0, 2) == std::vector<Rbp>{{0, 1}});
}

TEST_CASE("branching exactly at the start time is excluded") {
    TableField f(kernel_preset("lazy"), Mode::net);
    f.set_pair(0, 0, -1, 1); // t = S: not inside (S, U)
    f.set_pair(-1, 1, 0, 0);
    f.set_pair(1, 1, 0, 0);
    CHECK(find_rbps(f, {0}, 0, 2).empty());
    CHECK(find_rbps_bruteforce(f, {0}, 0, 2).empty());
}

TEST_CASE("pair sweep matches the brute-force definition on random fields") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        RngField f = random_net(seed, 0.3, 6, 32);
        auto fast = find_rbps(f, {0, 1}, 0, 6);
        auto slow = find_rbps_bruteforce(f, {0, 1}, 0, 6);
        CHECK(fast == slow);
    }
}

TEST_CASE("no branching means no relevant branching points") {
    RngField f = random_net(9, 0.0, 8);
    CHECK(find_rbps(f, {0}, 0, 8).empty());
    auto g = build_graph(f, {0}, 0, 8);
    // Pure web: one initial vertex, one terminal, a single edge.
    REQUIRE(g.vertices.size() == 2);
    CHECK(g.vertices[0].kind == RbpGraph::Kind::initial);
    CHECK(g.vertices[1].kind == RbpGraph::Kind::terminal);
    CHECK(g.edges.size() == 1);
}

TEST_CASE("graph structure on random realizations") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RngField f = random_net(seed, 0.25, 8);
        auto g = build_graph(f, {0}, 0, 8);
        auto rbps = find_rbps(f, {0}, 0, 8);
        std::size_t n_rbp = 0, n_term = 0;
        for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
            const auto& vx = g.vertices[static_cast<std::size_t>(v)];
            switch (vx.kind) {
                case RbpGraph::Kind::initial:
                    CHECK(vx.t == 0);
                    CHECK((g.out_degree(v) == 1 || g.out_degree(v) == 2));
                    break;
                case RbpGraph::Kind::rbp: {
                    ++n_rbp;
                    CHECK(g.out_degree(v) == 2);
                    CHECK(std::find(rbps.begin(), rbps.end(), Rbp{vx.x, vx.t}) != rbps.end());
                    break;
                }
                case RbpGraph::Kind::terminal:
                    ++n_term;
                    CHECK(vx.t == 8);
                    CHECK(g.out_degree(v) == 0);
                    break;
            }
        }
        CHECK(n_rbp == rbps.size());
        CHECK(n_term >= 1);
        for (auto [a, b] : g.edges) {
            CHECK(g.vertices[static_cast<std::size_t>(a)].t <
                  g.vertices[static_cast<std::size_t>(b)].t);
        }
    }
}

TEST_CASE("rbp tail counting identity and basic shape") {
    auto res = rbp_tail(kernel_preset("lazy"), 0.1, {4, 16}, 2, 3000, 17, 1);
    CHECK(res.identity_violations == 0);
    REQUIRE(res.rows.size() == 4);
    for (const auto& r : res.rows) {
        CHECK(r.p_hat >= 0.0);
        CHECK(r.p_hat <= 1.0);
        CHECK(r.replicas == 3000);
    }
    // P(R >= 2) <= P(R >= 1) at each T.
    CHECK(res.rows[1].p_hat <= res.rows[0].p_hat);
    CHECK(res.rows[3].p_hat <= res.rows[2].p_hat);
}

TEST_CASE("degenerate interval is rejected") {
    RngField f = random_net(1, 0.2, 4);
    CHECK_THROWS_AS(find_rbps(f, {0}, 3, 3), Error);
}

} // TEST_SUITE
