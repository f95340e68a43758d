#include "netlab/rbp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "netlab/netsim.hpp"
#include "netlab/parallel.hpp"

namespace netlab {

namespace {

using Pair = std::pair<std::int64_t, std::int64_t>;

// Levels xi_S .. xi_U of the reachable cloud.
std::vector<Sites> reachable_levels(const ArrowField& field, const Sites& A, std::int64_t S,
                                    std::int64_t U) {
    std::vector<Sites> xi;
    xi.reserve(static_cast<std::size_t>(U - S) + 1);
    xi.push_back(A);
    for (std::int64_t s = S; s < U; ++s) xi.push_back(step_forward(field, xi.back(), s));
    return xi;
}

// P_s for s = S..U: ordered pairs of distinct reachable positions from which
// two trajectories can stay site-disjoint through time U.  One backward
// sweep serves every branching site at once; seeding the spec's forward
// pair evolution at (x + w1, x + w2) reaches U nonempty iff that seed pair
// is in P_{t+1}.
std::vector<std::vector<Pair>> disjoint_pair_levels(const ArrowField& field,
                                                    const std::vector<Sites>& xi, std::int64_t S,
                                                    std::int64_t U, std::size_t pair_cap) {
    const std::size_t n = xi.size();
    std::vector<std::vector<Pair>> P(n);
    std::int32_t buf_a[64], buf_b[64];
    for (std::size_t lev = n; lev-- > 0;) {
        const Sites& sites = xi[lev];
        if (sites.size() * sites.size() > pair_cap)
            throw Error(ErrorCode::explosion_cap, "find_rbps: pair set exceeds cap");
        const std::int64_t s = S + static_cast<std::int64_t>(lev);
        auto& out = P[lev];
        for (std::int64_t a : sites) {
            for (std::int64_t b : sites) {
                if (a == b) continue;
                if (s == U) {
                    out.emplace_back(a, b);
                    continue;
                }
                const auto& nextP = P[lev + 1];
                int na = field.arrows_at(a, s, ArrowUse::net, buf_a);
                int nb = field.arrows_at(b, s, ArrowUse::net, buf_b);
                bool ok = false;
                for (int i = 0; i < na && !ok; ++i)
                    for (int j = 0; j < nb && !ok; ++j)
                        ok = std::binary_search(nextP.begin(), nextP.end(),
                                                Pair{a + buf_a[i], b + buf_b[j]});
                if (ok) out.emplace_back(a, b);
            }
        }
        // Pairs were generated in lexicographic order already.
    }
    return P;
}

std::vector<Rbp> rbps_from_levels(const ArrowField& field, const std::vector<Sites>& xi,
                                  const std::vector<std::vector<Pair>>& P, std::int64_t S,
                                  std::int64_t U) {
    std::vector<Rbp> out;
    for (std::int64_t t = S + 1; t < U; ++t) {
        const auto& sites = xi[static_cast<std::size_t>(t - S)];
        const auto& nextP = P[static_cast<std::size_t>(t + 1 - S)];
        for (std::int64_t x : sites) {
            ArrowSet a = field.at(x, t);
            if (!a.branching()) continue;
            if (std::binary_search(nextP.begin(), nextP.end(), Pair{x + a.w1, x + a.w2}))
                out.push_back({x, t});
        }
    }
    return out;
}

} // namespace

std::vector<Rbp> find_rbps(const ArrowField& field, const Sites& A, std::int64_t S,
                           std::int64_t U, std::size_t pair_cap) {
    if (U <= S) throw Error(ErrorCode::bad_config, "find_rbps: need S < U");
    auto xi = reachable_levels(field, A, S, U);
    auto P = disjoint_pair_levels(field, xi, S, U, pair_cap);
    auto rbps = rbps_from_levels(field, xi, P, S, U);
    std::sort(rbps.begin(), rbps.end()); // canonical set order
    return rbps;
}

std::vector<Rbp> find_rbps_bruteforce(const ArrowField& field, const Sites& A, std::int64_t S,
                                      std::int64_t U, std::size_t path_cap) {
    std::set<Rbp> found;
    for (std::int64_t a : A) {
        auto paths = enumerate_net_paths(field, a, S, U, ArrowUse::net, path_cap);
        for (std::size_t i = 0; i < paths.size(); ++i) {
            for (std::size_t j = i + 1; j < paths.size(); ++j) {
                const auto& p1 = paths[i];
                const auto& p2 = paths[j];
                std::int64_t split = -1;
                for (std::int64_t s = S; s <= U; ++s) {
                    if (p1.at(s) != p2.at(s)) {
                        split = s;
                        break;
                    }
                }
                if (split <= S) continue; // identical, or never together
                bool disjoint = true;
                for (std::int64_t s = split; s <= U; ++s)
                    if (p1.at(s) == p2.at(s)) {
                        disjoint = false;
                        break;
                    }
                const std::int64_t t = split - 1;
                if (disjoint && t > S && t < U) found.insert({p1.at(t), t});
            }
        }
    }
    return {found.begin(), found.end()};
}

RbpGraph build_graph(const ArrowField& field, const Sites& A, std::int64_t S, std::int64_t U,
                     std::size_t pair_cap) {
    auto xi = reachable_levels(field, A, S, U);
    auto P = disjoint_pair_levels(field, xi, S, U, pair_cap);
    auto rbps = rbps_from_levels(field, xi, P, S, U);

    RbpGraph g;
    std::map<std::pair<std::int64_t, std::int64_t>, int> index;
    auto add_vertex = [&](std::int64_t x, std::int64_t t, RbpGraph::Kind k) {
        index[{x, t}] = static_cast<int>(g.vertices.size());
        g.vertices.push_back({x, t, k});
    };
    for (std::int64_t x : xi.front()) add_vertex(x, S, RbpGraph::Kind::initial);
    for (const auto& r : rbps) add_vertex(r.x, r.t, RbpGraph::Kind::rbp);
    for (std::int64_t x : xi.back()) add_vertex(x, U, RbpGraph::Kind::terminal);

    std::set<Rbp> rbp_set(rbps.begin(), rbps.end());
    std::set<std::pair<int, int>> edges;
    std::int32_t buf[64];

    // Forward sweep from (start set at time t0), attributing edges to src;
    // expansion stops at RBP vertices and at the terminal time.
    auto sweep = [&](int src, Sites frontier, std::int64_t t0) {
        for (std::int64_t s = t0; s <= U && !frontier.empty(); ++s) {
            Sites expand;
            for (std::int64_t y : frontier) {
                if (s == U) {
                    edges.insert({src, index.at({y, U})});
                } else if (rbp_set.count({y, s})) {
                    edges.insert({src, index.at({y, s})});
                } else {
                    expand.push_back(y);
                }
            }
            if (s == U) break;
            Sites next;
            for (std::int64_t y : expand) {
                int n = field.arrows_at(y, s, ArrowUse::net, buf);
                for (int i = 0; i < n; ++i) next.push_back(y + buf[i]);
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            frontier = std::move(next);
        }
    };

    for (std::int64_t x : xi.front()) sweep(index.at({x, S}), {x}, S);
    for (const auto& r : rbps) {
        ArrowSet a = field.at(r.x, r.t);
        int src = index.at({r.x, r.t});
        sweep(src, {r.x + a.w1}, r.t + 1);
        sweep(src, {r.x + a.w2}, r.t + 1);
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

RbpTailResult rbp_tail(const IncrementKernel& kernel, double epsilon,
                       const std::vector<std::int64_t>& T_list, int K_max, std::size_t replicas,
                       std::uint64_t seed, int jobs) {
    if (T_list.empty()) throw Error(ErrorCode::bad_config, "rbp_tail: empty T list");
    const std::int64_t T_max = *std::max_element(T_list.begin(), T_list.end());
    const std::int64_t margin = std::int64_t(kernel.max_jump()) * T_max + 1;

    struct Rep {
        std::vector<std::int64_t> counts; // R_T per T
        std::vector<bool> big;            // |xi_T| >= 2 per T
    };
    auto one = [&](std::size_t rep) {
        SimConfig cfg;
        cfg.seed = seed + rep;
        cfg.kernel = kernel;
        cfg.epsilon = epsilon;
        cfg.mode = Mode::net;
        cfg.window = {-margin, margin, 0, T_max};
        RngField field(cfg);
        Rep r;
        auto xi = reachable_levels(field, {0}, 0, T_max);
        for (std::int64_t T : T_list) {
            std::vector<Sites> levels(xi.begin(), xi.begin() + T + 1);
            auto P = disjoint_pair_levels(field, levels, 0, T, 1'000'000);
            auto rbps = rbps_from_levels(field, levels, P, 0, T);
            std::int64_t count = static_cast<std::int64_t>(rbps.size());
            // A split at the start time that stays disjoint counts as
            // relevant here; otherwise {R_T >= 1} and {|xi_T| >= 2} would
            // differ on realizations whose only effective branching is at
            // the initial site.
            for (std::int64_t x : levels.front()) {
                ArrowSet a = field.at(x, 0);
                if (a.branching() &&
                    std::binary_search(P[1].begin(), P[1].end(), Pair{x + a.w1, x + a.w2}))
                    ++count;
            }
            r.counts.push_back(count);
            r.big.push_back(levels[static_cast<std::size_t>(T)].size() >= 2);
        }
        return r;
    };
    auto reps = run_replicas<Rep>(replicas, jobs, one);

    RbpTailResult res;
    for (std::size_t ti = 0; ti < T_list.size(); ++ti) {
        for (int K = 1; K <= K_max; ++K) {
            std::size_t hits = 0;
            for (const auto& r : reps) hits += r.counts[ti] >= K;
            RbpTailRow row;
            row.epsilon = epsilon;
            row.T = T_list[ti];
            row.K = K;
            row.replicas = replicas;
            row.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
            row.se = std::sqrt(row.p_hat * (1.0 - row.p_hat) / static_cast<double>(replicas));
            res.rows.push_back(row);
        }
        for (const auto& r : reps)
            if ((r.counts[ti] >= 1) != r.big[ti]) ++res.identity_violations;
    }
    return res;
}

} // namespace netlab
