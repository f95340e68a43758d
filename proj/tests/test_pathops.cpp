#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "netlab/netsim.hpp"
#include "netlab/pathops.hpp"
#include "netlab/stats.hpp"

using namespace netlab;

namespace {

RngField make_field(Mode mode, double eps, std::uint64_t seed, std::int64_t half_width,
                    std::int64_t horizon) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.kernel = kernel_preset("lazy");
    cfg.epsilon = eps;
    cfg.window = {-half_width, half_width, 0, horizon};
    cfg.mode = mode;
    return RngField(cfg);
}

} // namespace

TEST_SUITE("pathops") {

TEST_CASE("potential table agrees with direct evaluation and the asymptote") {
    auto pbar = difference_kernel(kernel_preset("lazy"));
    PotentialTable tab(pbar, 64, 1 << 14, 0.5);
    for (std::int64_t x : {0, 1, 5, 40}) {
        auto direct = potential_kernel(pbar, x, 1 << 14);
        CHECK(tab.at(x) == doctest::Approx(direct.limit).epsilon(1e-10));
        CHECK(tab.at(-x) == doctest::Approx(tab.at(x)).epsilon(1e-12));
    }
    // Beyond the table: asymptote with slope gcd / (2 sigma^2) = 1.
    CHECK(tab.at(100) - tab.at(-100) == doctest::Approx(0.0));
    CHECK(tab.at(200) - tab.at(100) == doctest::Approx(100.0).epsilon(1e-6));
    // Edge continuity is limited by the truncation-tail extrapolation, which
    // degrades as |x| approaches the table boundary; allow a coarse band.
    CHECK(tab.at(65) - tab.at(64) == doctest::Approx(1.0).epsilon(0.5));

    auto pbar2 = difference_kernel(kernel_preset("simple"));
    PotentialTable tab2(pbar2, 64, 1 << 14, 1.0);
    CHECK(tab2.at(10) == doctest::Approx(10.0).epsilon(2e-3));
    CHECK_THROWS_AS(tab2.at(7), Error); // off the 2Z sublattice
}

TEST_CASE("sticky pair collapses to one walk at eps = 0") {
    RngField f = make_field(Mode::web, 0.0, 21, 600, 500);
    auto tr = sticky_pair(f, 0, 0, 500, 0.05);
    CHECK(tr.x1 == tr.x2);
    for (std::size_t n = 0; n < tr.coloc.size(); ++n)
        CHECK(tr.coloc[n] == static_cast<std::int64_t>(n + 1));
}

TEST_CASE("sticky pair trace bookkeeping") {
    RngField f = make_field(Mode::sticky_pair, 0.2, 5, 600, 200);
    auto tr = sticky_pair(f, 0, 4, 200, 0.2);
    REQUIRE(tr.x1.size() == 201);
    CHECK(tr.x1.front() == 0);
    CHECK(tr.x2.front() == 4);
    // coloc counts co-located times, nondecreasing, steps of one.
    for (std::size_t n = 1; n < tr.coloc.size(); ++n) {
        std::int64_t d = tr.coloc[n] - tr.coloc[n - 1];
        CHECK(d == (tr.x1[n] == tr.x2[n] ? 1 : 0));
    }
    // Residual formulas evaluated against their definitions at a few n.
    auto rp = residual_product(tr, 0.2);
    const double step = tr.sigma2 * 0.2 * 0.2;
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{150}}) {
        double zint = step * static_cast<double>(n > 0 ? tr.coloc[n - 1] : 0);
        CHECK(rp[n] == doctest::Approx(tr.y1(n) * tr.y2(n) - 0.8 * zint).epsilon(1e-12));
    }
}

TEST_CASE("product residual is mean-flat") {
    // E[X1(n) X2(n)] - (1 - eps) sigma^2 E[#co-located s < n] stays at
    // X1(0) X2(0); check the replica mean at the horizon.
    const double eps = 0.1;
    const std::size_t reps = 4000;
    const std::int64_t horizon = 300;
    std::vector<double> drift(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        RngField f = make_field(Mode::sticky_pair, eps, 1000 + r, 400, horizon);
        auto tr = sticky_pair(f, 0, 0, horizon, eps);
        auto rp = residual_product(tr, eps);
        drift[r] = rp.back() - rp.front();
    }
    auto m = mean_se(drift);
    CHECK(std::abs(m.mean) < 4.0 * m.se);
}

TEST_CASE("potential residual is mean-flat (unrescaled form)") {
    const double eps = 0.1;
    const std::size_t reps = 4000;
    const std::int64_t horizon = 300;
    auto pbar = difference_kernel(kernel_preset("lazy"));
    PotentialTable tab(pbar, 256, 1 << 13, 0.5);
    std::vector<double> drift(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        RngField f = make_field(Mode::sticky_pair, eps, 5000 + r, 400, horizon);
        auto tr = sticky_pair(f, 0, 0, horizon, eps);
        auto rp = residual_potential_unrescaled(tr, tab, eps);
        drift[r] = rp.back() - rp.front();
    }
    auto m = mean_se(drift);
    CHECK(std::abs(m.mean) < 4.0 * m.se);
}

TEST_CASE("rescaled walk marginal is near Gaussian") {
    const double eps = 0.05;
    const std::int64_t horizon = 1600;
    const std::size_t reps = 500;
    const double sd = std::sqrt(0.5 * eps * eps * static_cast<double>(horizon));
    std::vector<double> xs(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        RngField f = make_field(Mode::web, 0.0, 40000 + r, 1700, horizon);
        auto p = follow_path(f, 0, 0, horizon, Chooser::first());
        xs[r] = eps * static_cast<double>(p.positions.back()) / sd;
    }
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        double F = normal_cdf(xs[i]);
        double lo = static_cast<double>(i) / reps, hi = static_cast<double>(i + 1) / reps;
        d = std::max({d, std::abs(F - lo), std::abs(F - hi)});
    }
    CHECK(ks_pvalue(d, reps) > 1e-4);
}

TEST_CASE("hop closure on a hand-built crossing") {
    LatticePath p{0, {0, 0, 0}};
    LatticePath q{0, {1, 0, 1}};
    auto closed = hop_closure({p, q}, 2);
    std::set<LatticePath> want{p, q, {0, {0, 0, 1}}, {0, {1, 0, 0}}};
    CHECK(std::set<LatticePath>(closed.begin(), closed.end()) == want);
    // Late-starting path: hop allowed at its start time.
    LatticePath r{1, {0, -1}};
    auto closed2 = hop_closure({p, r}, 2);
    CHECK(std::set<LatticePath>(closed2.begin(), closed2.end()) ==
          std::set<LatticePath>{p, r, {0, {0, 0, -1}}});
}

TEST_CASE("hop closure is idempotent and monotone") {
    RngField f = make_field(Mode::net, 0.3, 77, 40, 6);
    std::vector<LatticePath> paths;
    for (std::int64_t x : {-2, 0, 1})
        for (auto c : {Chooser::first(), Chooser::second()})
            paths.push_back(follow_path(f, x, 0, 6, c));
    auto once = hop_closure(paths, 6);
    auto twice = hop_closure(once, 6);
    CHECK(once == twice);
    auto sorted_in = paths;
    std::sort(sorted_in.begin(), sorted_in.end());
    CHECK(std::includes(once.begin(), once.end(), sorted_in.begin(), sorted_in.end()));
    // Monotone: closure of a subset is contained in closure of the set.
    auto sub = hop_closure({paths[0], paths[1]}, 6);
    CHECK(std::includes(once.begin(), once.end(), sub.begin(), sub.end()));
    CHECK_THROWS_AS(hop_closure({LatticePath{0, {0, 0}}}, 5), Error);
}

} // TEST_SUITE
