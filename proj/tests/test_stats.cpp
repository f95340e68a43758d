#include <doctest.h>

#include <cmath>

#include "netlab/stats.hpp"

using namespace netlab;

TEST_SUITE("stats") {

TEST_CASE("mean and standard error") {
    std::vector<double> xs{1.0, 2.0, 3.0};
    auto m = mean_se(xs);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.se == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12)); // sample sd 1
    CHECK(m.n == 3);
    CHECK(mean_se({}).n == 0);
}

TEST_CASE("bootstrap se tracks the replica-level se") {
    std::vector<double> xs;
    SiteStream rng(42);
    for (int i = 0; i < 400; ++i) xs.push_back(rng.next_unit());
    double b = bootstrap_se(xs, 2000);
    double a = mean_se(xs).se;
    CHECK(b == doctest::Approx(a).epsilon(0.15));
}

TEST_CASE("distribution helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-1.0) == doctest::Approx(1.0 - normal_cdf(1.0)).epsilon(1e-14));
    CHECK(chi_square_pvalue(3.841458821, 1) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chi_square_pvalue(0.0, 4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ks_pvalue(0.5, 1000) < 1e-12);
    CHECK(ks_pvalue(0.005, 1000) > 0.99);
}

TEST_CASE("power-law fit recovers exact exponents") {
    std::vector<double> xs{64, 256, 1024, 4096}, ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -0.5));
    auto fit = fit_power(xs, ys);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.slope_se == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("brownian net density oracle") {
    // e^{-t}/sqrt(pi t) + 2 Phi(sqrt(2 t)) at t = 1.
    CHECK(brownian_net_density(1.0) == doctest::Approx(2.050254).epsilon(1e-5));
    CHECK(brownian_net_density(0.25) > brownian_net_density(1.0));
    CHECK(brownian_net_density(1.0) > brownian_net_density(4.0));
    CHECK(brownian_net_density(50.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("scaling map round trips") {
    ScalingMap sc{0.05, std::sqrt(0.5)};
    CHECK(sc.space(40) == doctest::Approx(2.0).epsilon(1e-15));
    for (std::int64_t t : {1, 7, 800, 12345})
        CHECK(sc.lattice_time(sc.time(t)) == t);
    CHECK(sc.time(sc.lattice_time(1.0)) <= 1.0 + 1e-12);
}

TEST_CASE("counting eta on explicit paths") {
    ScalingMap sc{0.5, 1.0};
    // Lattice paths; rescaled time t = 0.25 * lattice time, space halved.
    std::vector<LatticePath> paths{
        {0, {0, 2, 2, 2, 2}}, // from x = 0
        {0, {4, 2, 2, 2, 2}}, // coalesces with the first at lattice time 1
        {0, {8, 10, 10, 10, 10}},
        {4, {100}},           // starts after the cut, must be ignored
    };
    // t = 0, h = 0.25: positions at lattice time 1 within (a, b) = (-1, 3):
    // {1, 1, 5} rescaled -> distinct values {1} inside the window.
    CHECK(counting_eta(paths, 0.0, 0.25, -1.0, 3.0, sc) == 1);
    CHECK(counting_eta(paths, 0.0, 0.25, -1.0, 6.0, sc) == 2);
    CHECK(counting_eta(paths, 0.0, 0.25, 5.5, 6.0, sc) == 0);
}

} // TEST_SUITE
