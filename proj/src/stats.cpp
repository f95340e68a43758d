#include "netlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "netlab/rng.hpp"

namespace netlab {

MeanSE mean_se(std::span<const double> xs) {
    MeanSE r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1.0)));
    return r;
}

double bootstrap_se(std::span<const double> xs, int resamples, std::uint64_t seed) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    SiteStream rng(seed);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += xs[static_cast<std::size_t>(rng.next_u64() % n)];
        means.push_back(s / static_cast<double>(n));
    }
    auto ms = mean_se(means);
    double ss = 0.0;
    for (double m : means) ss += (m - ms.mean) * (m - ms.mean);
    return std::sqrt(ss / (static_cast<double>(means.size()) - 1.0));
}

namespace {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error(ErrorCode::degenerate_input, "gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a, x) by series, Q = 1 - P.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Q(a, x) by Lentz continued fraction.
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

} // namespace

double chi_square_pvalue(double statistic, int df) {
    if (df < 1) throw Error(ErrorCode::degenerate_input, "chi_square_pvalue: df < 1");
    return gamma_q(0.5 * df, 0.5 * statistic);
}

double ks_pvalue(double d, std::size_t n) {
    double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

PowerFit fit_power(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw Error(ErrorCode::degenerate_input, "fit_power: need >= 3 paired points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw Error(ErrorCode::degenerate_input, "fit_power: data must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::degenerate_input, "fit_power: degenerate x values");
    PowerFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ly[i] - (f.intercept + f.slope * lx[i]);
        ss_res += r * r;
    }
    f.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    if (n > 2) f.slope_se = std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    return f;
}

double brownian_net_density(double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::non_positive_time, "brownian_net_density: t <= 0");
    return std::exp(-t) / std::sqrt(M_PI * t) + 2.0 * normal_cdf(std::sqrt(2.0 * t));
}

std::int64_t counting_eta(const std::vector<LatticePath>& paths, double t, double h, double a,
                          double b, const ScalingMap& scaling) {
    if (!(a < b)) throw Error(ErrorCode::degenerate_input, "counting_eta: need a < b");
    const std::int64_t lt = scaling.lattice_time(t + h);
    std::vector<std::int64_t> hits;
    for (const auto& p : paths) {
        if (scaling.time(p.start_time) > t) continue;
        if (!p.defined_at(lt)) continue;
        double y = scaling.space(p.at(lt));
        if (y > a && y < b) hits.push_back(p.at(lt));
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return static_cast<std::int64_t>(hits.size());
}

} // namespace netlab
