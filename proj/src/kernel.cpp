#include "netlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace netlab {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kMeanTol = 1e-12;

} // namespace

IncrementKernel IncrementKernel::build(std::vector<KernelEntry> entries, double gamma,
                                       bool require_aperiodic) {
    if (entries.empty())
        throw Error(ErrorCode::degenerate_input, "kernel: empty support");
    if (gamma <= 3.0)
        throw Error(ErrorCode::degenerate_input, "kernel: moment order gamma must exceed 3");

    std::sort(entries.begin(), entries.end(),
              [](const KernelEntry& a, const KernelEntry& b) { return a.dx < b.dx; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].p <= 0.0)
            throw Error(ErrorCode::degenerate_input, "kernel: probabilities must be positive");
        if (i > 0 && entries[i].dx == entries[i - 1].dx)
            throw Error(ErrorCode::degenerate_input, "kernel: duplicate displacement");
    }

    double sum = 0.0, mean = 0.0, sigma2 = 0.0, m_gamma = 0.0;
    for (const auto& e : entries) {
        sum += e.p;
        mean += e.dx * e.p;
        sigma2 += double(e.dx) * e.dx * e.p;
        m_gamma += std::pow(std::abs(double(e.dx)), gamma) * e.p;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw Error(ErrorCode::not_normalized, "kernel: probabilities sum to " + std::to_string(sum));
    if (std::abs(mean) > kMeanTol)
        throw Error(ErrorCode::non_zero_mean, "kernel: mean is " + std::to_string(mean));

    // gcd of support differences decides both irreducibility and
    // aperiodicity of the walk on Z (period = gcd of return-cycle lengths).
    std::int64_t g = 0;
    for (std::size_t i = 1; i < entries.size(); ++i)
        g = std::gcd(g, std::int64_t(entries[i].dx) - entries[i - 1].dx);
    // Retain the reachable-sublattice spacing for derived (possibly
    // periodic) kernels: gcd of the nonzero support.
    std::int64_t lat = 0;
    for (const auto& e : entries)
        if (e.dx != 0) lat = std::gcd(lat, std::int64_t(std::abs(e.dx)));
    if (lat == 0) lat = 1;

    if (require_aperiodic && g != 1)
        throw Error(ErrorCode::periodic_or_reducible,
                    "kernel: support difference gcd is " + std::to_string(g) +
                        "; walk is periodic or reducible");

    IncrementKernel k;
    k.entries_ = std::move(entries);
    k.gamma_ = gamma;
    k.sigma2_ = sigma2;
    k.m_gamma_ = m_gamma;
    k.max_jump_ = 0;
    for (const auto& e : k.entries_)
        k.max_jump_ = std::max(k.max_jump_, std::abs(e.dx));
    k.lattice_gcd_ = static_cast<std::int32_t>(lat);
    return k;
}

IncrementKernel IncrementKernel::validate(std::vector<KernelEntry> entries, double gamma) {
    return build(std::move(entries), gamma, true);
}

IncrementKernel IncrementKernel::validate_on_sublattice(std::vector<KernelEntry> entries,
                                                        double gamma) {
    return build(std::move(entries), gamma, false);
}

double IncrementKernel::prob(std::int32_t dx) const {
    int i = index_of(dx);
    return i < 0 ? 0.0 : entries_[static_cast<std::size_t>(i)].p;
}

int IncrementKernel::index_of(std::int32_t dx) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), dx,
                               [](const KernelEntry& e, std::int32_t v) { return e.dx < v; });
    if (it == entries_.end() || it->dx != dx) return -1;
    return static_cast<int>(it - entries_.begin());
}

double solve_branching_rate(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw Error(ErrorCode::degenerate_input, "solve_branching_rate: epsilon must be in (0,1)");
    // f(r) = 1 - r/expm1(r) increases from 0 to 1 on (0, inf).
    auto f = [](double r) { return 1.0 - r / std::expm1(r); };
    double lo = 1e-300, hi = 1.0;
    while (f(hi) < epsilon) {
        hi *= 2.0;
        if (hi > 1e8)
            throw Error(ErrorCode::no_convergence, "solve_branching_rate: bracket blew up");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < epsilon)
            lo = mid;
        else
            hi = mid;
    }
    double r = 0.5 * (lo + hi);
    if (std::abs(f(r) - epsilon) > 1e-12)
        throw Error(ErrorCode::no_convergence, "solve_branching_rate: residual above tolerance");
    return r;
}

BernoulliKernel bernoulli_kernel(const IncrementKernel& a, double epsilon) {
    BernoulliKernel bk;
    bk.base = a;
    bk.epsilon = epsilon;
    bk.r = solve_branching_rate(epsilon);
    bk.psi.reserve(a.size());
    for (const auto& e : a.entries())
        bk.psi.push_back(-std::expm1(-bk.r * e.p));
    bk.rho = -std::expm1(-bk.r);
    return bk;
}

IncrementKernel difference_kernel(const IncrementKernel& a) {
    const auto& es = a.entries();
    std::int32_t span = 2 * a.max_jump();
    std::vector<double> mass(static_cast<std::size_t>(2 * span + 1), 0.0);
    for (const auto& e1 : es)
        for (const auto& e2 : es)
            mass[static_cast<std::size_t>(e1.dx - e2.dx + span)] += e1.p * e2.p;
    std::vector<KernelEntry> out;
    for (std::int32_t y = -span; y <= span; ++y) {
        double p = mass[static_cast<std::size_t>(y + span)];
        if (p > 0.0) out.push_back({y, p});
    }
    return IncrementKernel::validate_on_sublattice(std::move(out), a.gamma());
}

namespace {

// Shared sweep: iterates mu_s = Pbar^s(0, .) on a window and accumulates
// Abar_t(x) = sum_s [mu_s(0) - mu_s(x)] for all |x| <= x_max.  Returns the
// accumulator (indexed x + x_max) plus horizon snapshots for one probe site.
struct SweepResult {
    std::vector<double> accum;
    std::vector<std::pair<std::int64_t, double>> partials;
};

SweepResult potential_sweep(const IncrementKernel& pbar, std::int32_t x_max, std::int64_t t_max,
                            std::int64_t probe_x) {
    if (t_max < 4) throw Error(ErrorCode::degenerate_input, "potential_kernel: t_max too small");
    const std::int32_t jump = pbar.max_jump();
    // Diffusive window: mass beyond ~10 standard deviations is far below the
    // 1e-12 leak budget; never wider than the light cone.
    std::int64_t radius = x_max + jump +
                          static_cast<std::int64_t>(std::ceil(10.0 * std::sqrt(pbar.sigma2() * double(t_max)))) ;
    radius = std::min<std::int64_t>(radius, std::int64_t(jump) * t_max + x_max + 1);
    const std::int64_t w = 2 * radius + 1;

    std::vector<double> mu(static_cast<std::size_t>(w), 0.0), nxt(static_cast<std::size_t>(w), 0.0);
    mu[static_cast<std::size_t>(radius)] = 1.0;
    std::vector<double> accum(static_cast<std::size_t>(2 * x_max + 1), 0.0);

    // Geometric snapshot horizons t_max, t_max/2, t_max/4, ... (>= 4 of them).
    std::vector<std::int64_t> horizons;
    for (std::int64_t h = t_max; h >= 4 && horizons.size() < 8; h /= 2) horizons.push_back(h);
    std::sort(horizons.begin(), horizons.end());

    SweepResult res;
    auto record = [&](std::int64_t t) {
        res.partials.emplace_back(t, accum[static_cast<std::size_t>(probe_x + x_max)]);
    };

    double leaked = 0.0;
    std::size_t next_h = 0;
    for (std::int64_t s = 0;; ++s) {
        const double p00 = mu[static_cast<std::size_t>(radius)];
        for (std::int32_t x = -x_max; x <= x_max; ++x)
            accum[static_cast<std::size_t>(x + x_max)] +=
                p00 - mu[static_cast<std::size_t>(x + radius)];
        while (next_h < horizons.size() && s == horizons[next_h]) {
            record(s);
            ++next_h;
        }
        if (s == t_max) break;

        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::int64_t i = 0; i < w; ++i) {
            const double m = mu[static_cast<std::size_t>(i)];
            if (m == 0.0) continue;
            for (const auto& e : pbar.entries()) {
                std::int64_t j = i + e.dx;
                if (j < 0 || j >= w)
                    leaked += m * e.p;
                else
                    nxt[static_cast<std::size_t>(j)] += m * e.p;
            }
        }
        if (leaked > 1e-12)
            throw Error(ErrorCode::window_too_small,
                        "potential_kernel: probability leak past the window");
        mu.swap(nxt);
    }
    res.accum = std::move(accum);
    return res;
}

// Removes the leading c/sqrt(t) tail from the last two geometric horizons.
double extrapolate_sqrt_tail(const std::vector<std::pair<std::int64_t, double>>& partials) {
    if (partials.size() < 2) return partials.back().second;
    const double a1 = partials[partials.size() - 2].second;
    const double a2 = partials.back().second;
    // A_t = A - c/sqrt(t), horizons t and 2t: A = A_{2t} + (A_{2t} - A_t) / (sqrt(2) - 1).
    return a2 + (a2 - a1) / (std::sqrt(2.0) - 1.0);
}

} // namespace

PotentialResult potential_kernel(const IncrementKernel& pbar, std::int64_t x, std::int64_t t_max) {
    const std::int32_t g = pbar.lattice_gcd();
    if (x % g != 0)
        throw Error(ErrorCode::unreachable_state,
                    "potential_kernel: site " + std::to_string(x) +
                        " off the reachable sublattice (spacing " + std::to_string(g) + ")");
    std::int32_t x_max = static_cast<std::int32_t>(std::abs(x));
    auto sweep = potential_sweep(pbar, std::max(x_max, 1), t_max, x);
    PotentialResult r;
    r.partials = sweep.partials;
    r.at_t_max = sweep.partials.back().second;
    r.limit = extrapolate_sqrt_tail(sweep.partials);
    return r;
}

std::vector<double> potential_kernel_table(const IncrementKernel& pbar, std::int32_t x_max,
                                           std::int64_t t_max) {
    auto full = potential_sweep(pbar, x_max, t_max, 0);
    auto half = potential_sweep(pbar, x_max, t_max / 2, 0);
    const std::int32_t g = pbar.lattice_gcd();
    std::vector<double> out(static_cast<std::size_t>(2 * x_max + 1),
                            std::numeric_limits<double>::quiet_NaN());
    for (std::int32_t x = -x_max; x <= x_max; ++x) {
        if (x % g != 0) continue;
        const double a1 = half.accum[static_cast<std::size_t>(x + x_max)];
        const double a2 = full.accum[static_cast<std::size_t>(x + x_max)];
        out[static_cast<std::size_t>(x + x_max)] = a2 + (a2 - a1) / (std::sqrt(2.0) - 1.0);
    }
    return out;
}

IncrementKernel kernel_preset(const std::string& name) {
    if (name == "simple") // simple random walk: period 2, allowed as a preset
        return IncrementKernel::validate_on_sublattice({{-1, 0.5}, {1, 0.5}}, 4.0);
    if (name == "lazy")
        return IncrementKernel::validate({{-1, 0.25}, {0, 0.5}, {1, 0.25}}, 4.0);
    if (name.rfind("geom(", 0) == 0 && name.back() == ')') {
        double p = std::atof(name.substr(5, name.size() - 6).c_str());
        if (!(p > 0.0 && p < 1.0))
            throw Error(ErrorCode::bad_config, "geom(p): p must be in (0,1)");
        // Symmetric geometric tails plus an atom at 0, truncated where the
        // remaining tail mass drops below 1e-12; symmetric cut keeps the
        // mean exactly zero, then renormalize.
        std::vector<KernelEntry> es;
        std::vector<double> tail;
        double total = 1.0; // weight of dx = 0 before normalization
        int K = 1;
        for (double w = p;; w *= p, ++K) {
            tail.push_back(w);
            total += 2 * w;
            if (2 * w * p / (1 - p) < 1e-12 * total) break;
        }
        es.push_back({0, 1.0 / total});
        for (int k = 1; k <= K; ++k) {
            es.push_back({k, tail[static_cast<std::size_t>(k - 1)] / total});
            es.push_back({-k, tail[static_cast<std::size_t>(k - 1)] / total});
        }
        // Absorb any rounding slack into the atom at 0.
        double sum = 0.0;
        for (const auto& e : es) sum += e.p;
        es[0].p += 1.0 - sum;
        return IncrementKernel::validate(std::move(es), 4.0);
    }
    throw Error(ErrorCode::bad_config, "unknown kernel preset: " + name);
}

IncrementKernel parse_kernel_text(const std::string& text) {
    std::vector<KernelEntry> es;
    std::istringstream in(text);
    std::string line;
    double gamma = 4.0;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "gamma") {
            ls >> gamma;
            continue;
        }
        KernelEntry e;
        e.dx = std::atoi(first.c_str());
        if (!(ls >> e.p))
            throw Error(ErrorCode::bad_config, "kernel file: bad line: " + line);
        es.push_back(e);
    }
    return IncrementKernel::validate(std::move(es), gamma);
}

IncrementKernel parse_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::bad_config, "cannot open kernel file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_kernel_text(ss.str());
}

IncrementKernel resolve_kernel(const std::string& spec) {
    if (spec == "simple" || spec == "lazy" || spec.rfind("geom(", 0) == 0)
        return kernel_preset(spec);
    return parse_kernel_file(spec);
}

} // namespace netlab
