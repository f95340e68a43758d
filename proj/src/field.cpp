#include "netlab/field.hpp"

#include <cmath>

namespace netlab {

namespace {
// Stream tags separate the arrow-pair family from the Poisson-coupled
// family; everything else shares one field per (seed, x, t).
constexpr std::uint64_t kTagPair = 0x70616972ULL;    // "pair"
constexpr std::uint64_t kTagCoupled = 0x6265726eULL; // "bern"
} // namespace

Mode parse_mode(const std::string& name) {
    if (name == "web") return Mode::web;
    if (name == "sticky_pair") return Mode::sticky_pair;
    if (name == "net") return Mode::net;
    if (name == "bernoulli") return Mode::bernoulli;
    if (name == "coupled") return Mode::coupled;
    throw Error(ErrorCode::bad_config, "unknown mode: " + name);
}

int ArrowField::arrows_at(std::int64_t x, std::int64_t t, ArrowUse use, std::int32_t* out) const {
    ArrowSet a = at(x, t);
    if (use == ArrowUse::bernoulli) {
        const auto& es = kernel().entries();
        int n = 0;
        std::uint64_t m = a.bern_mask;
        while (m) {
            int i = __builtin_ctzll(m);
            m &= m - 1;
            out[n++] = es[static_cast<std::size_t>(i)].dx;
        }
        return n;
    }
    out[0] = a.w1;
    if (a.w2 != a.w1) {
        out[1] = a.w2;
        return 2;
    }
    return 1;
}

RngField::RngField(SimConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.window.x_min > cfg_.window.x_max || cfg_.window.t_min > cfg_.window.t_max)
        throw Error(ErrorCode::bad_config, "RngField: empty window");
    if (cfg_.mode == Mode::bernoulli || cfg_.mode == Mode::coupled) {
        if (cfg_.kernel.size() > 64)
            throw Error(ErrorCode::bad_config,
                        "RngField: bernoulli arrow masks support <= 64 displacements");
        bk_ = bernoulli_kernel(cfg_.kernel, cfg_.epsilon);
        // P(M = m | M >= 1) with M ~ Poisson(r); cumulative, truncated where
        // the remaining tail is below double resolution.
        double r = bk_->r;
        double denom = -std::expm1(-r);
        double term = std::exp(-r);
        double cum = 0.0;
        for (int m = 1; m <= 64; ++m) {
            term *= r / m;
            cum += term / denom;
            poisson_cum_.push_back(cum);
            if (1.0 - cum < 1e-18) break;
        }
    }
}

const BernoulliKernel& RngField::bernoulli() const {
    if (!bk_) throw Error(ErrorCode::bad_config, "field has no Bernoulli kernel in this mode");
    return *bk_;
}

ArrowSet RngField::at(std::int64_t x, std::int64_t t) const {
    // Queries are allowed anywhere inside the window plus one light cone of
    // margin; beyond that the caller's experiment geometry is wrong.
    const std::int64_t margin =
        std::int64_t(cfg_.kernel.max_jump()) * (cfg_.window.t_max - cfg_.window.t_min);
    if (t < cfg_.window.t_min || t > cfg_.window.t_max || x < cfg_.window.x_min - margin ||
        x > cfg_.window.x_max + margin)
        throw Error(ErrorCode::out_of_window, "arrow query outside window at x=" +
                                                  std::to_string(x) + " t=" + std::to_string(t));

    ArrowSet a;
    if (cfg_.mode == Mode::bernoulli || cfg_.mode == Mode::coupled) {
        SiteStream s(cfg_.seed, kTagCoupled, x, t);
        double u = s.next_unit();
        int m = 1;
        while (m <= static_cast<int>(poisson_cum_.size()) &&
               u >= poisson_cum_[static_cast<std::size_t>(m - 1)])
            ++m;
        if (m > static_cast<int>(poisson_cum_.size())) m = static_cast<int>(poisson_cum_.size());
        std::int32_t first = 0, second = 0;
        for (int i = 0; i < m; ++i) {
            std::int32_t d = cfg_.kernel.sample(s);
            if (i == 0) first = d;
            if (i == 1) second = d;
            a.bern_mask |= 1ULL << cfg_.kernel.index_of(d);
        }
        a.w1 = first;
        a.w2 = (m == 1) ? first : second;
    } else {
        SiteStream s(cfg_.seed, kTagPair, x, t);
        a.w1 = cfg_.kernel.sample(s);
        double u = s.next_unit();
        a.w2 = (cfg_.mode != Mode::web && u < cfg_.epsilon) ? cfg_.kernel.sample(s) : a.w1;
        a.bern_mask = (1ULL << cfg_.kernel.index_of(a.w1)) | (1ULL << cfg_.kernel.index_of(a.w2));
    }
    return a;
}

void TableField::set_pair(std::int64_t x, std::int64_t t, std::int32_t w1, std::int32_t w2) {
    if (kernel_.index_of(w1) < 0 || kernel_.index_of(w2) < 0)
        throw Error(ErrorCode::bad_config, "TableField: displacement off kernel support");
    ArrowSet a;
    a.w1 = w1;
    a.w2 = w2;
    a.bern_mask = (1ULL << kernel_.index_of(w1)) | (1ULL << kernel_.index_of(w2));
    sites_[{x, t}] = a;
}

} // namespace netlab
