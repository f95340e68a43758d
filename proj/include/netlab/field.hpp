#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "netlab/error.hpp"
#include "netlab/kernel.hpp"
#include "netlab/rng.hpp"

namespace netlab {

enum class Mode { web, sticky_pair, net, bernoulli, coupled };

Mode parse_mode(const std::string& name);

struct Window {
    std::int64_t x_min, x_max, t_min, t_max;
    bool contains(std::int64_t x, std::int64_t t) const {
        return x >= x_min && x <= x_max && t >= t_min && t <= t_max;
    }
};

struct SimConfig {
    std::uint64_t seed = 0;
    IncrementKernel kernel;
    double epsilon = 0.0;
    Window window{};
    Mode mode = Mode::net;
};

// Outgoing arrows of one site.  net pair (w1, w2) always set; w1 == w2 at
// non-branching sites.  bern_mask indexes kernel support entries and is the
// Bernoulli-net arrow set when the coupled/bernoulli sampler produced it
// (for pure pair modes it holds just the bits of w1, w2).
struct ArrowSet {
    std::int32_t w1 = 0;
    std::int32_t w2 = 0;
    std::uint64_t bern_mask = 0;
    bool branching() const { return w1 != w2; }
};

// Which arrow family set-valued dynamics follow.
enum class ArrowUse { net, bernoulli };

// A realized space-time arrow field.  Implementations must be pure: repeated
// queries at the same (x, t) return the identical ArrowSet.
class ArrowField {
public:
    virtual ~ArrowField() = default;

    virtual ArrowSet at(std::int64_t x, std::int64_t t) const = 0;
    virtual const IncrementKernel& kernel() const = 0;
    virtual Mode mode() const = 0;

    // Distinct displacements of the requested arrow family, written to out
    // (capacity >= kernel().size()).  Returns the count.
    int arrows_at(std::int64_t x, std::int64_t t, ArrowUse use, std::int32_t* out) const;
};

// Seed-keyed lazy field: every site's arrows are a deterministic function of
// (seed, x, t, mode family), so the infinite lattice never has to be
// materialized and any window of it can be revisited consistently.
class RngField final : public ArrowField {
public:
    explicit RngField(SimConfig cfg);

    ArrowSet at(std::int64_t x, std::int64_t t) const override;
    const IncrementKernel& kernel() const override { return cfg_.kernel; }
    Mode mode() const override { return cfg_.mode; }
    const SimConfig& config() const { return cfg_; }
    const BernoulliKernel& bernoulli() const;

private:
    SimConfig cfg_;
    std::optional<BernoulliKernel> bk_;
    std::vector<double> poisson_cum_; // P(M <= m | M >= 1) for m = 1, 2, ...
};

// Explicit finite field for hand-built configurations and exhaustive
// enumeration.  Sites not present fall back to a fixed default arrow.
class TableField final : public ArrowField {
public:
    TableField(IncrementKernel kernel, Mode mode)
        : kernel_(std::move(kernel)), mode_(mode) {
        default_.w1 = default_.w2 = kernel_.entries().front().dx;
        default_.bern_mask = 1;
    }

    void set(std::int64_t x, std::int64_t t, ArrowSet a) { sites_[{x, t}] = a; }
    void set_pair(std::int64_t x, std::int64_t t, std::int32_t w1, std::int32_t w2);

    ArrowSet at(std::int64_t x, std::int64_t t) const override {
        auto it = sites_.find({x, t});
        return it == sites_.end() ? default_ : it->second;
    }
    const IncrementKernel& kernel() const override { return kernel_; }
    Mode mode() const override { return mode_; }

private:
    IncrementKernel kernel_;
    Mode mode_;
    ArrowSet default_;
    std::map<std::pair<std::int64_t, std::int64_t>, ArrowSet> sites_;
};

} // namespace netlab
