#pragma once

#include <cstdint>

namespace netlab {

// 64-bit finalizer with full avalanche (Stafford mix13, as used by splitmix64).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Counter-based stream keyed by (seed, tag, x, t).  Repeated construction
// with the same key replays the identical draw sequence, which is what makes
// lazily materialized arrow fields consistent across queries.
class SiteStream {
public:
    SiteStream(std::uint64_t seed, std::uint64_t tag, std::int64_t x, std::int64_t t) {
        std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
        h = mix64(h ^ (tag * 0xff51afd7ed558ccdULL));
        h = mix64(h ^ (static_cast<std::uint64_t>(x) * 0xc4ceb9fe1a85ec53ULL));
        h = mix64(h ^ (static_cast<std::uint64_t>(t) * 0x2545f4914f6cdd1dULL));
        state_ = h;
    }

    explicit SiteStream(std::uint64_t seed) : state_(mix64(seed + 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace netlab
