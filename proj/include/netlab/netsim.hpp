#pragma once

#include <cstdint>
#include <vector>

#include "netlab/field.hpp"
#include "netlab/path.hpp"

namespace netlab {

// Arrow selection when following a single path through the field.
struct Chooser {
    enum class Kind { first, second, uniform, bits };
    Kind kind = Kind::first;
    std::uint64_t seed = 0;          // for uniform
    std::vector<bool> bits;          // for bits: one choice per step, true = second

    static Chooser first() { return {Kind::first, 0, {}}; }
    static Chooser second() { return {Kind::second, 0, {}}; }
    static Chooser uniform(std::uint64_t seed) { return {Kind::uniform, seed, {}}; }
    static Chooser from_bits(std::vector<bool> b) { return {Kind::bits, 0, std::move(b)}; }
};

// Follows one arrow per step from (x, t) up to time horizon.
LatticePath follow_path(const ArrowField& field, std::int64_t x, std::int64_t t,
                        std::int64_t horizon, const Chooser& chooser);

// All distinct trajectories from (x, t) to the horizon, branching at every
// site whose selected arrow family offers more than one displacement.
std::vector<LatticePath> enumerate_net_paths(const ArrowField& field, std::int64_t x,
                                             std::int64_t t, std::int64_t horizon,
                                             ArrowUse use = ArrowUse::net,
                                             std::size_t cap = 1'000'000);

} // namespace netlab
