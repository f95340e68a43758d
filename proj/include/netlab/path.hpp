#pragma once

#include <cstdint>
#include <vector>

namespace netlab {

// A walk trajectory: one position per integer time in
// [start_time, start_time + positions.size() - 1].
struct LatticePath {
    std::int64_t start_time = 0;
    std::vector<std::int64_t> positions;

    std::int64_t end_time() const {
        return start_time + static_cast<std::int64_t>(positions.size()) - 1;
    }
    bool defined_at(std::int64_t t) const { return t >= start_time && t <= end_time(); }
    std::int64_t at(std::int64_t t) const {
        return positions[static_cast<std::size_t>(t - start_time)];
    }

    // Paths are identified with their trajectories.
    friend bool operator==(const LatticePath&, const LatticePath&) = default;
    friend auto operator<=>(const LatticePath&, const LatticePath&) = default;
};

} // namespace netlab
