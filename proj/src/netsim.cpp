#include "netlab/netsim.hpp"

#include <algorithm>

namespace netlab {

LatticePath follow_path(const ArrowField& field, std::int64_t x, std::int64_t t,
                        std::int64_t horizon, const Chooser& chooser) {
    if (horizon < t) throw Error(ErrorCode::bad_config, "follow_path: horizon before start");
    LatticePath p;
    p.start_time = t;
    p.positions.reserve(static_cast<std::size_t>(horizon - t + 1));
    p.positions.push_back(x);
    SiteStream rng(chooser.seed);
    std::int64_t pos = x;
    for (std::int64_t s = t; s < horizon; ++s) {
        ArrowSet a = field.at(pos, s);
        bool take_second = false;
        switch (chooser.kind) {
            case Chooser::Kind::first: break;
            case Chooser::Kind::second: take_second = true; break;
            case Chooser::Kind::uniform: take_second = rng.next_unit() < 0.5; break;
            case Chooser::Kind::bits: {
                std::size_t i = static_cast<std::size_t>(s - t);
                take_second = i < chooser.bits.size() && chooser.bits[i];
                break;
            }
        }
        pos += take_second ? a.w2 : a.w1;
        p.positions.push_back(pos);
    }
    return p;
}

std::vector<LatticePath> enumerate_net_paths(const ArrowField& field, std::int64_t x,
                                             std::int64_t t, std::int64_t horizon, ArrowUse use,
                                             std::size_t cap) {
    std::vector<LatticePath> level;
    level.push_back({t, {x}});
    std::vector<std::int32_t> buf(field.kernel().size());
    for (std::int64_t s = t; s < horizon; ++s) {
        std::vector<LatticePath> next;
        next.reserve(level.size());
        for (const auto& p : level) {
            int n = field.arrows_at(p.positions.back(), s, use, buf.data());
            for (int i = 0; i < n; ++i) {
                if (next.size() >= cap)
                    throw Error(ErrorCode::explosion_cap,
                                "enumerate_net_paths: more than " + std::to_string(cap) +
                                    " trajectories");
                LatticePath q = p;
                q.positions.push_back(p.positions.back() + buf[static_cast<std::size_t>(i)]);
                next.push_back(std::move(q));
            }
        }
        level = std::move(next);
    }
    // Distinct displacements from a common prefix give distinct trajectories,
    // so the level is already duplicate-free; sort for set semantics.
    std::sort(level.begin(), level.end());
    return level;
}

} // namespace netlab
