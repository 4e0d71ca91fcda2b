#pragma once

#include <cstdint>
#include <vector>

#include "dtm/traffic/network.hpp"

namespace dtm::traffic {

struct SpawnEvent {
  double t_s = 0.0;
  LinkId entry;
  std::vector<LinkId> route;  // starts with the entry link, ends with an exit link
  double flow_vph = 0.0;      // spawn rate of the entry

  bool operator==(const SpawnEvent&) const = default;
};

/// Fixed-headway arrivals on one entry: t = phase_offset_s + k * 3600 / flow_vph
/// for every t < horizon_s. Empty when flow_vph is 0.
std::vector<SpawnEvent> entry_arrivals(LinkId entry, const std::vector<LinkId>& route, double flow_vph,
                                       double horizon_s, double phase_offset_s);

/// Arrivals on every entry with a seeded phase offset in [0, headway) per
/// entry, merged and sorted by (time, entry id). Offsets are drawn from
/// std::mt19937_64 in entry order, so the output is identical on every
/// conforming standard library.
std::vector<SpawnEvent> generate_demand(const RoadNetwork& net, double flow_vph, double horizon_s, std::uint64_t seed);

}  // namespace dtm::traffic
