#include "dtm/traffic/demand.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::traffic {

std::vector<SpawnEvent> entry_arrivals(LinkId entry, const std::vector<LinkId>& route, double flow_vph,
                                       double horizon_s, double phase_offset_s) {
  if (flow_vph < 0.0 || !(horizon_s > 0.0))
    throw Error(Errc::invalid_argument, fmt::format("flow {} horizon {}", flow_vph, horizon_s));
  std::vector<SpawnEvent> out;
  if (flow_vph == 0.0) return out;
  const double headway = 3600.0 / flow_vph;
  for (long k = 0;; ++k) {
    const double t = phase_offset_s + static_cast<double>(k) * headway;
    if (t >= horizon_s) break;
    out.push_back({t, entry, route, flow_vph});
  }
  return out;
}

std::vector<SpawnEvent> generate_demand(const RoadNetwork& net, double flow_vph, double horizon_s, std::uint64_t seed) {
  std::vector<SpawnEvent> all;
  if (flow_vph == 0.0) {
    entry_arrivals(LinkId{}, {}, flow_vph, horizon_s, 0.0);  // argument checks only
    return all;
  }
  const double headway = 3600.0 / flow_vph;
  std::mt19937_64 rng(seed);
  for (LinkId e : net.entries()) {
    // Top 53 bits -> [0, 1); avoids the implementation-defined real distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto arrivals = entry_arrivals(e, net.route_from(e), flow_vph, horizon_s, u * headway);
    all.insert(all.end(), std::make_move_iterator(arrivals.begin()), std::make_move_iterator(arrivals.end()));
  }
  std::stable_sort(all.begin(), all.end(), [](const SpawnEvent& a, const SpawnEvent& b) {
    return a.t_s < b.t_s || (a.t_s == b.t_s && a.entry < b.entry);
  });
  return all;
}

}  // namespace dtm::traffic
