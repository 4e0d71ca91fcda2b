#include "dtm/traffic/signal_plan.hpp"

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::traffic {

PhaseGroup IntersectionTiming::active_phase(long t_s) const {
  long pos = (t_s - offset_s) % cycle_s;
  if (pos < 0) pos += cycle_s;
  return pos < green_s[0] ? PhaseGroup::ns : PhaseGroup::ew;
}

SignalPlan SignalPlan::uniform(const RoadNetwork& net, int cycle_s, int green_ns_s, int green_ew_s, int offset_s) {
  std::vector<IntersectionTiming> t(net.intersections().size(),
                                    IntersectionTiming{cycle_s, {green_ns_s, green_ew_s}, offset_s});
  SignalPlan plan(std::move(t));
  plan.validate(net);
  return plan;
}

void SignalPlan::validate(const RoadNetwork& net) const {
  if (timings_.size() != net.intersections().size())
    throw Error(Errc::invalid_scenario,
                fmt::format("plan covers {} intersections, network has {}", timings_.size(), net.intersections().size()));
  for (std::size_t i = 0; i < timings_.size(); ++i) {
    const auto& t = timings_[i];
    if (t.green_s[0] < 1 || t.green_s[1] < 1 || t.green_s[0] + t.green_s[1] != t.cycle_s)
      throw Error(Errc::invalid_scenario, fmt::format("intersection {}: greens {}+{} vs cycle {}", i, t.green_s[0],
                                                      t.green_s[1], t.cycle_s));
  }
}

SignalPlan apply_data_driven_adjustment(const RoadNetwork& net, const SignalPlan& plan, const DataProduct& product,
                                        int delta_s) {
  const auto& link = net.link(product.link_id);
  auto inter = net.downstream_intersection(product.link_id);
  if (!inter) throw Error(Errc::unknown_link, fmt::format("link {} feeds no intersection", link.id.value));
  if (delta_s < 0) throw Error(Errc::invalid_adjustment, fmt::format("negative delta {}", delta_s));

  SignalPlan out = plan;
  auto& t = out.at(*inter);
  const int prolonged = static_cast<int>(phase_of(link.heading));
  const int shortened = 1 - prolonged;
  if (t.green_s[shortened] - delta_s < 1)
    throw Error(Errc::invalid_adjustment,
                fmt::format("green {} s cannot be shortened by {} s", t.green_s[shortened], delta_s));
  t.green_s[prolonged] += delta_s;
  t.green_s[shortened] -= delta_s;
  return out;
}

}  // namespace dtm::traffic
