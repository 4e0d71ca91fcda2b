#pragma once

#include <array>
#include <vector>

#include "dtm/data_product.hpp"
#include "dtm/traffic/network.hpp"

namespace dtm::traffic {

/// Fixed-time two-phase timing. The NS group is green for the first
/// green_s[ns] seconds of each cycle (shifted by offset_s), EW for the rest.
struct IntersectionTiming {
  int cycle_s = 60;
  std::array<int, 2> green_s{30, 30};
  int offset_s = 0;

  int green(PhaseGroup g) const { return green_s[static_cast<int>(g)]; }
  PhaseGroup active_phase(long t_s) const;

  bool operator==(const IntersectionTiming&) const = default;
};

class SignalPlan {
 public:
  SignalPlan() = default;
  explicit SignalPlan(std::vector<IntersectionTiming> timings) : timings_(std::move(timings)) {}

  /// Same timing at every intersection of the network.
  static SignalPlan uniform(const RoadNetwork& net, int cycle_s, int green_ns_s, int green_ew_s, int offset_s = 0);

  std::size_t size() const { return timings_.size(); }
  const IntersectionTiming& at(std::size_t intersection) const { return timings_.at(intersection); }
  IntersectionTiming& at(std::size_t intersection) { return timings_.at(intersection); }
  bool is_green(std::size_t intersection, PhaseGroup g, long t_s) const {
    return timings_[intersection].active_phase(t_s) == g;
  }

  /// Greens sum to the cycle and are all at least 1 s. Throws InvalidScenario.
  void validate(const RoadNetwork& net) const;

  bool operator==(const SignalPlan&) const = default;

 private:
  std::vector<IntersectionTiming> timings_;
};

/// Prolongs the green of the phase group serving the product's link by
/// delta_s at the intersection that link feeds, and shortens the other group
/// by the same amount. Cycle length is preserved.
/// Throws UnknownLink (unknown link or one that feeds no intersection) and
/// InvalidAdjustment (a green would drop below 1 s).
SignalPlan apply_data_driven_adjustment(const RoadNetwork& net, const SignalPlan& plan, const DataProduct& product,
                                        int delta_s);

}  // namespace dtm::traffic
