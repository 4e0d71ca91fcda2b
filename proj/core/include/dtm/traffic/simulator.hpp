#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dtm/data_product.hpp"
#include "dtm/traffic/demand.hpp"
#include "dtm/traffic/network.hpp"
#include "dtm/traffic/signal_plan.hpp"

namespace dtm::traffic {

/// Capacity loss on one link. While active, the approach the link forms keeps
/// lanes * (1 - severity) effective lanes.
struct AccidentEvent {
  LinkId link;
  double start_s = 200.0;
  double end_s = 700.0;
  double severity = 0.5;
  double position_m = 400.0;

  bool active_at(double t_s) const { return start_s <= t_s && t_s < end_s; }
  /// Throws InvalidScenario (unknown link or out-of-range field).
  void validate(const RoadNetwork& net) const;

  bool operator==(const AccidentEvent&) const = default;
};

struct SimParams {
  double saturation_vps_per_lane = 0.5;
  bool operator==(const SimParams&) const = default;
};

struct Scenario {
  RoadNetwork network;
  double flow_vph = 220.0;
  std::vector<AccidentEvent> accidents;
  SimParams params;

  void validate() const;
};

enum class VehicleStatus { in_transit, queued, done };

struct VehicleRecord {
  double spawn_s = 0.0;
  std::vector<LinkId> route;
  std::size_t leg = 0;
  double accumulated_wait_s = 0.0;
  VehicleStatus status = VehicleStatus::in_transit;
  double entry_flow_vph = 0.0;
  long leg_entered_s = 0;
  long exit_due_s = 0;

  bool done() const { return status == VehicleStatus::done; }
  LinkId current_link() const { return route[leg]; }
};

struct InTransit {
  VehicleId vehicle;
  long exit_due_s = 0;
};

struct QueuedVehicle {
  VehicleId vehicle;
  long joined_s = 0;
};

/// Complete mutable state of one simulation instance. Plain value: copying it
/// forks the simulation.
struct TrafficState {
  long clock_s = 0;
  std::shared_ptr<const std::vector<SpawnEvent>> demand;
  std::size_t next_spawn = 0;
  std::vector<VehicleRecord> vehicles;          // indexed by VehicleId
  std::vector<std::deque<InTransit>> in_transit;  // indexed by LinkId
  std::vector<std::deque<QueuedVehicle>> queues;  // indexed by LinkId (approach)
  std::vector<double> service_credit;           // indexed by LinkId
  std::vector<bool> accident_active;            // indexed like the accident list
  std::size_t transit_count = 0;
  std::size_t queued_count = 0;
  std::size_t done_count = 0;

  static TrafficState initial(const RoadNetwork& net, std::shared_ptr<const std::vector<SpawnEvent>> demand,
                              std::size_t accident_count);

  std::size_t spawned() const { return vehicles.size(); }
  /// spawned == in transit + queued + done, with the counters matching the containers.
  bool conserves_vehicles() const;
};

enum class EventKind { spawn, queue_join, discharge, complete, accident_on, accident_off };

const char* to_string(EventKind k);

struct SimEvent {
  long t_s = 0;
  EventKind kind = EventKind::spawn;
  std::optional<VehicleId> vehicle;
  std::optional<LinkId> link;

  bool operator==(const SimEvent&) const = default;
};

/// Advances the state by one 1 s tick [clock, clock + 1):
/// accident overlays toggle, due vehicles spawn, link-exit-due vehicles join
/// the downstream queue (or finish), green approaches discharge with
/// fractional service credit, and every vehicle still queued gains 1 s wait.
void step_in_place(TrafficState& state, const RoadNetwork& net, const SignalPlan& plan,
                   std::span<const AccidentEvent> accidents, const SimParams& params,
                   std::vector<SimEvent>* log = nullptr);

TrafficState step(TrafficState state, const RoadNetwork& net, const SignalPlan& plan,
                  std::span<const AccidentEvent> accidents, const SimParams& params = {});

/// Free-flow traversal time of a link in whole ticks (at least 1).
long travel_ticks(const DirectedLink& link);

/// Effective lanes of an approach at time t given the accident overlays.
double effective_lanes(const DirectedLink& link, std::span<const AccidentEvent> accidents, double t_s);

struct Snapshot {
  long t_s = 0;
  std::size_t spawned = 0;
  std::size_t in_transit = 0;
  std::size_t queued = 0;
  std::size_t done = 0;
  double total_wait_s = 0.0;

  bool operator==(const Snapshot&) const = default;
};

Snapshot snapshot_of(const TrafficState& state);

struct SimResult {
  std::vector<double> waits;  // per vehicle, spawn order (phi_i)
  std::size_t n = 0;
  std::vector<Snapshot> snapshots;
  std::vector<SimEvent> events;

  bool operator==(const SimResult&) const = default;
};

/// Owns one running simulation: scenario, demand, current plan and state.
/// Copyable; a copy is an independent fork.
class Simulator {
 public:
  Simulator(std::shared_ptr<const Scenario> scenario, SignalPlan plan, long horizon_s, std::uint64_t seed,
            bool record_events = true);

  void step();
  void run_until(long t_s);

  const Scenario& scenario() const { return *scenario_; }
  const TrafficState& state() const { return state_; }
  const SignalPlan& plan() const { return plan_; }
  long horizon_s() const { return horizon_s_; }
  std::uint64_t seed() const { return seed_; }

  /// Replaces the plan from the next tick on. Throws InvalidScenario.
  void set_plan(SignalPlan plan);
  void take_snapshot() { snapshots_.push_back(snapshot_of(state_)); }

  SimResult result() const;

 private:
  std::shared_ptr<const Scenario> scenario_;
  SignalPlan plan_;
  long horizon_s_;
  std::uint64_t seed_;
  bool record_events_;
  TrafficState state_;
  std::vector<SimEvent> events_;
  std::vector<Snapshot> snapshots_;
};

struct RunOptions {
  bool record_events = true;
  std::vector<long> snapshot_times;
};

/// Steps horizon_s ticks from the empty state. Bit-identical for identical inputs.
/// Throws InvalidScenario.
SimResult run(const Scenario& scenario, const SignalPlan& plan, long horizon_s, std::uint64_t seed,
              const RunOptions& options = {});

inline constexpr double kObservationRadiusM = 250.0;

/// Position along the vehicle's current link: linear in elapsed free-flow
/// time while in transit, the stop line while queued.
double position_proxy_m(const TrafficState& state, const RoadNetwork& net, VehicleId vehicle);

/// Returns an observation when an active accident lies on the vehicle's
/// current link within radius_m of its position proxy. Done vehicles observe
/// nothing. Throws UnknownVehicle.
std::optional<DataProduct> observe_accident(const TrafficState& state, const RoadNetwork& net, VehicleId vehicle,
                                            std::span<const AccidentEvent> accidents,
                                            double radius_m = kObservationRadiusM);

}  // namespace dtm::traffic
