#include "dtm/traffic/simulator.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::traffic {

void AccidentEvent::validate(const RoadNetwork& net) const {
  if (!net.has_link(link)) throw Error(Errc::invalid_scenario, fmt::format("accident on unknown link {}", link.value));
  const auto& l = net.link(link);
  if (!(start_s >= 0.0) || !(start_s < end_s))
    throw Error(Errc::invalid_scenario, fmt::format("accident window [{}, {})", start_s, end_s));
  if (!(severity >= 0.0) || severity > 1.0)
    throw Error(Errc::invalid_scenario, fmt::format("accident severity {}", severity));
  if (!(position_m >= 0.0) || position_m > l.length_m)
    throw Error(Errc::invalid_scenario, fmt::format("accident position {} on {} m link", position_m, l.length_m));
}

void Scenario::validate() const {
  network.validate();
  if (!(flow_vph >= 0.0)) throw Error(Errc::invalid_scenario, fmt::format("flow {}", flow_vph));
  if (!(params.saturation_vps_per_lane > 0.0))
    throw Error(Errc::invalid_scenario, fmt::format("saturation rate {}", params.saturation_vps_per_lane));
  for (const auto& a : accidents) a.validate(network);
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::spawn: return "spawn";
    case EventKind::queue_join: return "queue_join";
    case EventKind::discharge: return "discharge";
    case EventKind::complete: return "complete";
    case EventKind::accident_on: return "accident_on";
    case EventKind::accident_off: return "accident_off";
  }
  return "?";
}

TrafficState TrafficState::initial(const RoadNetwork& net, std::shared_ptr<const std::vector<SpawnEvent>> demand,
                                   std::size_t accident_count) {
  TrafficState s;
  s.demand = demand ? std::move(demand) : std::make_shared<const std::vector<SpawnEvent>>();
  s.in_transit.resize(net.links().size());
  s.queues.resize(net.links().size());
  s.service_credit.assign(net.links().size(), 0.0);
  s.accident_active.assign(accident_count, false);
  return s;
}

bool TrafficState::conserves_vehicles() const {
  std::size_t transit = 0, queued = 0, done = 0;
  for (const auto& d : in_transit) transit += d.size();
  for (const auto& q : queues) queued += q.size();
  for (const auto& v : vehicles) done += v.done() ? 1 : 0;
  return transit == transit_count && queued == queued_count && done == done_count &&
         spawned() == transit + queued + done;
}

long travel_ticks(const DirectedLink& link) {
  return std::max(1L, std::lround(link.length_m / link.free_speed_mps));
}

double effective_lanes(const DirectedLink& link, std::span<const AccidentEvent> accidents, double t_s) {
  double lanes = link.lanes;
  for (const auto& a : accidents) {
    if (a.link == link.id && a.active_at(t_s)) lanes *= (1.0 - a.severity);
  }
  return lanes;
}

void step_in_place(TrafficState& s, const RoadNetwork& net, const SignalPlan& plan,
                   std::span<const AccidentEvent> accidents, const SimParams& params, std::vector<SimEvent>* log) {
  const long k = s.clock_s;
  auto emit = [log, k](EventKind kind, std::optional<VehicleId> v, std::optional<LinkId> l) {
    if (log) log->push_back({k, kind, v, l});
  };

  for (std::size_t i = 0; i < accidents.size(); ++i) {
    const bool active = accidents[i].active_at(static_cast<double>(k));
    if (active != s.accident_active[i]) {
      emit(active ? EventKind::accident_on : EventKind::accident_off, std::nullopt, accidents[i].link);
      s.accident_active[i] = active;
    }
  }

  const auto& demand = *s.demand;
  while (s.next_spawn < demand.size() && demand[s.next_spawn].t_s < static_cast<double>(k + 1)) {
    const auto& ev = demand[s.next_spawn++];
    VehicleId id{static_cast<std::uint32_t>(s.vehicles.size())};
    VehicleRecord v;
    v.spawn_s = ev.t_s;
    v.route = ev.route;
    v.entry_flow_vph = ev.flow_vph;
    v.leg_entered_s = k;
    v.exit_due_s = k + travel_ticks(net.link(ev.route.front()));
    s.vehicles.push_back(std::move(v));
    s.in_transit[ev.route.front().index()].push_back({id, s.vehicles.back().exit_due_s});
    ++s.transit_count;
    emit(EventKind::spawn, id, ev.route.front());
  }

  // Link exits: join the downstream queue, or finish on the last leg.
  for (std::size_t li = 0; li < s.in_transit.size(); ++li) {
    auto& lane = s.in_transit[li];
    while (!lane.empty() && lane.front().exit_due_s <= k) {
      VehicleId id = lane.front().vehicle;
      lane.pop_front();
      --s.transit_count;
      auto& v = s.vehicles[id.index()];
      if (v.leg + 1 == v.route.size() || net.links()[li].is_exit) {
        v.status = VehicleStatus::done;
        ++s.done_count;
        emit(EventKind::complete, id, LinkId{static_cast<std::uint32_t>(li)});
      } else {
        v.status = VehicleStatus::queued;
        s.queues[li].push_back({id, k});
        ++s.queued_count;
        emit(EventKind::queue_join, id, LinkId{static_cast<std::uint32_t>(li)});
      }
    }
  }

  // Discharge green approaches.
  for (const auto& link : net.links()) {
    if (link.is_exit) continue;
    auto& q = s.queues[link.id.index()];
    auto& credit = s.service_credit[link.id.index()];
    const std::size_t inter = link.to_node.index();
    // Credit survives red so rates below one vehicle per green still serve;
    // an empty queue cannot bank capacity.
    if (!plan.is_green(inter, phase_of(link.heading), k)) continue;
    if (q.empty()) {
      credit = 0.0;
      continue;
    }
    credit += params.saturation_vps_per_lane * effective_lanes(link, accidents, static_cast<double>(k));
    auto served = static_cast<std::size_t>(std::floor(credit + 1e-9));
    served = std::min(served, q.size());
    for (std::size_t n = 0; n < served; ++n) {
      VehicleId id = q.front().vehicle;
      q.pop_front();
      --s.queued_count;
      auto& v = s.vehicles[id.index()];
      ++v.leg;
      v.status = VehicleStatus::in_transit;
      v.leg_entered_s = k;
      v.exit_due_s = k + travel_ticks(net.link(v.route[v.leg]));
      s.in_transit[v.route[v.leg].index()].push_back({id, v.exit_due_s});
      ++s.transit_count;
      emit(EventKind::discharge, id, link.id);
    }
    credit -= static_cast<double>(served);
    if (q.empty()) credit = 0.0;
  }

  for (const auto& q : s.queues) {
    for (const auto& qv : q) s.vehicles[qv.vehicle.index()].accumulated_wait_s += 1.0;
  }
  s.clock_s = k + 1;
}

TrafficState step(TrafficState state, const RoadNetwork& net, const SignalPlan& plan,
                  std::span<const AccidentEvent> accidents, const SimParams& params) {
  step_in_place(state, net, plan, accidents, params);
  return state;
}

Snapshot snapshot_of(const TrafficState& s) {
  double total = 0.0;
  for (const auto& v : s.vehicles) total += v.accumulated_wait_s;
  return {s.clock_s, s.spawned(), s.transit_count, s.queued_count, s.done_count, total};
}

Simulator::Simulator(std::shared_ptr<const Scenario> scenario, SignalPlan plan, long horizon_s, std::uint64_t seed,
                     bool record_events)
    : scenario_(std::move(scenario)),
      plan_(std::move(plan)),
      horizon_s_(horizon_s),
      seed_(seed),
      record_events_(record_events) {
  if (horizon_s_ < 0) throw Error(Errc::invalid_argument, fmt::format("horizon {}", horizon_s_));
  scenario_->validate();
  plan_.validate(scenario_->network);
  auto demand = std::make_shared<const std::vector<SpawnEvent>>(
      horizon_s_ > 0 ? generate_demand(scenario_->network, scenario_->flow_vph, static_cast<double>(horizon_s_), seed_)
                     : std::vector<SpawnEvent>{});
  state_ = TrafficState::initial(scenario_->network, std::move(demand), scenario_->accidents.size());
}

void Simulator::step() {
  step_in_place(state_, scenario_->network, plan_, scenario_->accidents, scenario_->params,
                record_events_ ? &events_ : nullptr);
}

void Simulator::run_until(long t_s) {
  while (state_.clock_s < t_s) step();
}

void Simulator::set_plan(SignalPlan plan) {
  plan.validate(scenario_->network);
  plan_ = std::move(plan);
}

SimResult Simulator::result() const {
  SimResult r;
  r.waits.reserve(state_.vehicles.size());
  for (const auto& v : state_.vehicles) r.waits.push_back(v.accumulated_wait_s);
  r.n = state_.vehicles.size();
  r.snapshots = snapshots_;
  r.events = events_;
  return r;
}

SimResult run(const Scenario& scenario, const SignalPlan& plan, long horizon_s, std::uint64_t seed,
              const RunOptions& options) {
  Simulator sim(std::make_shared<const Scenario>(scenario), plan, horizon_s, seed, options.record_events);
  std::size_t next_snap = 0;
  auto snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  for (long t = 0; t < horizon_s; ++t) {
    while (next_snap < snaps.size() && snaps[next_snap] <= sim.state().clock_s) {
      sim.take_snapshot();
      ++next_snap;
    }
    sim.step();
  }
  while (next_snap < snaps.size() && snaps[next_snap] <= sim.state().clock_s) {
    sim.take_snapshot();
    ++next_snap;
  }
  return sim.result();
}

double position_proxy_m(const TrafficState& s, const RoadNetwork& net, VehicleId id) {
  if (id.index() >= s.vehicles.size()) throw Error(Errc::unknown_vehicle, fmt::format("vehicle {}", id.value));
  const auto& v = s.vehicles[id.index()];
  const auto& link = net.link(v.current_link());
  if (v.status == VehicleStatus::queued || v.done()) return link.length_m;
  const double span = static_cast<double>(v.exit_due_s - v.leg_entered_s);
  const double frac = span > 0 ? static_cast<double>(s.clock_s - v.leg_entered_s) / span : 1.0;
  return std::clamp(frac, 0.0, 1.0) * link.length_m;
}

std::optional<DataProduct> observe_accident(const TrafficState& s, const RoadNetwork& net, VehicleId id,
                                            std::span<const AccidentEvent> accidents, double radius_m) {
  if (id.index() >= s.vehicles.size()) throw Error(Errc::unknown_vehicle, fmt::format("vehicle {}", id.value));
  const auto& v = s.vehicles[id.index()];
  if (v.done()) return std::nullopt;
  const double t = static_cast<double>(s.clock_s);
  const LinkId on = v.current_link();
  const double pos = position_proxy_m(s, net, id);
  for (const auto& a : accidents) {
    if (a.link != on || !a.active_at(t)) continue;
    if (std::abs(pos - a.position_m) <= radius_m) {
      return DataProduct{a.link, a.position_m, t, a.severity, v.entry_flow_vph};
    }
  }
  return std::nullopt;
}

}  // namespace dtm::traffic
