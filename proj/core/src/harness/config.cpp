#include "dtm/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::harness {
namespace {

// Thrown by value parsers; the caller attaches key and line.
struct BadValue {
  Errc code;
  std::string why;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_integer(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw BadValue{Errc::config_parse_error, fmt::format("'{}' is not an integer", v)};
  return out;
}

double parse_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw BadValue{Errc::config_parse_error, fmt::format("'{}' is not a number", v)};
  return out;
}

Currency parse_money(std::string_view v) {
  auto c = Currency::parse(v);
  if (!c) throw BadValue{Errc::config_parse_error, fmt::format("'{}' is not an amount", v)};
  return *c;
}

template <class E>
E parse_enum(std::optional<E> parsed, std::string_view v) {
  if (!parsed) throw BadValue{Errc::config_range_error, fmt::format("'{}' is not an allowed value", v)};
  return *parsed;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

struct KeySpec {
  std::string_view key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define DTM_INT_KEY(name, field)                                                                     \
  KeySpec {                                                                                          \
    name, [](ScenarioConfig& c, std::string_view v) { c.field = parse_integer<decltype(c.field)>(v); }, \
        [](const ScenarioConfig& c) { return fmt::format("{}", c.field); }                           \
  }
#define DTM_DOUBLE_KEY(name, field)                                                     \
  KeySpec {                                                                             \
    name, [](ScenarioConfig& c, std::string_view v) { c.field = parse_double(v); },     \
        [](const ScenarioConfig& c) { return fmt_double(c.field); }                     \
  }
#define DTM_MONEY_KEY(name, field)                                                      \
  KeySpec {                                                                             \
    name, [](ScenarioConfig& c, std::string_view v) { c.field = parse_money(v); },      \
        [](const ScenarioConfig& c) { return c.field.str(); }                           \
  }
#define DTM_AGENT_KEYS(prefix, member)                                                                        \
  KeySpec{prefix ".risk",                                                                                     \
          [](ScenarioConfig& c, std::string_view v) { c.agents.member.risk = parse_enum(agents::parse_risk(v), v); }, \
          [](const ScenarioConfig& c) { return std::string(agents::to_string(c.agents.member.risk)); }},     \
      KeySpec{prefix ".sensitivity",                                                                          \
              [](ScenarioConfig& c, std::string_view v) {                                                     \
                c.agents.member.sensitivity = parse_enum(agents::parse_sensitivity(v), v);                   \
              },                                                                                              \
              [](const ScenarioConfig& c) { return std::string(agents::to_string(c.agents.member.sensitivity)); }}, \
      DTM_MONEY_KEY(prefix ".endowment", agents.member.endowment)

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      DTM_INT_KEY("network.rows", network.rows),
      DTM_INT_KEY("network.cols", network.cols),
      DTM_DOUBLE_KEY("network.link_length_m", network.link_length_m),
      DTM_INT_KEY("network.lanes", network.lanes),
      DTM_DOUBLE_KEY("network.free_speed_mps", network.free_speed_mps),
      DTM_DOUBLE_KEY("network.saturation_vps_per_lane", network.saturation_vps_per_lane),
      DTM_DOUBLE_KEY("demand.flow_vph", demand.flow_vph),
      KeySpec{"demand.seed",
              [](ScenarioConfig& c, std::string_view v) {
                if (v == "run") c.demand.seed.reset();
                else c.demand.seed = parse_integer<std::uint64_t>(v);
              },
              [](const ScenarioConfig& c) { return c.demand.seed ? fmt::format("{}", *c.demand.seed) : std::string("run"); }},
      KeySpec{"accident.link",
              [](ScenarioConfig& c, std::string_view v) {
                if (v == "auto") c.accident.link.reset();
                else c.accident.link = parse_integer<std::uint32_t>(v);
              },
              [](const ScenarioConfig& c) { return c.accident.link ? fmt::format("{}", *c.accident.link) : std::string("auto"); }},
      DTM_DOUBLE_KEY("accident.start_s", accident.start_s),
      DTM_DOUBLE_KEY("accident.end_s", accident.end_s),
      DTM_DOUBLE_KEY("accident.severity", accident.severity),
      DTM_DOUBLE_KEY("accident.position_m", accident.position_m),
      DTM_INT_KEY("signal.cycle_s", signal.cycle_s),
      DTM_INT_KEY("signal.green_ns_s", signal.green_ns_s),
      DTM_INT_KEY("signal.green_ew_s", signal.green_ew_s),
      DTM_INT_KEY("signal.offset_s", signal.offset_s),
      DTM_INT_KEY("signal.adjustment_delta_s", signal.adjustment_delta_s),
      DTM_AGENT_KEYS("agents.controller", controller),
      DTM_AGENT_KEYS("agents.vehicle", vehicle),
      DTM_MONEY_KEY("market.proposal_fee", market.proposal_fee),
      DTM_INT_KEY("market.observe_period_s", market.observe_period_s),
      DTM_DOUBLE_KEY("market.observation_radius_m", market.observation_radius_m),
      DTM_DOUBLE_KEY("pricing.w", pricing.w),
      DTM_DOUBLE_KEY("pricing.conversion_rate", pricing.conversion_rate),
      DTM_DOUBLE_KEY("pricing.aggressive_multiplier", pricing.aggressive_multiplier),
      DTM_DOUBLE_KEY("pricing.ask_markup_aggressive", pricing.ask_markup_aggressive),
      DTM_DOUBLE_KEY("pricing.ask_markup_conservative", pricing.ask_markup_conservative),
      DTM_MONEY_KEY("pricing.concession_step", pricing.concession_step),
      DTM_INT_KEY("pricing.max_rounds", pricing.max_rounds),
      KeySpec{"backend.mode",
              [](ScenarioConfig& c, std::string_view v) {
                if (v == "rule") c.backend.mode = BackendMode::rule;
                else if (v == "llm") c.backend.mode = BackendMode::llm;
                else throw BadValue{Errc::config_range_error, fmt::format("'{}' is not rule or llm", v)};
              },
              [](const ScenarioConfig& c) { return std::string(c.backend.mode == BackendMode::rule ? "rule" : "llm"); }},
      KeySpec{"backend.base_url", [](ScenarioConfig& c, std::string_view v) { c.backend.base_url = std::string(v); },
              [](const ScenarioConfig& c) { return c.backend.base_url; }},
      KeySpec{"backend.model", [](ScenarioConfig& c, std::string_view v) { c.backend.model = std::string(v); },
              [](const ScenarioConfig& c) { return c.backend.model; }},
      DTM_DOUBLE_KEY("backend.timeout_s", backend.timeout_s),
      DTM_INT_KEY("backend.retries", backend.retries),
      KeySpec{"backend.on_error",
              [](ScenarioConfig& c, std::string_view v) { c.backend.on_error = parse_enum(agents::parse_on_error(v), v); },
              [](const ScenarioConfig& c) { return std::string(agents::to_string(c.backend.on_error)); }},
      DTM_INT_KEY("run.horizon_s", run.horizon_s),
      DTM_INT_KEY("run.seed", run.seed),
  };
  return table;
}

#undef DTM_INT_KEY
#undef DTM_DOUBLE_KEY
#undef DTM_MONEY_KEY
#undef DTM_AGENT_KEYS

[[noreturn]] void range_error(std::string_view key, const std::string& why) {
  throw ConfigError(Errc::config_range_error, std::string(key), 0, fmt::format("{}: {}", key, why));
}

void require(bool ok, std::string_view key, std::string_view why) {
  if (!ok) range_error(key, std::string(why));
}

struct Line {
  int number = 0;
  std::string_view key;
  std::string_view value;
};

// Splits text into key/value lines; replay lines are handed to `extra`.
template <class Extra>
ScenarioConfig parse_lines(std::string_view text, Extra&& extra) {
  ScenarioConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(Errc::config_parse_error, "", number, fmt::format("line {}: expected key=value", number));
    Line line{number, trim(raw.substr(0, eq)), trim(raw.substr(eq + 1))};
    if (extra(line)) continue;

    const auto& table = key_table();
    auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.key == line.key; });
    if (it == table.end())
      throw ConfigError(Errc::config_parse_error, std::string(line.key), number,
                        fmt::format("line {}: unknown key '{}'", number, line.key));
    if (auto [_, fresh] = seen.emplace(std::string(line.key), number); !fresh)
      throw ConfigError(Errc::config_parse_error, std::string(line.key), number,
                        fmt::format("line {}: duplicate key '{}'", number, line.key));
    try {
      it->set(cfg, line.value);
    } catch (const BadValue& bad) {
      throw ConfigError(bad.code, std::string(line.key), number, fmt::format("line {}: {}: {}", number, line.key, bad.why));
    }
  }
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    auto it = seen.find(e.key());
    throw ConfigError(e.code(), e.key(), it == seen.end() ? 0 : it->second, e.what());
  }
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Errc::config_parse_error, "", 0, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

agents::PricingParams ScenarioConfig::pricing_params() const {
  agents::PricingParams p;
  p.conversion_rate = pricing.conversion_rate;
  p.aggressive_multiplier = pricing.aggressive_multiplier;
  p.ask_markup_aggressive = pricing.ask_markup_aggressive;
  p.ask_markup_conservative = pricing.ask_markup_conservative;
  p.proposal_fee = market.proposal_fee;
  return p;
}

agents::AgentProfile ScenarioConfig::controller_profile() const {
  return {"controller", agents::Role::controller, agents.controller.risk, agents.controller.sensitivity,
          agents.controller.endowment};
}

agents::AgentProfile ScenarioConfig::vehicle_profile(std::string id) const {
  return {std::move(id), agents::Role::vehicle, agents.vehicle.risk, agents.vehicle.sensitivity, agents.vehicle.endowment};
}

traffic::RoadNetwork ScenarioConfig::build_network() const {
  return traffic::build_grid(network.rows, network.cols, network.link_length_m, network.lanes, network.free_speed_mps);
}

LinkId ScenarioConfig::accident_link(const traffic::RoadNetwork& net) const {
  if (accident.link) {
    const LinkId id{*accident.link};
    if (!net.has_link(id)) range_error("accident.link", fmt::format("no link {}", id.value));
    if (!net.downstream_intersection(id)) range_error("accident.link", fmt::format("link {} leaves the network", id.value));
    return id;
  }
  const auto centre = static_cast<std::size_t>((net.rows() / 2) * net.cols() + net.cols() / 2);
  for (const auto& l : net.links())
    if (l.heading == traffic::Heading::south && l.to_node.index() == centre) return l.id;
  range_error("accident.link", "no southbound approach at the centre intersection");
}

traffic::Scenario ScenarioConfig::build_scenario() const {
  traffic::Scenario s;
  s.network = build_network();
  s.flow_vph = demand.flow_vph;
  s.params.saturation_vps_per_lane = network.saturation_vps_per_lane;
  s.accidents.push_back({accident_link(s.network), accident.start_s, accident.end_s, accident.severity, accident.position_m});
  return s;
}

traffic::SignalPlan ScenarioConfig::build_plan(const traffic::RoadNetwork& net) const {
  return traffic::SignalPlan::uniform(net, signal.cycle_s, signal.green_ns_s, signal.green_ew_s, signal.offset_s);
}

llm::EndpointConfig ScenarioConfig::endpoint() const {
  auto e = llm::EndpointConfig::from_env();
  if (!backend.base_url.empty()) e.base_url = backend.base_url;
  e.timeout = std::chrono::milliseconds(static_cast<long>(backend.timeout_s * 1000.0));
  e.retries = backend.retries;
  return e;
}

void validate(const ScenarioConfig& c) {
  require(c.network.rows >= 1 && c.network.rows <= 50, "network.rows", "must be in [1, 50]");
  require(c.network.cols >= 1 && c.network.cols <= 50, "network.cols", "must be in [1, 50]");
  require(c.network.link_length_m > 0.0 && c.network.link_length_m <= 1e5, "network.link_length_m", "must be in (0, 100000]");
  require(c.network.lanes >= 1 && c.network.lanes <= 10, "network.lanes", "must be in [1, 10]");
  require(c.network.free_speed_mps > 0.0 && c.network.free_speed_mps <= 100.0, "network.free_speed_mps", "must be in (0, 100]");
  require(c.network.saturation_vps_per_lane > 0.0 && c.network.saturation_vps_per_lane <= 10.0,
          "network.saturation_vps_per_lane", "must be in (0, 10]");
  require(c.demand.flow_vph > 0.0 && c.demand.flow_vph <= 3600.0, "demand.flow_vph", "must be in (0, 3600]");
  require(c.accident.start_s >= 0.0, "accident.start_s", "must be >= 0");
  require(c.accident.end_s > c.accident.start_s, "accident.end_s", "must be after accident.start_s");
  require(c.accident.severity >= 0.0 && c.accident.severity <= 1.0, "accident.severity", "must be in [0, 1]");
  require(c.accident.position_m >= 0.0 && c.accident.position_m <= c.network.link_length_m, "accident.position_m",
          "must lie on the link");
  require(c.signal.cycle_s >= 2 && c.signal.cycle_s <= 600, "signal.cycle_s", "must be in [2, 600]");
  require(c.signal.green_ns_s >= 1, "signal.green_ns_s", "must be >= 1");
  require(c.signal.green_ew_s >= 1, "signal.green_ew_s", "must be >= 1");
  require(c.signal.green_ns_s + c.signal.green_ew_s == c.signal.cycle_s, "signal.cycle_s",
          "must equal green_ns_s + green_ew_s");
  require(c.signal.offset_s >= 0 && c.signal.offset_s < c.signal.cycle_s, "signal.offset_s", "must be in [0, cycle_s)");
  require(c.signal.adjustment_delta_s >= 0 &&
              c.signal.adjustment_delta_s < std::min(c.signal.green_ns_s, c.signal.green_ew_s),
          "signal.adjustment_delta_s", "must leave both phases at least 1 s of green");
  require(c.agents.controller.endowment >= Currency{}, "agents.controller.endowment", "must be >= 0");
  require(c.agents.vehicle.endowment >= Currency{}, "agents.vehicle.endowment", "must be >= 0");
  require(c.market.proposal_fee >= Currency{}, "market.proposal_fee", "must be >= 0");
  require(c.market.observe_period_s >= 1, "market.observe_period_s", "must be >= 1");
  require(c.market.observation_radius_m > 0.0, "market.observation_radius_m", "must be > 0");
  require(c.pricing.w >= 0.0 && c.pricing.w <= 1.0, "pricing.w", "must be in [0, 1]");
  require(c.pricing.conversion_rate > 0.0, "pricing.conversion_rate", "must be > 0");
  require(c.pricing.aggressive_multiplier >= 1.0, "pricing.aggressive_multiplier", "must be >= 1");
  require(c.pricing.ask_markup_aggressive > 0.0, "pricing.ask_markup_aggressive", "must be > 0");
  require(c.pricing.ask_markup_conservative > 0.0, "pricing.ask_markup_conservative", "must be > 0");
  require(c.pricing.concession_step > Currency{}, "pricing.concession_step", "must be > 0");
  require(c.pricing.max_rounds >= 1 && c.pricing.max_rounds <= 1000, "pricing.max_rounds", "must be in [1, 1000]");
  require(c.backend.timeout_s > 0.0 && c.backend.timeout_s <= 600.0, "backend.timeout_s", "must be in (0, 600]");
  require(c.backend.retries >= 0 && c.backend.retries <= 10, "backend.retries", "must be in [0, 10]");
  require(!c.backend.model.empty(), "backend.model", "must not be empty");
  require(c.run.horizon_s >= 1 && c.run.horizon_s <= 1'000'000, "run.horizon_s", "must be in [1, 1000000]");

  const auto net = c.build_network();
  (void)c.accident_link(net);
}

ScenarioConfig parse_config(std::string_view text) {
  return parse_lines(text, [](const Line&) { return false; });
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string echo_config(const ScenarioConfig& config) {
  std::string out;
  for (const auto& k : key_table()) out += fmt::format("{}={}\n", k.key, k.get(config));
  return out;
}

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> keys;
  for (const auto& k : key_table()) keys.push_back(k.key);
  return keys;
}

ReplayFixture parse_replay_fixture(std::string_view text) {
  std::vector<ReplayDecision> decisions;
  auto extra = [&](const Line& line) {
    if (line.key != "replay.decision") return false;
    auto fail = [&](const std::string& why) -> ConfigError {
      return ConfigError(Errc::config_parse_error, "replay.decision", line.number,
                         fmt::format("line {}: replay.decision: {}", line.number, why));
    };
    std::vector<std::string_view> parts;
    std::string_view rest = line.value;
    while (true) {
      const auto comma = rest.find(',');
      parts.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (parts.size() != 3) throw fail("expected t_s,accept|reject,price");
    ReplayDecision d;
    try {
      d.t_s = parse_integer<long>(parts[0]);
      d.price = parse_money(parts[2]);
    } catch (const BadValue& bad) {
      throw fail(bad.why);
    }
    if (parts[1] == "accept") d.accept = true;
    else if (parts[1] != "reject") throw fail(fmt::format("'{}' is not accept or reject", parts[1]));
    if (d.t_s < 0 || d.price < Currency{}) throw fail("time and price must be >= 0");
    for (const auto& prev : decisions)
      if (prev.t_s == d.t_s) throw fail(fmt::format("second decision at t={}", d.t_s));
    decisions.push_back(d);
    return true;
  };
  ReplayFixture f;
  f.config = parse_lines(text, extra);
  std::sort(decisions.begin(), decisions.end(), [](const auto& a, const auto& b) { return a.t_s < b.t_s; });
  f.decisions = std::move(decisions);
  return f;
}

ReplayFixture load_replay_fixture(const std::filesystem::path& path) { return parse_replay_fixture(read_file(path)); }

}  // namespace dtm::harness
