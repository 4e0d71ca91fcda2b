#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtm {

enum class Errc {
  invalid_argument,
  invalid_scenario,
  unknown_vehicle,
  unknown_link,
  invalid_adjustment,
  duplicate_agent,
  unknown_agent,
  insufficient_funds,
  proposal_closed,
  unknown_proposal,
  out_of_order,
  no_agreement,
  empty_population,
  backend_unavailable,
  timeout,
  transport_error,
  auth_error,
  rate_limited,
  malformed_response,
  config_parse_error,
  config_range_error,
  replay_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure surfaced by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Configuration failures carry the offending line (parse errors) or key (range errors).
class ConfigError : public Error {
 public:
  ConfigError(Errc code, std::string key, int line, const std::string& what)
      : Error(code, what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace dtm
