#include "dtm/currency.hpp"
#include "dtm/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace dtm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_scenario: return "InvalidScenario";
    case Errc::unknown_vehicle: return "UnknownVehicle";
    case Errc::unknown_link: return "UnknownLink";
    case Errc::invalid_adjustment: return "InvalidAdjustment";
    case Errc::duplicate_agent: return "DuplicateAgent";
    case Errc::unknown_agent: return "UnknownAgent";
    case Errc::insufficient_funds: return "InsufficientFunds";
    case Errc::proposal_closed: return "ProposalClosed";
    case Errc::unknown_proposal: return "UnknownProposal";
    case Errc::out_of_order: return "OutOfOrder";
    case Errc::no_agreement: return "NoAgreement";
    case Errc::empty_population: return "EmptyPopulation";
    case Errc::backend_unavailable: return "BackendUnavailable";
    case Errc::timeout: return "Timeout";
    case Errc::transport_error: return "TransportError";
    case Errc::auth_error: return "AuthError";
    case Errc::rate_limited: return "RateLimited";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::config_parse_error: return "ConfigParseError";
    case Errc::config_range_error: return "ConfigRangeError";
    case Errc::replay_error: return "ReplayError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

Currency Currency::from_double(double value) {
  return Currency(static_cast<std::int64_t>(std::llround(value * 100.0)));
}

std::optional<Currency> Currency::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2 || (dot != std::string_view::npos && frac.empty())) return std::nullopt;

  std::int64_t units = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;

  std::int64_t hundredths = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    hundredths *= 10;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') return std::nullopt;
      hundredths += frac[i] - '0';
    }
  }
  std::int64_t cents = units * 100 + hundredths;
  return Currency(negative ? -cents : cents);
}

std::string Currency::str() const {
  std::int64_t mag = cents_ < 0 ? -cents_ : cents_;
  return fmt::format("{}{}.{:02}", cents_ < 0 ? "-" : "", mag / 100, mag % 100);
}

}  // namespace dtm
