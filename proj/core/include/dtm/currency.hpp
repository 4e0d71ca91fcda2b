#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dtm {

/// Fixed-point money with 0.01 resolution. All ledger arithmetic is exact.
class Currency {
 public:
  constexpr Currency() = default;

  static constexpr Currency from_cents(std::int64_t cents) { return Currency(cents); }

  /// Rounds to the nearest cent, halves away from zero.
  static Currency from_double(double value);

  /// Accepts "12", "12.5", "12.50", "-0.01". At most two fractional digits.
  static std::optional<Currency> parse(std::string_view text);

  constexpr std::int64_t cents() const { return cents_; }
  double to_double() const { return static_cast<double>(cents_) / 100.0; }

  /// Always two fractional digits, e.g. "36.00".
  std::string str() const;

  constexpr Currency operator+(Currency o) const { return Currency(cents_ + o.cents_); }
  constexpr Currency operator-(Currency o) const { return Currency(cents_ - o.cents_); }
  constexpr Currency operator-() const { return Currency(-cents_); }
  constexpr Currency& operator+=(Currency o) {
    cents_ += o.cents_;
    return *this;
  }
  constexpr Currency& operator-=(Currency o) {
    cents_ -= o.cents_;
    return *this;
  }

  constexpr auto operator<=>(const Currency&) const = default;

 private:
  constexpr explicit Currency(std::int64_t cents) : cents_(cents) {}

  std::int64_t cents_ = 0;
};

}  // namespace dtm
