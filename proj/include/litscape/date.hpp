#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace litscape {

// A calendar day. Stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  explicit Date(std::chrono::year_month_day ymd);

  // Parses strict ISO-8601 "YYYY-MM-DD". Throws BadDate.
  static Date parse(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::string iso() const;
  std::int64_t days_since_epoch() const { return days_; }
  Date plus_days(std::int64_t n) const;

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit constexpr Date(std::int64_t days) : days_(days) {}
  std::int64_t days_ = 0;
};

// Signed day difference a - b.
inline std::int64_t days_between(const Date& b, const Date& a) {
  return a.days_since_epoch() - b.days_since_epoch();
}

// Week index relative to anchor using floor division (negative before the anchor).
std::int64_t week_index(const Date& anchor, const Date& date);

// Default timeline anchor, 2020-02-01.
Date default_anchor();

}  // namespace litscape
