#include "litscape/date.hpp"

#include <charconv>
#include <cstdio>

#include "litscape/errors.hpp"

namespace litscape {

using namespace std::chrono;

Date::Date(year_month_day ymd) : days_(sys_days(ymd).time_since_epoch().count()) {}

Date Date::from_ymd(int y, unsigned m, unsigned d) {
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    throw BadDate(buf);
  }
  return Date(ymd);
}

Date Date::parse(std::string_view text) {
  auto digits = [&](std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return false;
    }
    auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return res.ec == std::errc();
  };
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !digits(0, 4, y) ||
      !digits(5, 2, m) || !digits(8, 2, d)) {
    throw BadDate(std::string(text));
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw BadDate(std::string(text));
  return Date(ymd);
}

std::string Date::iso() const {
  year_month_day ymd{sys_days{days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date Date::plus_days(std::int64_t n) const { return Date(days_ + n); }

std::int64_t week_index(const Date& anchor, const Date& date) {
  std::int64_t d = days_between(anchor, date);
  std::int64_t w = d / 7;
  if (d % 7 != 0 && d < 0) --w;
  return w;
}

Date default_anchor() { return Date::from_ymd(2020, 2, 1); }

}  // namespace litscape
