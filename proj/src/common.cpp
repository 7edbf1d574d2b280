#include "hatewatch/common.hpp"

#include <charconv>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace hatewatch {

namespace {

constexpr std::array<std::string_view, 5> kGroupLabels{"Black", "Asian", "LGBTQ+", "Hispanic",
                                                       "Jewish"};
constexpr std::array<std::string_view, 5> kGroupSlugs{"black", "asian", "lgbtq", "hispanic",
                                                      "jewish"};

template <typename T>
bool parse_digits(std::string_view s, T& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::chrono::year_month_day to_ymd(Date d) {
  return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{d.days()}}};
}

}  // namespace

std::string_view to_string(Group g) noexcept { return kGroupLabels[static_cast<std::size_t>(g)]; }

std::string_view slug(Group g) noexcept { return kGroupSlugs[static_cast<std::size_t>(g)]; }

std::optional<Group> parse_group(std::string_view label) noexcept {
  for (std::size_t i = 0; i < kGroupLabels.size(); ++i) {
    if (label == kGroupLabels[i] || label == kGroupSlugs[i]) return static_cast<Group>(i);
  }
  if (label == "LGBTQ") return Group::LGBTQ;
  return std::nullopt;
}

Group require_group(std::string_view label) {
  if (auto g = parse_group(label)) return *g;
  throw ValidationError(fmt::format("unknown group label '{}'", label));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw ValidationError(fmt::format("invalid date {}-{}-{}", year, month, day));
  return Date{static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    throw ValidationError(fmt::format("malformed date '{}' (expected YYYY-MM-DD)", text));
  }
  return from_ymd(y, m, d);
}

int Date::year() const noexcept { return static_cast<int>(to_ymd(*this).year()); }
unsigned Date::month() const noexcept { return static_cast<unsigned>(to_ymd(*this).month()); }
unsigned Date::day() const noexcept { return static_cast<unsigned>(to_ymd(*this).day()); }

std::string Date::to_string() const {
  return fmt::format("{:04d}-{:02d}-{:02d}", year(), month(), day());
}

YearMonth YearMonth::parse(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  if (text.size() != 7 || text[4] != '-' || !parse_digits(text.substr(0, 4), y) ||
      !parse_digits(text.substr(5, 2), m) || m < 1 || m > 12) {
    throw ValidationError(fmt::format("malformed month '{}' (expected YYYY-MM)", text));
  }
  return {y, m};
}

std::string YearMonth::to_string() const { return fmt::format("{:04d}-{:02d}", year(), month()); }

Timestamp parse_timestamp(std::string_view text) {
  auto fail = [&]() -> Timestamp {
    throw ValidationError(fmt::format("malformed ISO-8601 timestamp '{}'", text));
  };
  if (text.size() < 10) return fail();
  const Date day = Date::parse(text.substr(0, 10));
  Timestamp secs = static_cast<Timestamp>(day.days()) * 86400;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return secs;
  if (rest.front() != 'T' && rest.front() != ' ') return fail();
  rest.remove_prefix(1);
  int hh = 0, mm = 0, ss = 0;
  if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':' || !parse_digits(rest.substr(0, 2), hh) ||
      !parse_digits(rest.substr(3, 2), mm) || !parse_digits(rest.substr(6, 2), ss) || hh > 23 ||
      mm > 59 || ss > 60) {
    return fail();
  }
  secs += hh * 3600 + mm * 60 + ss;
  rest.remove_prefix(8);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    std::size_t n = 0;
    while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
    if (n == 0) return fail();
    rest.remove_prefix(n);
  }
  if (rest.empty() || rest == "Z") return secs;
  if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    int oh = 0, om = 0;
    if (!parse_digits(rest.substr(1, 2), oh) || !parse_digits(rest.substr(4, 2), om)) return fail();
    const Timestamp offset = oh * 3600 + om * 60;
    return rest[0] == '+' ? secs - offset : secs + offset;
  }
  return fail();
}

std::string format_timestamp(Timestamp ts) {
  const Date d = date_of(ts);
  const Timestamp sod = ts - static_cast<Timestamp>(d.days()) * 86400;
  return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", d.to_string(), sod / 3600, (sod / 60) % 60,
                     sod % 60);
}

Date date_of(Timestamp ts) noexcept {
  Timestamp day = ts / 86400;
  if (ts % 86400 < 0) --day;
  return Date{static_cast<std::int32_t>(day)};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

}  // namespace hatewatch
