#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hatewatch {

// Raised when an argument or record violates a documented domain.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a graph would reference missing entities or break the ontology.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a pipeline stage is invoked before the stage it depends on.
class DependencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// The five topic groups. Order is the canonical report order.
enum class Group : std::uint8_t { Black, Asian, LGBTQ, Hispanic, Jewish };

inline constexpr std::array<Group, 5> kAllGroups{Group::Black, Group::Asian, Group::LGBTQ,
                                                 Group::Hispanic, Group::Jewish};

std::string_view to_string(Group g) noexcept;
// Filesystem-safe lowercase name ("black", "lgbtq", ...).
std::string_view slug(Group g) noexcept;
std::optional<Group> parse_group(std::string_view label) noexcept;
// Throws ValidationError naming the bad label.
Group require_group(std::string_view label);

// Small bitset over groups.
class GroupSet {
 public:
  constexpr GroupSet() = default;
  constexpr void insert(Group g) noexcept { bits_ |= bit(g); }
  constexpr bool contains(Group g) const noexcept { return (bits_ & bit(g)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr GroupSet& operator|=(GroupSet o) noexcept {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool operator==(const GroupSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Group g) noexcept {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(g));
  }
  std::uint8_t bits_ = 0;
};

// Calendar day in UTC, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  // Strict YYYY-MM-DD. Throws ValidationError.
  static Date parse(std::string_view text);

  constexpr std::int32_t days() const noexcept { return days_; }
  int year() const noexcept;
  unsigned month() const noexcept;
  unsigned day() const noexcept;
  std::string to_string() const;

  constexpr Date operator+(std::int32_t n) const noexcept { return Date{days_ + n}; }
  constexpr std::int32_t operator-(Date o) const noexcept { return days_ - o.days_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

// Calendar month in UTC.
class YearMonth {
 public:
  constexpr YearMonth() = default;
  constexpr YearMonth(int year, unsigned month) : index_(year * 12 + static_cast<int>(month) - 1) {}
  static YearMonth of(Date d) { return {d.year(), d.month()}; }
  // Strict YYYY-MM. Throws ValidationError.
  static YearMonth parse(std::string_view text);

  constexpr int year() const noexcept { return index_ / 12; }
  constexpr unsigned month() const noexcept { return static_cast<unsigned>(index_ % 12) + 1; }
  constexpr YearMonth next() const noexcept { return from_index(index_ + 1); }
  constexpr int index() const noexcept { return index_; }
  std::string to_string() const;
  constexpr auto operator<=>(const YearMonth&) const = default;

 private:
  static constexpr YearMonth from_index(int i) noexcept {
    YearMonth m;
    m.index_ = i;
    return m;
  }
  int index_ = 0;
};

// Inclusive on both ends.
struct DateRange {
  Date first;
  Date last;
  bool contains(Date d) const noexcept { return first <= d && d <= last; }
  std::int32_t length() const noexcept { return last - first + 1; }
};

// Seconds since epoch, UTC.
using Timestamp = std::int64_t;

// ISO-8601 "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and
// "Z" / "+HH:MM" / "-HH:MM" suffix; a bare date is midnight UTC. Throws ValidationError.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);
Date date_of(Timestamp ts) noexcept;

// An input line that could not be loaded.
struct Reject {
  std::size_t line_number = 0;
  std::string reason;
  bool operator==(const Reject&) const = default;
};

template <typename T>
struct LoadResult {
  std::vector<T> records;
  std::vector<Reject> rejects;
  std::vector<std::string> warnings;
};

// Shortest round-trip decimal for a double; "nan" for NaN.
std::string format_double(double v);

}  // namespace hatewatch
