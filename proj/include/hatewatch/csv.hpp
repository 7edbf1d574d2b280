#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hatewatch::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader. Quoted fields may contain commas, quotes ("") and newlines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws ValidationError on an
  // unterminated quoted field.
  std::optional<Row> next();
  // 1-based physical line where the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t physical_line_ = 0;
  std::size_t record_line_ = 0;
};

// Reads the header row and checks it equals `expected` exactly.
// Throws ValidationError naming the expected header otherwise.
void expect_header(Reader& reader, const std::vector<std::string_view>& expected);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace hatewatch::csv
