#include "hatewatch/csv.hpp"

#include <fmt/format.h>

#include "hatewatch/common.hpp"

namespace hatewatch::csv {

std::optional<Row> Reader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++physical_line_;
  record_line_ = physical_line_;

  Row row;
  std::string field;
  bool in_quotes = false;
  for (;;) {
    if (!line.empty() && line.back() == '\r' && !in_quotes) line.pop_back();
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    if (!in_quotes) break;
    field.push_back('\n');
    if (!std::getline(in_, line)) {
      throw ValidationError(
          fmt::format("unterminated quoted field starting on line {}", record_line_));
    }
    ++physical_line_;
  }
  row.push_back(std::move(field));
  return row;
}

void expect_header(Reader& reader, const std::vector<std::string_view>& expected) {
  auto header = reader.next();
  bool ok = header && header->size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = (*header)[i] == expected[i];
  if (!ok) throw ValidationError(fmt::format("expected CSV header '{}'", fmt::join(expected, ",")));
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace hatewatch::csv
