#include "hatewatch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace hatewatch::config {

namespace fs = std::filesystem;

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(std::string_view what) const {
    throw ValidationError(fmt::format("config line {}: {}", line_, what));
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(fmt::format("expected '{}'", c));
  }

  std::string quoted() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(fmt::format("unknown escape '\\{}'", e));
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string key_part() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_bare_key_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string dotted_key() {
    std::string key = key_part();
    while (consume('.')) key += "." + key_part();
    return key;
  }

  Scalar scalar() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    if (s_[pos_] == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           s_[pos_] != ' ' && s_[pos_] != '\t') {
      ++pos_;
    }
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char c : tok) {
      if (c != '_') digits.push_back(c);
    }
    if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
    const char* b = digits.data();
    const char* e = b + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e && b != e) return v;
    } else {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return v;
    }
    fail(fmt::format("cannot parse value '{}'", tok));
  }

  Value value() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '[') {
      ++pos_;
      Array items;
      while (!consume(']')) {
        items.push_back(scalar());
        if (!consume(',')) {
          expect(']');
          break;
        }
      }
      for (const auto& item : items) {
        if (item.index() != items.front().index()) fail("array mixes value types");
      }
      return items;
    }
    return std::visit([](auto&& v) -> Value { return v; }, scalar());
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

// Bracket depth outside strings, to join multi-line arrays.
int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      break;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

}  // namespace

Document parse_toml(std::string_view text) {
  Document doc;
  std::vector<std::string> lines;
  {
    std::string buf{text};
    std::istringstream in(buf);
    for (std::string l; std::getline(in, l);) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(std::move(l));
    }
  }
  std::string section;
  std::set<std::string> sections;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string line = lines[i];
    LineParser probe(line, line_no);
    if (probe.at_end_or_comment()) continue;

    if (probe.consume('[')) {
      if (probe.consume('[')) probe.fail("arrays of tables are not supported");
      section = probe.dotted_key();
      probe.expect(']');
      if (!probe.at_end_or_comment()) probe.fail("trailing characters after section header");
      if (!sections.insert(section).second) probe.fail(fmt::format("duplicate section [{}]", section));
      continue;
    }

    int depth = bracket_balance(line);
    while (depth > 0 && i + 1 < lines.size()) {
      line += " " + lines[++i];
      depth = bracket_balance(line);
    }
    LineParser p(line, line_no);
    const std::string key = p.dotted_key();
    p.expect('=');
    Value v = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!doc.emplace(full, Entry{std::move(v), line_no}).second) {
      p.fail(fmt::format("duplicate key '{}'", full));
    }
  }
  return doc;
}

namespace {

class Reader {
 public:
  Reader(const Document& doc, std::vector<std::string>& violations)
      : doc_(doc), violations_(violations) {}

  const Entry* find(std::string_view key) {
    const auto it = doc_.find(key);
    if (it == doc_.end()) return nullptr;
    used_.insert(it->first);
    return &it->second;
  }

  void bad(const Entry& e, std::string_view key, std::string_view want) {
    violations_.push_back(fmt::format("line {}: '{}' must be {}", e.line, key, want));
  }

  void get(std::string_view key, bool& out) {
    if (const Entry* e = find(key)) {
      if (const auto* b = std::get_if<bool>(&e->value)) out = *b;
      else bad(*e, key, "a boolean");
    }
  }
  void get(std::string_view key, double& out) {
    if (const Entry* e = find(key)) {
      if (const auto* d = std::get_if<double>(&e->value)) out = *d;
      else if (const auto* i = std::get_if<std::int64_t>(&e->value)) out = static_cast<double>(*i);
      else bad(*e, key, "a number");
    }
  }
  template <typename Int>
    requires std::is_integral_v<Int>
  void get(std::string_view key, Int& out) {
    if (const Entry* e = find(key)) {
      const auto* i = std::get_if<std::int64_t>(&e->value);
      if (!i || (std::is_unsigned_v<Int> && *i < 0)) {
        bad(*e, key, std::is_unsigned_v<Int> ? "a non-negative integer" : "an integer");
      } else {
        out = static_cast<Int>(*i);
      }
    }
  }
  bool get(std::string_view key, std::string& out) {
    if (const Entry* e = find(key)) {
      if (const auto* s = std::get_if<std::string>(&e->value)) {
        out = *s;
        return true;
      }
      bad(*e, key, "a string");
    }
    return false;
  }
  void get(std::string_view key, fs::path& out, const fs::path& base) {
    std::string s;
    if (get(key, s)) out = s.empty() ? fs::path{} : (fs::path(s).is_absolute() ? fs::path(s) : base / s);
  }
  void get(std::string_view key, Date& out) {
    std::string s;
    if (!get(key, s)) return;
    try {
      out = Date::parse(s);
    } catch (const ValidationError& ex) {
      violations_.push_back(fmt::format("'{}': {}", key, ex.what()));
    }
  }
  bool get(std::string_view key, std::vector<std::string>& out) {
    if (const Entry* e = find(key)) {
      const auto* a = std::get_if<Array>(&e->value);
      if (a && std::all_of(a->begin(), a->end(),
                           [](const Scalar& s) { return std::holds_alternative<std::string>(s); })) {
        out.clear();
        for (const auto& s : *a) out.push_back(std::get<std::string>(s));
        return true;
      }
      bad(*e, key, "an array of strings");
    }
    return false;
  }
  void get(std::string_view key, std::vector<Group>& out) {
    std::vector<std::string> names;
    if (!get(key, names)) return;
    out.clear();
    for (const auto& n : names) {
      if (const auto g = parse_group(n)) {
        if (std::find(out.begin(), out.end(), *g) == out.end()) out.push_back(*g);
      } else {
        violations_.push_back(fmt::format("'{}': unknown group '{}'", key, n));
      }
    }
  }
  template <typename Enum>
  void get_enum(std::string_view key, Enum& out,
                std::initializer_list<std::pair<std::string_view, Enum>> choices) {
    std::string s;
    if (!get(key, s)) return;
    for (const auto& [name, v] : choices) {
      if (name == s) {
        out = v;
        return;
      }
    }
    std::string names;
    for (const auto& c : choices) names += (names.empty() ? "" : ", ") + std::string(c.first);
    violations_.push_back(fmt::format("'{}': '{}' is not one of {}", key, s, names));
  }

  // Keys under a prefix ("communities.min_size.").
  std::vector<std::string> keys_with_prefix(std::string_view prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, e] : doc_) {
      if (k.starts_with(prefix)) out.push_back(k);
    }
    return out;
  }

  void report_unknown() {
    for (const auto& [k, e] : doc_) {
      if (!used_.contains(k)) violations_.push_back(fmt::format("line {}: unknown key '{}'", e.line, k));
    }
  }

 private:
  const Document& doc_;
  std::vector<std::string>& violations_;
  std::set<std::string, std::less<>> used_;
};

[[noreturn]] void throw_violations(const std::vector<std::string>& v) {
  std::string msg = "invalid configuration:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ValidationError(msg);
}

}  // namespace

std::size_t PipelineConfig::min_size_for(Group g) const {
  const auto it = min_community_size.find(g);
  return it == min_community_size.end() ? 1 : it->second;
}

std::vector<std::string> PipelineConfig::violations() const {
  std::vector<std::string> v;
  const auto input = [&](std::string_view name, const fs::path& p) {
    if (p.empty()) v.push_back(fmt::format("paths.{} is not set", name));
    else if (!fs::exists(p)) v.push_back(fmt::format("paths.{}: '{}' does not exist", name, p.string()));
  };
  input("tweets", paths.tweets);
  input("crimes", paths.crimes);
  input("keywords", paths.keywords);
  input("lexicon", paths.lexicon);
  input("modifiers", paths.modifiers);
  input("assignments", paths.assignments);
  input("group_map", paths.group_map);
  if (paths.output_dir.empty()) v.push_back("paths.output_dir is not set");

  if (crime_range.last < crime_range.first) v.push_back("ingest: crime_end precedes crime_start");
  if (!(threshold.theta > 0.0 && threshold.theta <= 1.0)) {
    v.push_back(fmt::format("topics.theta = {} must be in (0, 1]", threshold.theta));
  }
  if (!(strong_threshold >= 0.0 && strong_threshold < 1.0)) {
    v.push_back(fmt::format("sentiment.strong_threshold = {} must be in [0, 1)", strong_threshold));
  }
  if (series_range.last < series_range.first) {
    v.push_back("timeseries: end precedes start");
  } else if (window < 1 || window > series_range.length()) {
    v.push_back(fmt::format("timeseries.window = {} must be in [1, {}]", window, series_range.length()));
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) v.push_back(fmt::format("communities.gamma = {} must be in (0, 1]", gamma));
  if (!(resolution > 0.0)) v.push_back(fmt::format("communities.resolution = {} must be > 0", resolution));
  for (const auto& [g, n] : min_community_size) {
    if (n < 1) v.push_back(fmt::format("communities.min_size.{} must be >= 1", to_string(g)));
  }
  if (min_tweets < 1) v.push_back("usernet.min_tweets must be >= 1");
  if (!(bin_width > 0.0)) v.push_back(fmt::format("usernet.bin_width = {} must be > 0", bin_width));
  if (min_bin_users < 1) v.push_back("usernet.min_bin_users must be >= 1");
  if (!(prune_epsilon >= 0.0)) v.push_back("usernet.prune_epsilon must be >= 0");
  return v;
}

PipelineConfig from_document(const Document& doc, const fs::path& base_dir) {
  PipelineConfig c;
  std::vector<std::string> v;
  Reader r(doc, v);

  r.get("seed", c.seed);
  r.get("paths.tweets", c.paths.tweets, base_dir);
  r.get("paths.crimes", c.paths.crimes, base_dir);
  r.get("paths.keywords", c.paths.keywords, base_dir);
  r.get("paths.lexicon", c.paths.lexicon, base_dir);
  r.get("paths.modifiers", c.paths.modifiers, base_dir);
  r.get("paths.assignments", c.paths.assignments, base_dir);
  r.get("paths.group_map", c.paths.group_map, base_dir);
  r.get("paths.output_dir", c.paths.output_dir, base_dir);

  r.get("ingest.crime_start", c.crime_range.first);
  r.get("ingest.crime_end", c.crime_range.last);

  r.get("topics.theta", c.threshold.theta);
  r.get_enum("topics.threshold_scope", c.threshold.scope,
             {{"all", topics::ThresholdScope::AllTweets},
              {"miscellaneous", topics::ThresholdScope::MiscellaneousOnly}});
  r.get("topics.miscellaneous_topic", c.threshold.miscellaneous_topic);

  r.get("sentiment.strong_threshold", c.strong_threshold);

  r.get("timeseries.window", c.window);
  r.get_enum("timeseries.rolling_start", c.rolling_start,
             {{"expanding", timeseries::RollingStart::Expanding},
              {"drop", timeseries::RollingStart::Drop}});
  r.get("timeseries.smooth_crimes", c.smooth_crimes);
  r.get("timeseries.start", c.series_range.first);
  r.get("timeseries.end", c.series_range.last);

  std::vector<std::string> exports;
  if (r.get("kg.exports", exports)) {
    for (const auto& e : exports) {
      try {
        const auto f = kg::parse_export_format(e);
        if (f != kg::ExportFormat::EdgeListCsv &&
            std::find(c.kg_exports.begin(), c.kg_exports.end(), f) == c.kg_exports.end()) {
          c.kg_exports.push_back(f);
        }
      } catch (const ValidationError& ex) {
        v.push_back(fmt::format("kg.exports: {}", ex.what()));
      }
    }
  }

  r.get("communities.groups", c.community_groups);
  r.get("communities.gamma", c.gamma);
  r.get("communities.resolution", c.resolution);
  r.get_enum("communities.averaging", c.averaging,
             {{"tweet", communities::SentimentAveraging::PerTweet},
              {"user", communities::SentimentAveraging::PerUser}});
  for (const auto& key : r.keys_with_prefix("communities.min_size.")) {
    const std::string name = key.substr(std::string_view("communities.min_size.").size());
    const auto g = parse_group(name);
    std::int64_t n = 0;
    r.get(key, n);
    if (!g) {
      v.push_back(fmt::format("'{}': unknown group '{}'", key, name));
    } else if (n < 1) {
      v.push_back(fmt::format("'{}' must be >= 1", key));
    } else {
      c.min_community_size[*g] = static_cast<std::size_t>(n);
    }
  }

  r.get("usernet.groups", c.usernet_groups);
  r.get("usernet.min_tweets", c.min_tweets);
  r.get("usernet.bin_width", c.bin_width);
  r.get("usernet.min_bin_users", c.min_bin_users);
  r.get("usernet.threshold_weights", c.threshold_weights);
  r.get("usernet.prune_epsilon", c.prune_epsilon);
  r.get("usernet.top_users", c.top_users);

  r.report_unknown();
  for (auto& s : c.violations()) v.push_back(std::move(s));
  if (!v.empty()) throw_violations(v);
  return c;
}

PipelineConfig load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read config file '{}'", file.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  PipelineConfig c = from_document(parse_toml(buf.str()), file.parent_path());

  std::vector<std::string> v;
  if (const char* dir = std::getenv("HATEWATCH_OUTPUT_DIR"); dir && *dir) c.paths.output_dir = dir;
  if (const char* seed = std::getenv("HATEWATCH_SEED"); seed && *seed) {
    const std::string_view s(seed);
    std::uint64_t value = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || p != s.data() + s.size()) {
      v.push_back(fmt::format("HATEWATCH_SEED='{}' is not a non-negative integer", s));
    } else {
      c.seed = value;
    }
  }
  for (auto& s : c.violations()) v.push_back(std::move(s));
  if (!v.empty()) throw_violations(v);
  return c;
}

std::string_view to_string(topics::ThresholdScope s) noexcept {
  return s == topics::ThresholdScope::AllTweets ? "all" : "miscellaneous";
}

std::string_view to_string(timeseries::RollingStart s) noexcept {
  return s == timeseries::RollingStart::Expanding ? "expanding" : "drop";
}

std::string_view to_string(communities::SentimentAveraging a) noexcept {
  return a == communities::SentimentAveraging::PerTweet ? "tweet" : "user";
}

std::string_view to_string(kg::ExportFormat f) noexcept {
  switch (f) {
    case kg::ExportFormat::EdgeListCsv: return "csv";
    case kg::ExportFormat::Dot: return "dot";
    case kg::ExportFormat::GraphML: return "graphml";
  }
  return "";
}

}  // namespace hatewatch::config
