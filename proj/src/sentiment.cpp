#include "hatewatch/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "hatewatch/common.hpp"

namespace hatewatch::sentiment {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  for (;;) {
    const std::size_t j = s.find(sep, i);
    out.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("lexicon line {}: '{}' is not a number", line, s));
  }
  return v;
}

bool skip_line(std::string_view line) { return line.empty() || line.front() == '#'; }

}  // namespace

void Lexicon::set_valence(std::string token, double valence) {
  if (!(valence >= -4.0 && valence <= 4.0)) {
    throw ValidationError(fmt::format("valence {} of '{}' outside [-4, 4]", valence, token));
  }
  valence_.insert_or_assign(std::move(token), valence);
}

void Lexicon::set_booster(std::string token, double increment) {
  if (!(increment >= -1.0 && increment <= 1.0)) {
    throw ValidationError(fmt::format("booster {} of '{}' outside [-1, 1]", increment, token));
  }
  boosters_.insert_or_assign(std::move(token), increment);
}

void Lexicon::add_negator(std::string token) { negators_.insert(std::move(token)); }

std::optional<double> Lexicon::valence(std::string_view token) const {
  const auto it = valence_.find(token);
  if (it == valence_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Lexicon::booster(std::string_view token) const {
  const auto it = boosters_.find(token);
  if (it == boosters_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::is_negator(std::string_view token) const { return negators_.contains(token); }

void Lexicon::read_valences(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    const auto cols = split(line, '\t');
    if (cols.size() < 2 || cols[0].empty()) {
      throw ValidationError(fmt::format("lexicon line {}: expected token<TAB>valence", n));
    }
    set_valence(std::string(cols[0]), parse_real(cols[1], n));
  }
}

void Lexicon::read_modifiers(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line)) continue;
    const auto cols = split(line, '\t');
    if (cols.size() < 2 || cols[0].empty()) {
      throw ValidationError(fmt::format("modifier line {}: expected token<TAB>kind<TAB>value", n));
    }
    if (cols[1] == "booster") {
      if (cols.size() < 3) throw ValidationError(fmt::format("modifier line {}: missing value", n));
      set_booster(std::string(cols[0]), parse_real(cols[2], n));
    } else if (cols[1] == "negator") {
      add_negator(std::string(cols[0]));
    } else {
      throw ValidationError(fmt::format("modifier line {}: unknown kind '{}'", n, cols[1]));
    }
  }
}

Lexicon Lexicon::load(std::istream& valences, std::istream& modifiers) {
  Lexicon lex;
  lex.read_valences(valences);
  lex.read_modifiers(modifiers);
  return lex;
}

double normalize(double sum, double alpha) {
  const double v = sum / std::sqrt(sum * sum + alpha);
  return std::clamp(v, -1.0, 1.0);
}

bool classify_strong(double compound, double threshold) {
  if (!(compound >= -1.0 && compound <= 1.0)) {
    throw ValidationError(fmt::format("compound score {} outside [-1, 1]", compound));
  }
  return std::abs(compound) > threshold;
}

SentimentScore score(std::string_view clean_text, const Lexicon& lexicon,
                     double strong_threshold) {
  std::vector<std::string_view> tokens;
  for (auto tok : split(clean_text, ' ')) {
    if (!tok.empty()) tokens.push_back(tok);
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto base = lexicon.valence(tokens[i]);
    if (!base) continue;
    double v = *base;
    for (int d = 1; d <= kLookback && static_cast<std::size_t>(d) <= i; ++d) {
      const auto prev = tokens[i - static_cast<std::size_t>(d)];
      if (const auto inc = lexicon.booster(prev)) {
        const double scaled = *inc * kBoosterDamping[d - 1];
        if (v > 0) {
          v += scaled;
        } else if (v < 0) {
          v -= scaled;
        }
      }
      if (lexicon.is_negator(prev)) v *= kNegationScalar;
    }
    sum += v;
  }

  SentimentScore s;
  s.compound = normalize(sum);
  s.is_strong = std::abs(s.compound) > strong_threshold;
  return s;
}

}  // namespace hatewatch::sentiment
