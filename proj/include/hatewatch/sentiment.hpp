#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace hatewatch::sentiment {

// Normalization constant of the compound score, S / sqrt(S^2 + alpha).
inline constexpr double kAlpha = 15.0;
// Multiplier applied to a valence for each negator in its lookback window.
inline constexpr double kNegationScalar = -0.74;
// Tokens inspected before a valence token for boosters and negators.
inline constexpr int kLookback = 3;
// Booster damping by distance 1, 2, 3.
inline constexpr double kBoosterDamping[kLookback] = {1.0, 0.95, 0.9};
inline constexpr double kStrongThreshold = 0.5;

class Lexicon {
 public:
  // Throws ValidationError when valence is outside [-4, 4].
  void set_valence(std::string token, double valence);
  // Throws ValidationError when the increment is outside [-1, 1].
  void set_booster(std::string token, double increment);
  void add_negator(std::string token);

  std::optional<double> valence(std::string_view token) const;
  std::optional<double> booster(std::string_view token) const;
  bool is_negator(std::string_view token) const;

  std::size_t valence_count() const noexcept { return valence_.size(); }
  std::size_t booster_count() const noexcept { return boosters_.size(); }
  std::size_t negator_count() const noexcept { return negators_.size(); }

  // `token<TAB>valence[<TAB>ignored...]` per line; extra columns allow the
  // reference four-column lexicon to be used as-is. '#' lines are comments.
  void read_valences(std::istream& in);
  // `token<TAB>kind<TAB>value` with kind "booster" or "negator"
  // (the value of a negator is ignored and may be omitted).
  void read_modifiers(std::istream& in);

  static Lexicon load(std::istream& valences, std::istream& modifiers);

 private:
  // Heterogeneous lookup keeps scoring allocation-free.
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, double, Hash, std::equal_to<>> valence_;
  std::unordered_map<std::string, double, Hash, std::equal_to<>> boosters_;
  std::unordered_set<std::string, Hash, std::equal_to<>> negators_;
};

struct SentimentScore {
  double compound = 0.0;
  bool is_strong = false;
};

// S / sqrt(S^2 + alpha), clamped to [-1, 1].
double normalize(double sum, double alpha = kAlpha);

// |compound| > threshold. Throws ValidationError for compound outside [-1, 1].
bool classify_strong(double compound, double threshold = kStrongThreshold);

// Sum of lexicon valences over whitespace tokens, each adjusted by boosters and
// negators among the preceding kLookback tokens, normalized to [-1, 1].
SentimentScore score(std::string_view clean_text, const Lexicon& lexicon,
                     double strong_threshold = kStrongThreshold);

}  // namespace hatewatch::sentiment
