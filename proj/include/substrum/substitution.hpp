#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "substrum/matrix.hpp"

namespace substrum {

/// Dense letter index into an Alphabet.
using Letter = std::uint16_t;
using Word = std::vector<Letter>;

/// Upper bound on fixed-point and image lengths materialized by default.
inline constexpr std::size_t kDefaultSymbolBudget = std::size_t{1} << 31;

/// Ordered list of distinct, nonempty letter tokens.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(Letter a) const { return tokens_.at(a); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::optional<Letter> find(std::string_view token) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Letter> index_;
};

/// A map from letters to nonempty words over the same alphabet.
class Substitution {
 public:
  Substitution(Alphabet alphabet, std::vector<Word> images);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return alphabet_.size(); }
  const Word& image(Letter a) const { return images_.at(a); }
  const std::vector<Word>& images() const noexcept { return images_; }

  /// Concatenation of the images of the letters of w.
  Word apply(std::span<const Letter> w) const;

  /// Canonical text in the rule language accepted by parse_substitution.
  std::string to_dsl() const;

  /// Stable 64-bit FNV-1a digest of to_dsl().
  std::uint64_t hash() const;

  std::string render(std::span<const Letter> w, std::string_view sep = " ") const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.alphabet_ == b.alphabet_ && a.images_ == b.images_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Word> images_;
};

/// Parses `<letter> -> <letter> <letter> ...` rules, one per line; '#' starts a comment line.
Substitution parse_substitution(std::string_view text);

/// Entry (a, b) counts the occurrences of a in the image of b.
IntMatrix substitution_matrix(const Substitution& z);

struct PrimitivityResult {
  bool primitive = false;
  std::optional<unsigned> witness_power;
};

/// Least n <= max_power with S^n > 0 entrywise. Default bound is m^2 + 1.
PrimitivityResult is_primitive(const Substitution& z, std::optional<unsigned> max_power = {});

std::optional<std::size_t> constant_length(const Substitution& z);

struct SeedLetter {
  Letter letter = 0;
  unsigned power = 1;
};

/// A letter a and the least power p <= m such that z^p(a) starts with a.
/// Among letters the least p wins, ties broken by letter index.
SeedLetter seed_letter(const Substitution& z);

/// First target_len symbols of the one-sided fixed point of z^seed.power started at seed.letter.
Word fixed_point_prefix(const Substitution& z, SeedLetter seed, std::size_t target_len,
                        std::size_t budget = kDefaultSymbolBudget);

/// All length-`length` factors of the language of z, by closure under z.
std::set<Word> allowed_words(const Substitution& z, std::size_t length);

struct AperiodicityResult {
  /// Empty when the test does not apply (z not injective on letters).
  std::optional<bool> aperiodic;
  std::string reason;
};

/// Pansiot's neighbourhood test for primitive constant-length substitutions.
AperiodicityResult is_aperiodic_pansiot(const Substitution& z);

/// The substitution a -> z^j(a).
Substitution power_substitution(const Substitution& z, unsigned j,
                                std::size_t budget = kDefaultSymbolBudget);

/// True iff z is injective on letters.
bool injective_on_letters(const Substitution& z);

}  // namespace substrum
