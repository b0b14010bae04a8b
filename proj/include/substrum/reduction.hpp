#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "substrum/poly.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

struct HeightInfo {
  unsigned long g0 = 1;
  unsigned long h = 1;
  std::size_t prefix_len_used = 0;
};

/// g0 = gcd{k >= 1 : u_k = u_0} over fixed-point prefixes starting at q^4 (at least
/// 1024 symbols) and doubling until it is unchanged across two consecutive doublings;
/// h is the largest divisor of g0 coprime to q.
HeightInfo compute_height(const Substitution& z, std::size_t budget = kDefaultSymbolBudget);

/// Dekking's pure base: eta acts on the h-blocks of U that start at multiples of h.
struct PureBase {
  Substitution eta;
  /// phi[i] is the block of original letters named by letter i of eta.
  std::vector<Word> phi;
  unsigned long height = 1;
  HeightInfo height_info;
};

PureBase pure_base(const Substitution& z, std::size_t budget = kDefaultSymbolBudget);
PureBase pure_base(const Substitution& z, const HeightInfo& info, std::size_t budget = kDefaultSymbolBudget);

/// phi(eta(i)) == z(phi(i)) for every block letter i.
bool verify_conjugacy(const Substitution& z, const PureBase& base);

struct ReturnWordSystem {
  Word prefix;
  /// Return words in order of first appearance in U.
  std::vector<Word> words;
  /// The induced substitution on return words (letters r0, r1, ...).
  Substitution theta;
  std::size_t max_gap = 0;
  std::size_t prefix_len_used = 0;
  /// Power of z used (the seed power).
  unsigned power = 1;
};

/// Return words to the prefix u of U and the substitution they induce.
ReturnWordSystem return_words(const Substitution& z, const Word& u, std::size_t budget = kDefaultSymbolBudget);

/// Splits a word that starts with u into return words at the occurrences of u.
std::vector<Word> split_at_occurrences(const Word& w, const Word& u);

struct SpectrumComparison {
  bool trivial = false;
  IntPoly leftover_first;
  IntPoly leftover_second;
};

/// Removes every factor x and every cyclotomic factor.
IntPoly strip_zero_and_roots_of_unity(const IntPoly& p);

/// Whether two characteristic polynomials differ only by 0 and roots of unity.
SpectrumComparison spectrum_difference_is_trivial(const IntPoly& p1, const IntPoly& p2);

}  // namespace substrum
