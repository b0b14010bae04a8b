#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "substrum/matrix.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

/// Pair (a, b) is letter a * m + b of the bi-substitution.
inline std::size_t pair_index(std::size_t a, std::size_t b, std::size_t m) { return a * m + b; }
inline std::pair<std::size_t, std::size_t> pair_letters(std::size_t p, std::size_t m) { return {p / m, p % m}; }

/// The square substitution on A x A, letters named "(a,b)".
Substitution bisubstitution(const Substitution& z);

/// Substitution matrix of the bi-substitution (m^2 x m^2).
IntMatrix coincidence_matrix(const Substitution& z);

struct ErgodicClassification {
  /// classes[0] is the diagonal. Each class is a sorted list of pair indices.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> transitive;
  std::size_t k = 0;
  /// Cyclic period of the pair graph on each class.
  std::vector<unsigned> periods;
  /// lcm of the periods: the restriction of C^j to each class splits into
  /// primitive blocks, and is primitive when the period is 1.
  unsigned stabilizing_power = 1;
  /// Class index per pair, -1 on T.
  std::vector<int> membership;
  std::size_t alphabet_size = 0;
};

ErgodicClassification ergodic_classes(const Substitution& z);

/// Pure discrete spectrum iff E_0 is the only ergodic class. Requires height 1.
bool dekking_pure_discrete(const Substitution& z);
bool dekking_pure_discrete(const ErgodicClassification& classes);

struct BijectivityProfile {
  bool bijective = false;
  /// Meaningful only for bijective substitutions.
  std::optional<bool> abelian;
  /// Column maps a -> z(a)_i, one per position.
  std::vector<std::vector<Letter>> position_maps;
};

BijectivityProfile bijectivity_profile(const Substitution& z);

}  // namespace substrum
