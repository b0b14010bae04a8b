#pragma once

#include <optional>
#include <string>
#include <vector>

#include "substrum/bicoincidence.hpp"
#include "substrum/eigenvalues.hpp"
#include "substrum/reduction.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

enum class Verdict { PurelyDiscrete, Singular, Inconclusive };

enum class Reason {
  DekkingCoincidence,
  NoSqrtQEigenvalue,
  SecondEigenvalueSmall,
  SqrtQPresent,
  NumericallyAmbiguous,
  PreconditionFailed,
};

std::string to_string(Verdict v);
std::string to_string(Reason r);

struct VerdictEvidence {
  std::optional<std::size_t> q;
  std::optional<unsigned long> h;
  std::optional<bool> primitive;
  std::optional<bool> aperiodic;
  std::optional<EigenvalueSet> eigenvalues;
  std::optional<SqrtQCheck> sqrt_q;
  std::optional<Decision> second_eigenvalue_small;
  std::optional<PureBase> pure_base;
  /// Ergodic classes of the pure base, on which the coincidence test runs.
  std::optional<ErgodicClassification> classes;
};

struct SpectralVerdict {
  Verdict verdict = Verdict::Inconclusive;
  Reason reason = Reason::PreconditionFailed;
  /// Every criterion that fired, the deciding one first.
  std::vector<Reason> reasons;
  /// Set for PreconditionFailed: not-constant-length, not-primitive, periodic, pansiot-precondition.
  std::string detail;
  std::string note;
  VerdictEvidence evidence;

  /// "Singular(NoSqrtQEigenvalue)", "Inconclusive(PreconditionFailed(periodic))", ...
  std::string summary() const;
  /// The eigenvalue group e(Z(q) x Z/hZ), described by q and h.
  std::string eigenvalue_group() const;
};

struct ClassifyOptions {
  unsigned precision_bits = kDefaultPrecisionBits;
  std::size_t symbol_budget = kDefaultSymbolBudget;
};

SpectralVerdict classify(const Substitution& z, const ClassifyOptions& options = {});

}  // namespace substrum
