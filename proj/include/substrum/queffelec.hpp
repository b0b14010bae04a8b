#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "substrum/bicoincidence.hpp"
#include "substrum/matrix.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

using CMatrix = Matrix<std::complex<double>>;

/// q-eigenspace F of C^t in the class chart: basis[i] is the vector on A x A that
/// equals 1 on class i and 0 on the other classes.
struct EigenspaceF {
  std::size_t k = 0;
  std::size_t alphabet_size = 0;
  std::vector<std::vector<Rational>> basis;
  /// Whether every vector of F vanishes on the transitive pairs.
  bool zero_on_transitive = true;

  /// The pair vector sum_i w_i basis[i].
  std::vector<Rational> vector_at(const std::vector<Rational>& w) const;
};

EigenspaceF eigenspace_F(const Substitution& z, const ErgodicClassification& classes);
EigenspaceF eigenspace_F(const Substitution& z);

/// The m x m matrix (v_ab) of a pair vector.
RatMatrix associated_matrix(const std::vector<Rational>& v, std::size_t m);
CMatrix associated_matrix(const EigenspaceF& f, const std::vector<std::complex<double>>& w);

/// Letter frequencies: the normalized kernel of S - qI.
std::vector<Rational> letter_frequencies(const Substitution& z);

/// Exact positive semidefiniteness of a symmetric rational matrix.
bool is_psd(const RatMatrix& m);

struct ExtremePoint {
  /// Class chart coordinates (w_0, ..., w_{k-1}), w_0 = 1.
  std::vector<std::complex<double>> w;
  std::optional<std::vector<Rational>> exact;
};

struct ExtremePoints {
  std::vector<ExtremePoint> points;
  /// Solved exactly in the simultaneously diagonalizable case.
  bool exact = false;
  /// Produced by the numeric fallback.
  bool numeric = false;
  /// The fallback did not find exactly k points.
  bool partial = false;
  std::string method;
};

/// Extreme points of Q = {v in F : W(v) Hermitian PSD, v_aa = 1}; all-ones first.
ExtremePoints extreme_points_Q(const Substitution& z, const ErgodicClassification& classes, const EigenspaceF& f);
ExtremePoints extreme_points_Q(const Substitution& z);
/// The numeric route alone, used when the class matrices do not commute.
ExtremePoints extreme_points_Q_numeric(const ErgodicClassification& classes, const EigenspaceF& f);

struct CylindricalGenerator {
  double weight = 0;
  /// Coefficients b_a of f = sum_a b_a 1_a, with W = sum_j b_j b_j^*.
  std::vector<std::complex<double>> coeffs;
  /// sum_a b_a mu[a]
  std::complex<double> mean;
};

struct CylindricalDecomposition {
  std::vector<CylindricalGenerator> generators;
  double reconstruction_error = 0;
  double max_mean = 0;
};

/// Splits the measure v Sigma into spectral measures of cylindrical functions.
CylindricalDecomposition decompose_lambda(const CMatrix& w, const std::vector<double>& mu);

}  // namespace substrum
