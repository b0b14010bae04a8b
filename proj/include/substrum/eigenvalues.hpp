#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "substrum/matrix.hpp"
#include "substrum/poly.hpp"

namespace substrum {

using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 256;
inline constexpr unsigned kMaxPrecisionBits = 8192;

/// Characteristic polynomial det(xI - M), computed division-free (Berkowitz).
IntPoly char_poly(const IntMatrix& m);
IntPoly char_poly(const Matrix<BigInt>& m);

/// Square-free integer factor of a characteristic polynomial.
struct PolyFactor {
  IntPoly poly;
  unsigned multiplicity = 1;
  /// Certified irreducible over Q (always true below degree 17).
  bool irreducible = true;
  enum class Kind { X, Linear, Cyclotomic, Other } kind = Kind::Other;
  /// Index d when kind == Cyclotomic.
  unsigned cyclotomic_index = 0;
};

/// Disk in the complex plane containing exactly one root.
struct RootEnclosure {
  Real re;
  Real im;
  Real radius;
};

/// Isolating disks for the roots of a square-free integer polynomial. A component of
/// overlapping inclusion disks is refined by doubling the working precision up to
/// max_bits; PrecisionError when the cap is hit.
std::vector<RootEnclosure> isolate_roots(const IntPoly& squarefree, unsigned bits,
                                         unsigned max_bits = kMaxPrecisionBits);

/// Splits p into pairwise coprime square-free factors with multiplicities, peeling x,
/// integer roots, cyclotomic factors and then numerically guided exact divisors.
std::vector<PolyFactor> factor_polynomial(const IntPoly& p, unsigned bits = kDefaultPrecisionBits);

struct Eigenvalue {
  double re = 0;
  double im = 0;
  /// Radius of a disk around (re, im) that provably contains the eigenvalue.
  double radius = 0;
  double modulus_lo = 0;
  double modulus_hi = 0;
  unsigned multiplicity = 1;
  std::size_t factor = 0;
  std::size_t modulus_class = 0;
  /// True for integer eigenvalues (radius 0).
  bool exact = false;
  RootEnclosure enclosure;

  std::complex<double> value() const { return {re, im}; }
  double modulus() const { return 0.5 * (modulus_lo + modulus_hi); }
};

/// Distinct eigenvalues, descending modulus, with algebraic multiplicities.
struct EigenvalueSet {
  IntPoly char_poly;
  std::vector<PolyFactor> factors;
  std::vector<Eigenvalue> values;
  unsigned precision_bits = kDefaultPrecisionBits;

  /// Number of modulus classes.
  std::size_t modulus_class_count() const;
  /// 1-based position of values[i] in the list counted with multiplicity.
  std::size_t expanded_index(std::size_t i) const;
  /// The eigenvalues counted with multiplicity.
  std::vector<std::complex<double>> expanded() const;
};

EigenvalueSet eigenvalues(const IntMatrix& m, unsigned precision_bits = kDefaultPrecisionBits);

enum class Decision { No, Yes, Ambiguous };

struct SqrtQWitness {
  double re = 0;
  double im = 0;
  double modulus_lo = 0;
  double modulus_hi = 0;
};

struct SqrtQCheck {
  Decision present = Decision::No;
  /// gcd(p(x), x^n p(q/x)) in Z[x]; constant when the prefilter decides absence.
  IntPoly reciprocal_gcd;
  bool decided_by_prefilter = false;
  std::vector<SqrtQWitness> witnesses;
  unsigned precision_bits = kDefaultPrecisionBits;
};

/// Whether M has an eigenvalue of modulus exactly sqrt(q).
SqrtQCheck has_modulus_sqrt_q(const IntMatrix& m, long q, unsigned precision_bits = kDefaultPrecisionBits);

/// Whether every eigenvalue but one copy of the Perron-Frobenius root q has modulus < sqrt(q).
Decision second_eigenvalue_below_sqrt_q(const IntMatrix& m, long q,
                                        unsigned precision_bits = kDefaultPrecisionBits);

/// Spectral projector of M^t onto the generalized eigenspace of one factor.
struct Projector {
  std::size_t factor = 0;
  IntPoly factor_poly;
  unsigned multiplicity = 1;
  RatMatrix matrix;
  /// Indices into EigenvalueSet::values of the roots of this factor.
  std::vector<std::size_t> roots;
  /// Modulus classes touched by the roots, ascending.
  std::vector<std::size_t> modulus_classes;
};

/// Exact idempotents e_i(M^t) from Bezout identities between the coprime factors.
std::vector<Projector> factor_projectors(const IntMatrix& m, const EigenvalueSet& eig);

struct JPrKappa {
  /// 1-based index into the eigenvalues counted with multiplicity.
  std::size_t j = 0;
  std::size_t modulus_class = 0;
  double modulus_lo = 0;
  double modulus_hi = 0;
  /// Sum of the projections of b on the generalized eigenspaces in the modulus class of j.
  std::vector<std::complex<double>> pr;
  /// Exact projection when every factor in the class lies entirely in it.
  std::optional<std::vector<Rational>> pr_exact;
  unsigned kappa = 0;
};

/// j(b), pr(b) and the largest elimination exponent of b, for M^t.
JPrKappa j_pr_kappa(const IntMatrix& m, const std::vector<Rational>& b,
                    unsigned precision_bits = kDefaultPrecisionBits);
JPrKappa j_pr_kappa(const IntMatrix& m, const std::vector<Rational>& b, const EigenvalueSet& eig,
                    const std::vector<Projector>& projectors);

/// Scoped working precision for Real temporaries.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

unsigned bits_to_digits10(unsigned bits);

}  // namespace substrum
