#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "substrum/matrix.hpp"

namespace substrum {

/// Dense univariate polynomial, coefficients stored lowest degree first.
/// The zero polynomial has an empty coefficient list.
template <class T>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
  /// x^n
  static Poly monomial(std::size_t n, const T& coeff = T(1)) {
    std::vector<T> c(n + 1, T(0));
    c[n] = coeff;
    return Poly(std::move(c));
  }

  bool is_zero() const noexcept { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const T& lead() const { return c_.back(); }
  const std::vector<T>& coeffs() const noexcept { return c_; }
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }

  template <class U>
  U operator()(const U& x) const {
    U acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + U(*it);
    return acc;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Poly(std::move(c));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  friend Poly operator*(const T& s, const Poly& a) {
    std::vector<T> c = a.c_;
    for (auto& x : c) x *= s;
    return Poly(std::move(c));
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
    return Poly(std::move(d));
  }

  template <class U>
  Poly<U> cast() const {
    std::vector<U> c;
    c.reserve(c_.size());
    for (const auto& x : c_) c.push_back(U(x));
    return Poly<U>(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }
  std::vector<T> c_;
};

using IntPoly = Poly<BigInt>;
using RatPoly = Poly<Rational>;

/// Quotient and remainder over the rationals.
std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b);

/// Exact quotient a / b over the integers, or nothing if b does not divide a in Z[x].
std::optional<IntPoly> divide_exact(const IntPoly& a, const IntPoly& b);

/// Content-free integer polynomial with positive leading coefficient.
IntPoly primitive_part(const IntPoly& p);
IntPoly primitive_part(const RatPoly& p);

/// Monic-up-to-sign gcd in Z[x] (primitive, positive leading coefficient).
IntPoly gcd(const IntPoly& a, const IntPoly& b);

struct BezoutResult {
  RatPoly gcd;
  RatPoly s;
  RatPoly t;
};
/// s*a + t*b = gcd (monic).
BezoutResult extended_gcd(const RatPoly& a, const RatPoly& b);

/// Yun decomposition: p = c * prod a_i^i with a_i squarefree, pairwise coprime.
/// Entry i-1 of the result holds a_i (constant 1 when absent).
std::vector<IntPoly> squarefree_decomposition(const IntPoly& p);

/// The d-th cyclotomic polynomial.
IntPoly cyclotomic(unsigned d);

/// Euler's totient.
unsigned long euler_phi(unsigned long n);

/// Evaluates p at a square matrix by Horner's rule.
RatMatrix evaluate_at(const RatPoly& p, const RatMatrix& m);

std::string to_string(const IntPoly& p);

}  // namespace substrum
