#include <doctest.h>

#include "substrum/poly.hpp"

using namespace substrum;

namespace {

IntPoly P(std::initializer_list<long> low_first) {
  std::vector<BigInt> c;
  for (long v : low_first) c.emplace_back(v);
  return IntPoly(std::move(c));
}

}  // namespace

TEST_CASE("arithmetic and evaluation") {
  auto p = P({-1, 0, 1});  // x^2 - 1
  CHECK(p.degree() == 2);
  CHECK(p(BigInt(3)) == 8);
  CHECK(p * P({1}) == p);
  CHECK((p - p).is_zero());
  CHECK(p.derivative() == P({0, 2}));
  CHECK(to_string(P({0, 3, -4, 1})) == "x^3 - 4x^2 + 3x");
}

TEST_CASE("exact division and gcd") {
  auto a = P({-1, 0, 1});
  auto b = P({1, 1});
  CHECK(divide_exact(a, b) == P({-1, 1}));
  CHECK_FALSE(divide_exact(a, P({2, 1})).has_value());
  CHECK(gcd(a, P({-1, 0, 0, 1})) == P({-1, 1}));
  CHECK(gcd(P({2, 4}), P({6, 12})) == P({1, 2}));
}

TEST_CASE("bezout") {
  RatPoly a = P({-1, 1}).cast<Rational>();
  RatPoly b = P({1, 1}).cast<Rational>();
  auto r = extended_gcd(a, b);
  CHECK(r.gcd == RatPoly::constant(1));
  CHECK(r.s * a + r.t * b == RatPoly::constant(1));
}

TEST_CASE("squarefree decomposition") {
  // x^3 (x-1)^2 (x+2)
  auto p = P({0, 0, 0, 1}) * P({-1, 1}) * P({-1, 1}) * P({2, 1});
  auto parts = squarefree_decomposition(p);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == P({2, 1}));
  CHECK(parts[1] == P({-1, 1}));
  CHECK(parts[2] == P({0, 1}));
}

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic(1) == P({-1, 1}));
  CHECK(cyclotomic(2) == P({1, 1}));
  CHECK(cyclotomic(6) == P({1, -1, 1}));
  CHECK(cyclotomic(12) == P({1, 0, -1, 0, 1}));
  for (unsigned d = 1; d <= 40; ++d) CHECK(cyclotomic(d).degree() == static_cast<int>(euler_phi(d)));
  // x^n - 1 is the product of Phi_d over d | n
  for (unsigned n = 1; n <= 24; ++n) {
    IntPoly prod = IntPoly::constant(1);
    for (unsigned d = 1; d <= n; ++d)
      if (n % d == 0) prod = prod * cyclotomic(d);
    CHECK(prod == IntPoly::monomial(n) - IntPoly::constant(1));
  }
}

TEST_CASE("evaluate at matrix") {
  RatMatrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 1;
  m(1, 0) = 1;
  m(1, 1) = 1;
  // x^2 - 2x annihilates [[1,1],[1,1]]
  CHECK(evaluate_at(P({0, -2, 1}).cast<Rational>(), m).is_zero());
}
