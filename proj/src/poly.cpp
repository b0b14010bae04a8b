#include "substrum/poly.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "substrum/error.hpp"

namespace substrum {

std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
  if (b.is_zero()) throw Error("polynomial division by zero");
  if (a.degree() < b.degree()) return {RatPoly(), a};
  std::vector<Rational> rem = a.coeffs();
  std::vector<Rational> quo(a.coeffs().size() - b.coeffs().size() + 1, Rational(0));
  const auto& bc = b.coeffs();
  const Rational inv_lead = Rational(1) / b.lead();
  for (std::size_t k = quo.size(); k-- > 0;) {
    const Rational f = rem[k + bc.size() - 1] * inv_lead;
    quo[k] = f;
    if (f == 0) continue;
    for (std::size_t j = 0; j < bc.size(); ++j) rem[k + j] -= f * bc[j];
  }
  return {RatPoly(std::move(quo)), RatPoly(std::move(rem))};
}

std::optional<IntPoly> divide_exact(const IntPoly& a, const IntPoly& b) {
  auto [q, r] = divmod(a.cast<Rational>(), b.cast<Rational>());
  if (!r.is_zero()) return std::nullopt;
  std::vector<BigInt> c;
  c.reserve(q.coeffs().size());
  for (const auto& x : q.coeffs()) {
    if (denominator(x) != 1) return std::nullopt;
    c.push_back(numerator(x));
  }
  return IntPoly(std::move(c));
}

IntPoly primitive_part(const IntPoly& p) {
  if (p.is_zero()) return p;
  BigInt g = 0;
  for (const auto& x : p.coeffs()) g = boost::multiprecision::gcd(g, x);
  if (p.lead() < 0) g = -g;
  std::vector<BigInt> c = p.coeffs();
  for (auto& x : c) x /= g;
  return IntPoly(std::move(c));
}

IntPoly primitive_part(const RatPoly& p) {
  if (p.is_zero()) return IntPoly();
  BigInt l = 1;
  for (const auto& x : p.coeffs()) l = boost::multiprecision::lcm(l, BigInt(denominator(x)));
  std::vector<BigInt> c;
  c.reserve(p.coeffs().size());
  for (const auto& x : p.coeffs()) c.push_back(numerator(x) * (l / denominator(x)));
  return primitive_part(IntPoly(std::move(c)));
}

namespace {

RatPoly monic(const RatPoly& p) {
  if (p.is_zero()) return p;
  return (Rational(1) / p.lead()) * p;
}

RatPoly rat_gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

}  // namespace

IntPoly gcd(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero()) return primitive_part(b);
  if (b.is_zero()) return primitive_part(a);
  return primitive_part(rat_gcd(a.cast<Rational>(), b.cast<Rational>()));
}

BezoutResult extended_gcd(const RatPoly& a, const RatPoly& b) {
  RatPoly r0 = a, r1 = b;
  RatPoly s0 = RatPoly::constant(1), s1;
  RatPoly t0, t1 = RatPoly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::exchange(r1, r);
    s0 = std::exchange(s1, s0 - q * s1);
    t0 = std::exchange(t1, t0 - q * t1);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  const Rational inv = Rational(1) / r0.lead();
  return {inv * r0, inv * s0, inv * t0};
}

std::vector<IntPoly> squarefree_decomposition(const IntPoly& p) {
  std::vector<IntPoly> parts;
  if (p.degree() <= 0) return parts;
  const RatPoly f = p.cast<Rational>();
  const RatPoly fd = f.derivative();
  RatPoly a0 = rat_gcd(f, fd);
  RatPoly b = divmod(f, a0).first;
  RatPoly c = divmod(fd, a0).first;
  RatPoly d = c - b.derivative();
  while (b.degree() > 0) {
    RatPoly a = rat_gcd(b, d);
    parts.push_back(primitive_part(a));
    b = divmod(b, a).first;
    c = divmod(d, a).first;
    d = c - b.derivative();
  }
  while (!parts.empty() && parts.back().degree() == 0) parts.pop_back();
  return parts;
}

unsigned long euler_phi(unsigned long n) {
  unsigned long result = n;
  for (unsigned long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

IntPoly cyclotomic(unsigned d) {
  static std::mutex mu;
  static std::map<unsigned, IntPoly> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(d); it != cache.end()) return it->second;
  }
  if (d == 0) throw Error("cyclotomic index must be positive");
  IntPoly p = IntPoly::monomial(d) - IntPoly::constant(1);
  for (unsigned e = 1; e < d; ++e)
    if (d % e == 0) p = *divide_exact(p, cyclotomic(e));
  std::lock_guard lock(mu);
  cache.emplace(d, p);
  return p;
}

RatMatrix evaluate_at(const RatPoly& p, const RatMatrix& m) {
  const std::size_t n = m.rows();
  RatMatrix acc(n, n);
  const auto& c = p.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) {
    acc = acc * m;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += c[k];
  }
  return acc;
}

std::string to_string(const IntPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = p.degree(); k >= 0; --k) {
    const BigInt& c = p.coeffs()[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    if (mag != 1 || k == 0) os << mag;
    if (k >= 1) os << 'x';
    if (k >= 2) os << '^' << k;
    first = false;
  }
  return os.str();
}

}  // namespace substrum
