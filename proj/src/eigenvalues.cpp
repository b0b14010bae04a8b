#include "substrum/eigenvalues.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "substrum/error.hpp"

namespace substrum {

unsigned bits_to_digits10(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2; }

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(Real::default_precision()) {
  Real::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

// ---------------------------------------------------------------------------
// Characteristic polynomial

namespace {

// Berkowitz: coefficients of det(xI - A), highest degree first.
std::vector<BigInt> berkowitz(const Matrix<BigInt>& m) {
  const std::size_t n = m.rows();
  if (n == 0) return {BigInt(1)};

  std::vector<std::vector<std::vector<BigInt>>> transforms;
  Matrix<BigInt> a = m;
  while (a.rows() > 1) {
    const std::size_t size = a.rows();
    const std::size_t sub = size - 1;
    Matrix<BigInt> a1(sub, sub);
    std::vector<BigInt> row(sub), col(sub);
    for (std::size_t i = 0; i < sub; ++i) {
      row[i] = a(0, i + 1);
      col[i] = a(i + 1, 0);
      for (std::size_t j = 0; j < sub; ++j) a1(i, j) = a(i + 1, j + 1);
    }
    // R * A1^k * C for k = 0..size-2
    std::vector<BigInt> items;
    std::vector<BigInt> v = col;
    for (std::size_t k = 0; k + 1 < size; ++k) {
      BigInt dot = 0;
      for (std::size_t i = 0; i < sub; ++i) dot += row[i] * v[i];
      items.push_back(dot);
      if (k + 2 < size) v = a1.apply(v);
    }
    std::vector<BigInt> toeplitz;
    toeplitz.reserve(size + 1);
    toeplitz.push_back(1);
    toeplitz.push_back(-a(0, 0));
    for (auto& x : items) toeplitz.push_back(-x);

    std::vector<std::vector<BigInt>> t(size + 1, std::vector<BigInt>(size, BigInt(0)));
    for (std::size_t i = 0; i <= size; ++i)
      for (std::size_t j = 0; j < size && j <= i; ++j) t[i][j] = toeplitz[i - j];
    transforms.push_back(std::move(t));
    a = a1;
  }
  std::vector<BigInt> poly{BigInt(1), BigInt(-a(0, 0))};
  for (auto it = transforms.rbegin(); it != transforms.rend(); ++it) {
    const auto& t = *it;
    std::vector<BigInt> next(t.size(), BigInt(0));
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < poly.size(); ++j) next[i] += t[i][j] * poly[j];
    poly = std::move(next);
  }
  return poly;
}

}  // namespace

IntPoly char_poly(const Matrix<BigInt>& m) {
  if (!m.square()) throw Error("char_poly: matrix must be square");
  auto high_first = berkowitz(m);
  std::reverse(high_first.begin(), high_first.end());
  return IntPoly(std::move(high_first));
}

IntPoly char_poly(const IntMatrix& m) { return char_poly(m.cast<BigInt>()); }

// ---------------------------------------------------------------------------
// Complex arithmetic at working precision

namespace {

struct Cx {
  Real re;
  Real im;
};

Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
Cx operator*(const Cx& a, const Cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Cx operator/(const Cx& a, const Cx& b) {
  const Real d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
Real abs(const Cx& a) { return sqrt(a.re * a.re + a.im * a.im); }
Cx conj(const Cx& a) { return {a.re, -a.im}; }

Real to_real(const BigInt& v) { return Real(v.str()); }

BigInt round_to_bigint(const Real& x) {
  const Real r = round(x);
  BigInt out;
  mpfr_get_z(out.backend().data(), r.backend().data(), MPFR_RNDN);
  return out;
}

struct HornerResult {
  Cx value;
  Cx deriv;
  Real magnitude_bound;  // sum |c_i| |z|^i
};

HornerResult horner(const std::vector<Real>& c, const Cx& z) {
  Cx p{Real(0), Real(0)};
  Cx d{Real(0), Real(0)};
  Real mag = 0;
  const Real az = abs(z);
  for (std::size_t k = c.size(); k-- > 0;) {
    d = d * z + p;
    p = p * z + Cx{c[k], Real(0)};
    mag = mag * az + abs(c[k]);
  }
  return {p, d, mag};
}

double round_up(const Real& x) {
  double d = static_cast<double>(x);
  if (Real(d) < x) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

double round_down(const Real& x) {
  double d = static_cast<double>(x);
  if (Real(d) > x) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}

bool disks_overlap(const Cx& a, const Real& ra, const Cx& b, const Real& rb) {
  return abs(a - b) <= ra + rb;
}

std::vector<RootEnclosure> isolate_once(const IntPoly& p, unsigned bits) {
  PrecisionScope scope(bits);
  const int n = p.degree();
  std::vector<RootEnclosure> out;
  if (n <= 0) return out;

  std::vector<Real> c;
  for (const auto& x : p.coeffs()) c.push_back(to_real(x));
  const Real eps = pow(Real(2), -static_cast<int>(bits));

  if (n == 1) {
    const BigInt& c0 = p.coeffs()[0];
    const BigInt& c1 = p.coeffs()[1];
    Real root = -c[0] / c[1];
    Real radius = (c0 % c1 == 0) ? Real(0) : abs(root) * eps * 4;
    out.push_back({root, Real(0), radius});
    return out;
  }

  // Aberth-Ehrlich iteration from points on a circle enclosing all roots.
  Real bound = 0;
  for (int i = 0; i < n; ++i) bound = max(bound, abs(c[static_cast<std::size_t>(i)] / c.back()));
  bound += 1;
  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  std::vector<Cx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Real angle = two_pi * k / n + Real(0.7);
    z[static_cast<std::size_t>(k)] = {bound * cos(angle), bound * sin(angle)};
  }

  const Real stop = pow(Real(2), -static_cast<int>(bits) + 24);
  const int max_iter = 400 + 40 * n;
  int quiet = 0;
  for (int iter = 0; iter < max_iter && quiet < 2; ++iter) {
    Real worst = 0;
    for (int k = 0; k < n; ++k) {
      auto& zk = z[static_cast<std::size_t>(k)];
      const auto h = horner(c, zk);
      if (h.value.re == 0 && h.value.im == 0) continue;
      const Cx ratio = h.value / h.deriv;
      Cx sum{Real(0), Real(0)};
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        sum = sum + Cx{Real(1), Real(0)} / (zk - z[static_cast<std::size_t>(j)]);
      }
      const Cx w = ratio / (Cx{Real(1), Real(0)} - ratio * sum);
      zk = zk - w;
      worst = max(worst, abs(w) / max(Real(1), abs(zk)));
    }
    quiet = (worst < stop) ? quiet + 1 : 0;
  }

  // Inclusion disks: n |W_k| with Weierstrass corrections W_k, inflated by the
  // evaluation error bound. Disjoint disks each contain exactly one root.
  const Real lead = abs(c.back());
  std::vector<Real> radius(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto& zk = z[static_cast<std::size_t>(k)];
    const auto h = horner(c, zk);
    Real prod = lead;
    for (int j = 0; j < n; ++j)
      if (j != k) prod *= abs(zk - z[static_cast<std::size_t>(j)]);
    if (prod == 0) throw PrecisionError("root approximations collided");
    const Real err = 8 * (n + 1) * eps * h.magnitude_bound;
    radius[static_cast<std::size_t>(k)] = n * (abs(h.value) + err) / prod * (1 + pow(Real(2), -static_cast<int>(bits) / 2));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (disks_overlap(z[static_cast<std::size_t>(i)], radius[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)],
                        radius[static_cast<std::size_t>(j)]))
        throw PrecisionError("root inclusion disks overlap");

  for (int k = 0; k < n; ++k) {
    auto zk = z[static_cast<std::size_t>(k)];
    const Real& rk = radius[static_cast<std::size_t>(k)];
    // The conjugate of the root lies in the mirrored disk; if that disk meets no other
    // inclusion disk, the conjugate is the root itself and the root is real.
    if (abs(zk.im) <= rk) {
      bool alone = true;
      for (int j = 0; j < n && alone; ++j)
        if (j != k && disks_overlap(conj(zk), rk, z[static_cast<std::size_t>(j)], radius[static_cast<std::size_t>(j)]))
          alone = false;
      if (alone) zk.im = 0;
    }
    out.push_back({zk.re, zk.im, rk});
  }
  return out;
}

}  // namespace

std::vector<RootEnclosure> isolate_roots(const IntPoly& squarefree, unsigned bits, unsigned max_bits) {
  for (;;) {
    try {
      return isolate_once(squarefree, bits);
    } catch (const PrecisionError&) {
      if (bits >= max_bits) throw;
      bits = std::min(bits * 2, max_bits);
    }
  }
}

// ---------------------------------------------------------------------------
// Factorization

namespace {

BigInt eval_int(const IntPoly& p, const BigInt& x) {
  BigInt acc = 0;
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = acc * x + *it;
  return acc;
}

IntPoly linear(const BigInt& root) { return IntPoly(std::vector<BigInt>{BigInt(-root), BigInt(1)}); }

// Finds integer-coefficient divisors of g by multiplying out subsets of its roots.
// The first divisor found at each degree is irreducible.
void split_by_root_subsets(IntPoly g, std::vector<RootEnclosure> roots, unsigned bits,
                           unsigned multiplicity, std::vector<PolyFactor>& out) {
  PrecisionScope scope(bits);
  const Real tol = pow(Real(2), -static_cast<int>(bits) / 4);
  while (g.degree() > 0) {
    const std::size_t n = roots.size();
    bool found = false;
    for (std::size_t d = 1; d <= n / 2 && !found; ++d) {
      std::vector<std::size_t> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      for (;;) {
        // prod (x - z_i)
        std::vector<Cx> coeffs{Cx{Real(1), Real(0)}};
        for (auto i : idx) {
          const Cx zi{roots[i].re, roots[i].im};
          std::vector<Cx> next(coeffs.size() + 1, Cx{Real(0), Real(0)});
          for (std::size_t k = 0; k < coeffs.size(); ++k) {
            next[k + 1] = next[k + 1] + coeffs[k];
            next[k] = next[k] - coeffs[k] * zi;
          }
          coeffs = std::move(next);
        }
        bool integral = true;
        std::vector<BigInt> ic;
        for (const auto& cf : coeffs) {
          const Real scale = 1 + abs(cf.re);
          const Real r = round(cf.re);
          if (abs(cf.im) > tol * scale || abs(cf.re - r) > tol * scale) {
            integral = false;
            break;
          }
          ic.push_back(round_to_bigint(r));
        }
        if (integral) {
          IntPoly candidate(std::move(ic));
          if (auto q = divide_exact(g, candidate)) {
            PolyFactor f;
            f.poly = candidate;
            f.multiplicity = multiplicity;
            out.push_back(std::move(f));
            g = *q;
            std::vector<RootEnclosure> rest;
            for (std::size_t i = 0; i < n; ++i)
              if (std::find(idx.begin(), idx.end(), i) == idx.end()) rest.push_back(roots[i]);
            roots = std::move(rest);
            found = true;
            break;
          }
        }
        // next combination
        std::size_t pos = d;
        while (pos > 0 && idx[pos - 1] == n - d + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t k = pos; k < d; ++k) idx[k] = idx[k - 1] + 1;
      }
    }
    if (!found) {
      PolyFactor f;
      f.poly = g;
      f.multiplicity = multiplicity;
      out.push_back(std::move(f));
      return;
    }
  }
}

constexpr int kMaxSubsetDegree = 16;

void split_squarefree(IntPoly g, unsigned multiplicity, unsigned bits, std::vector<PolyFactor>& out) {
  if (g.degree() <= 0) return;
  if (g.coeffs()[0] == 0) {
    PolyFactor f;
    f.poly = IntPoly::monomial(1, BigInt(1));
    f.multiplicity = multiplicity;
    f.kind = PolyFactor::Kind::X;
    g = *divide_exact(g, f.poly);
    out.push_back(std::move(f));
    if (g.degree() <= 0) return;
  }

  // Integer roots, located numerically and confirmed exactly.
  {
    const auto roots = isolate_roots(g, bits);
    PrecisionScope scope(bits);
    std::vector<BigInt> found;
    for (const auto& r : roots) {
      if (abs(r.im) >= Real(0.5)) continue;
      const BigInt candidate = round_to_bigint(r.re);
      if (std::find(found.begin(), found.end(), candidate) != found.end()) continue;
      if (eval_int(g, candidate) == 0) found.push_back(candidate);
    }
    std::sort(found.begin(), found.end(), [](const BigInt& a, const BigInt& b) { return a > b; });
    for (const auto& r : found) {
      PolyFactor f;
      f.poly = linear(r);
      f.multiplicity = multiplicity;
      f.kind = PolyFactor::Kind::Linear;
      g = *divide_exact(g, f.poly);
      out.push_back(std::move(f));
    }
  }
  if (g.degree() <= 0) return;

  // Cyclotomic factors of degree >= 2 (Phi_1, Phi_2 are linear and handled above).
  {
    const unsigned deg = static_cast<unsigned>(g.degree());
    const unsigned dmax = 2 * deg * deg + 2;
    for (unsigned d = 3; d <= dmax && g.degree() >= 2; ++d) {
      if (euler_phi(d) > static_cast<unsigned long>(g.degree())) continue;
      const IntPoly phi = cyclotomic(d);
      if (auto q = divide_exact(g, phi)) {
        PolyFactor f;
        f.poly = phi;
        f.multiplicity = multiplicity;
        f.kind = PolyFactor::Kind::Cyclotomic;
        f.cyclotomic_index = d;
        out.push_back(std::move(f));
        g = *q;
      }
    }
  }
  if (g.degree() <= 0) return;

  if (g.degree() > kMaxSubsetDegree) {
    PolyFactor f;
    f.poly = g;
    f.multiplicity = multiplicity;
    f.irreducible = false;
    out.push_back(std::move(f));
    return;
  }
  split_by_root_subsets(g, isolate_roots(g, bits), bits, multiplicity, out);
}

}  // namespace

std::vector<PolyFactor> factor_polynomial(const IntPoly& p, unsigned bits) {
  std::vector<PolyFactor> out;
  const auto parts = squarefree_decomposition(p);
  for (std::size_t i = 0; i < parts.size(); ++i)
    split_squarefree(parts[i], static_cast<unsigned>(i + 1), bits, out);
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues

std::size_t EigenvalueSet::modulus_class_count() const {
  std::size_t n = 0;
  for (const auto& v : values) n = std::max(n, v.modulus_class + 1);
  return n;
}

std::size_t EigenvalueSet::expanded_index(std::size_t i) const {
  std::size_t idx = 1;
  for (std::size_t k = 0; k < i; ++k) idx += values[k].multiplicity;
  return idx;
}

std::vector<std::complex<double>> EigenvalueSet::expanded() const {
  std::vector<std::complex<double>> out;
  for (const auto& v : values)
    for (unsigned k = 0; k < v.multiplicity; ++k) out.push_back(v.value());
  return out;
}

EigenvalueSet eigenvalues(const IntMatrix& m, unsigned precision_bits) {
  EigenvalueSet set;
  set.precision_bits = precision_bits;
  set.char_poly = char_poly(m);
  set.factors = factor_polynomial(set.char_poly, precision_bits);

  PrecisionScope scope(precision_bits);
  struct Item {
    Eigenvalue ev;
    Real modulus;
  };
  std::vector<Item> items;
  for (std::size_t fi = 0; fi < set.factors.size(); ++fi) {
    const auto& f = set.factors[fi];
    if (f.kind == PolyFactor::Kind::X || f.kind == PolyFactor::Kind::Linear) {
      const BigInt root = f.kind == PolyFactor::Kind::X ? BigInt(0) : BigInt(-f.poly.coeffs()[0]);
      Eigenvalue ev;
      ev.re = root.convert_to<double>();
      ev.multiplicity = f.multiplicity;
      ev.factor = fi;
      ev.exact = true;
      ev.enclosure = {to_real(root), Real(0), Real(0)};
      const Real mod = abs(ev.enclosure.re);
      ev.modulus_lo = round_down(mod);
      ev.modulus_hi = round_up(mod);
      items.push_back({ev, mod});
      continue;
    }
    for (auto& enc : isolate_roots(f.poly, precision_bits)) {
      Eigenvalue ev;
      ev.re = static_cast<double>(enc.re);
      ev.im = static_cast<double>(enc.im);
      const Real slack = abs(enc.re - Real(ev.re)) + abs(enc.im - Real(ev.im));
      ev.radius = round_up(enc.radius + slack);
      const Real mod = abs(Cx{enc.re, enc.im});
      ev.modulus_lo = round_down(max(Real(0), mod - enc.radius));
      ev.modulus_hi = round_up(mod + enc.radius);
      ev.multiplicity = f.multiplicity;
      ev.factor = fi;
      ev.enclosure = std::move(enc);
      items.push_back({ev, mod});
    }
  }

  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.modulus > b.modulus; });
  // Consecutive eigenvalues with overlapping modulus enclosures share a modulus class.
  std::size_t cls = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) {
      const auto& prev = items[i - 1];
      const Real gap = prev.modulus - items[i].modulus;
      if (gap > prev.ev.enclosure.radius + items[i].ev.enclosure.radius) ++cls;
    }
    items[i].ev.modulus_class = cls;
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.ev.modulus_class != b.ev.modulus_class) return a.ev.modulus_class < b.ev.modulus_class;
    if (a.ev.factor != b.ev.factor) return a.ev.factor < b.ev.factor;
    return a.ev.im > b.ev.im;
  });
  for (auto& it : items) set.values.push_back(std::move(it.ev));
  return set;
}

// ---------------------------------------------------------------------------
// Modulus sqrt(q)

namespace {

IntPoly squarefree_part(const IntPoly& g) {
  IntPoly out = IntPoly::constant(1);
  for (const auto& part : squarefree_decomposition(g)) out = out * part;
  return primitive_part(out);
}

IntPoly reciprocal_scaled(const IntPoly& p, long q) {
  // x^n p(q/x) = sum_i c_i q^i x^(n-i)
  const std::size_t n = static_cast<std::size_t>(p.degree());
  std::vector<BigInt> c(n + 1, BigInt(0));
  BigInt qi = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    c[n - i] = p.coeffs()[i] * qi;
    qi *= q;
  }
  return IntPoly(std::move(c));
}

std::optional<long> integer_sqrt(long q) {
  long s = static_cast<long>(std::llround(std::sqrt(static_cast<double>(q))));
  for (long t = std::max(0L, s - 2); t <= s + 2; ++t)
    if (t * t == q) return t;
  return std::nullopt;
}

}  // namespace

SqrtQCheck has_modulus_sqrt_q(const IntMatrix& m, long q, unsigned precision_bits) {
  if (q <= 0) throw PreconditionError("q must be positive");
  SqrtQCheck result;
  result.precision_bits = precision_bits;
  const IntPoly p = char_poly(m);
  // Every eigenvalue on |x| = sqrt(q) satisfies conj(x) = q / x, so it is a common
  // root of p and of its q-reciprocal.
  result.reciprocal_gcd = gcd(p, reciprocal_scaled(p, q));
  if (result.reciprocal_gcd.degree() <= 0) {
    result.present = Decision::No;
    result.decided_by_prefilter = true;
    return result;
  }
  const IntPoly gs = squarefree_part(result.reciprocal_gcd);

  bool exact_hit = false;
  std::vector<SqrtQWitness> exact_witnesses;
  {
    PrecisionScope scope(precision_bits);
    const IntPoly x2q(std::vector<BigInt>{BigInt(-q), BigInt(0), BigInt(1)});
    if (divide_exact(gs, x2q)) {
      exact_hit = true;
      const double s = std::sqrt(static_cast<double>(q));
      const Real sq = sqrt(Real(q));
      for (double sign : {1.0, -1.0})
        exact_witnesses.push_back({sign * s, 0.0, round_down(sq), round_up(sq)});
    }
    if (auto s = integer_sqrt(q)) {
      for (long cand : {*s, -*s})
        if (eval_int(gs, BigInt(cand)) == 0) {
          exact_hit = true;
          exact_witnesses.push_back({static_cast<double>(cand), 0.0, static_cast<double>(*s),
                                     static_cast<double>(*s)});
        }
    }
  }

  for (unsigned bits = precision_bits;; bits = std::min(bits * 2, kMaxPrecisionBits)) {
    result.precision_bits = bits;
    std::vector<RootEnclosure> roots;
    try {
      roots = isolate_roots(gs, bits, bits);
    } catch (const PrecisionError&) {
      if (bits >= kMaxPrecisionBits) break;
      continue;
    }
    PrecisionScope scope(bits);
    const Real qr(q);
    bool ambiguous = false;
    std::vector<SqrtQWitness> witnesses;
    for (std::size_t i = 0; i < roots.size() && !ambiguous; ++i) {
      const Cx z{roots[i].re, roots[i].im};
      const Real& r = roots[i].radius;
      const Real az = abs(z);
      if (az <= r) {
        ambiguous = true;
        break;
      }
      // Index of the disk holding conj(root) and of the disk holding q / root.
      std::vector<std::size_t> conj_hits, recip_hits;
      const Cx zc = conj(z);
      const Cx zr = Cx{qr, Real(0)} / z;
      const Real rr = qr * r / (az * (az - r));
      for (std::size_t j = 0; j < roots.size(); ++j) {
        const Cx w{roots[j].re, roots[j].im};
        if (disks_overlap(zc, r, w, roots[j].radius)) conj_hits.push_back(j);
        if (disks_overlap(zr, rr, w, roots[j].radius)) recip_hits.push_back(j);
      }
      if (conj_hits.size() != 1 || recip_hits.size() != 1) {
        ambiguous = true;
        break;
      }
      if (conj_hits[0] == recip_hits[0]) {
        SqrtQWitness w;
        w.re = static_cast<double>(z.re);
        w.im = static_cast<double>(z.im);
        w.modulus_lo = round_down(az - r);
        w.modulus_hi = round_up(az + r);
        witnesses.push_back(w);
      }
    }
    if (!ambiguous) {
      result.witnesses = std::move(witnesses);
      result.present = result.witnesses.empty() ? Decision::No : Decision::Yes;
      if (exact_hit && result.present == Decision::No) result.witnesses = exact_witnesses;
      if (exact_hit) result.present = Decision::Yes;
      return result;
    }
    if (bits >= kMaxPrecisionBits) break;
  }
  if (exact_hit) {
    result.present = Decision::Yes;
    result.witnesses = exact_witnesses;
  } else {
    result.present = Decision::Ambiguous;
  }
  return result;
}

Decision second_eigenvalue_below_sqrt_q(const IntMatrix& m, long q, unsigned precision_bits) {
  const auto check = has_modulus_sqrt_q(m, q, precision_bits);
  if (check.present == Decision::Yes) return Decision::No;
  for (unsigned bits = precision_bits;; bits = std::min(bits * 2, kMaxPrecisionBits)) {
    const auto eig = eigenvalues(m, bits);
    if (eig.values.empty()) return Decision::Ambiguous;
    const auto& top = eig.values.front();
    if (!(top.exact && top.enclosure.re == q)) throw PreconditionError("leading eigenvalue is not q");
    if (top.multiplicity > 1) return Decision::No;

    PrecisionScope scope(bits);
    const Real sq = sqrt(Real(q));
    Decision d = Decision::Yes;
    for (std::size_t i = 1; i < eig.values.size(); ++i) {
      const auto& e = eig.values[i].enclosure;
      const Real mod = abs(Cx{e.re, e.im});
      if (mod - e.radius > sq) return Decision::No;
      if (mod + e.radius >= sq) d = Decision::Ambiguous;
    }
    if (d != Decision::Ambiguous) return d;
    // Enclosures meet sqrt(q) while no eigenvalue equals it: refine.
    if (check.present == Decision::Ambiguous || bits >= kMaxPrecisionBits) return Decision::Ambiguous;
  }
}

// ---------------------------------------------------------------------------
// Projectors

std::vector<Projector> factor_projectors(const IntMatrix& m, const EigenvalueSet& eig) {
  const RatMatrix mt = m.transpose().cast<Rational>();
  const RatPoly p = eig.char_poly.cast<Rational>();
  std::vector<Projector> out;
  for (std::size_t fi = 0; fi < eig.factors.size(); ++fi) {
    const auto& f = eig.factors[fi];
    RatPoly g = RatPoly::constant(1);
    const RatPoly fr = f.poly.cast<Rational>();
    for (unsigned k = 0; k < f.multiplicity; ++k) g = g * fr;
    auto [h, rem] = divmod(p, g);
    if (!rem.is_zero()) throw Error("factor does not divide the characteristic polynomial");
    const auto bez = extended_gcd(g, h);
    if (bez.gcd.degree() != 0) throw Error("projector factors are not coprime");
    // e = t*h is 1 modulo g and 0 modulo h.
    const RatPoly e = divmod(bez.t * h, p).second;

    Projector proj;
    proj.factor = fi;
    proj.factor_poly = f.poly;
    proj.multiplicity = f.multiplicity;
    proj.matrix = evaluate_at(e, mt);
    for (std::size_t i = 0; i < eig.values.size(); ++i)
      if (eig.values[i].factor == fi) {
        proj.roots.push_back(i);
        proj.modulus_classes.push_back(eig.values[i].modulus_class);
      }
    std::sort(proj.modulus_classes.begin(), proj.modulus_classes.end());
    proj.modulus_classes.erase(std::unique(proj.modulus_classes.begin(), proj.modulus_classes.end()),
                               proj.modulus_classes.end());
    out.push_back(std::move(proj));
  }
  return out;
}

// ---------------------------------------------------------------------------
// j, pr, kappa

namespace {

using CVec = std::vector<std::complex<double>>;
using CMat = Matrix<std::complex<double>>;

CMat to_complex(const IntMatrix& m) {
  CMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = static_cast<double>(m(i, j));
  return out;
}

CVec to_complex(const std::vector<Rational>& v) {
  CVec out;
  for (const auto& x : v) out.emplace_back(x.convert_to<double>());
  return out;
}

double norm(const CVec& v) {
  double s = 0;
  for (auto x : v) s += std::norm(x);
  return std::sqrt(s);
}

CVec shift_apply(const CMat& mt, std::complex<double> theta, const CVec& v) {
  CVec out = mt.apply(v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] -= theta * v[i];
  return out;
}

// Projection of v (already inside the range of the factor projector) onto the
// generalized eigenspace of one root, via the Hermite idempotent of that root.
CVec root_projection(const CMat& mt, const EigenvalueSet& eig, const Projector& proj, std::size_t root,
                     const CVec& v) {
  const auto theta = eig.values[root].value();
  const unsigned e = proj.multiplicity;
  // B(x) = prod over the other roots of (x - theta')^e, expanded in y = x - theta.
  std::vector<std::complex<double>> series{1.0};
  CVec w = v;
  for (std::size_t other : proj.roots) {
    if (other == root) continue;
    const auto t2 = eig.values[other].value();
    for (unsigned k = 0; k < e; ++k) {
      w = shift_apply(mt, t2, w);
      std::vector<std::complex<double>> next(series.size() + 1, 0.0);
      for (std::size_t i = 0; i < series.size(); ++i) {
        next[i + 1] += series[i];
        next[i] += series[i] * (theta - t2);
      }
      series = std::move(next);
    }
  }
  series.resize(e, 0.0);
  // A = 1 / B modulo y^e.
  std::vector<std::complex<double>> inv(e, 0.0);
  inv[0] = 1.0 / series[0];
  for (unsigned k = 1; k < e; ++k) {
    std::complex<double> s = 0;
    for (unsigned i = 1; i <= k; ++i) s += series[i] * inv[k - i];
    inv[k] = -s / series[0];
  }
  CVec out(v.size(), 0.0);
  CVec term = w;
  for (unsigned k = 0; k < e; ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += inv[k] * term[i];
    term = shift_apply(mt, theta, term);
  }
  return out;
}

}  // namespace

JPrKappa j_pr_kappa(const IntMatrix& m, const std::vector<Rational>& b, unsigned precision_bits) {
  const auto eig = eigenvalues(m, precision_bits);
  const auto projectors = factor_projectors(m, eig);
  return j_pr_kappa(m, b, eig, projectors);
}

JPrKappa j_pr_kappa(const IntMatrix& m, const std::vector<Rational>& b, const EigenvalueSet& eig,
                    const std::vector<Projector>& projectors) {
  if (b.size() != m.rows()) throw PreconditionError("vector dimension does not match the matrix");
  if (std::all_of(b.begin(), b.end(), [](const Rational& x) { return x == 0; }))
    throw PreconditionError("j(b) is undefined for b = 0");

  const RatMatrix mt = m.transpose().cast<Rational>();
  const CMat cmt = to_complex(m.transpose());
  const double bnorm = norm(to_complex(b));
  const double tol = 1e-9 * std::max(1.0, bnorm);

  std::vector<std::vector<Rational>> pb(projectors.size());
  for (std::size_t i = 0; i < projectors.size(); ++i) pb[i] = projectors[i].matrix.apply(b);
  auto nonzero = [](const std::vector<Rational>& v) {
    return std::any_of(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
  };
  auto proj_of_factor = [&](std::size_t factor) -> std::size_t {
    for (std::size_t i = 0; i < projectors.size(); ++i)
      if (projectors[i].factor == factor) return i;
    throw Error("missing projector");
  };
  auto root_nonzero = [&](std::size_t root) {
    const std::size_t pi = proj_of_factor(eig.values[root].factor);
    if (!nonzero(pb[pi])) return false;
    if (eig.factors[projectors[pi].factor].irreducible) return true;
    return norm(root_projection(cmt, eig, projectors[pi], root, to_complex(pb[pi]))) > tol;
  };

  JPrKappa out;
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (root_nonzero(i)) {
      first = i;
      break;
    }
  if (!first) throw Error("b projects to zero on every generalized eigenspace");

  const auto& lead = eig.values[*first];
  out.j = eig.expanded_index(*first);
  out.modulus_class = lead.modulus_class;
  out.modulus_lo = lead.modulus_lo;
  out.modulus_hi = lead.modulus_hi;

  std::vector<Rational> exact(b.size(), Rational(0));
  bool all_exact = true;
  out.pr.assign(b.size(), 0.0);
  unsigned kappa = 0;
  for (std::size_t pi = 0; pi < projectors.size(); ++pi) {
    const auto& proj = projectors[pi];
    const auto& cls = proj.modulus_classes;
    if (std::find(cls.begin(), cls.end(), out.modulus_class) == cls.end()) continue;
    if (!nonzero(pb[pi])) continue;
    const bool whole = cls.size() == 1;
    const bool irreducible = eig.factors[proj.factor].irreducible;
    if (whole) {
      for (std::size_t i = 0; i < b.size(); ++i) exact[i] += pb[pi][i];
    } else {
      all_exact = false;
      for (std::size_t root : proj.roots) {
        if (eig.values[root].modulus_class != out.modulus_class) continue;
        const auto part = root_projection(cmt, eig, proj, root, to_complex(pb[pi]));
        for (std::size_t i = 0; i < b.size(); ++i) out.pr[i] += part[i];
      }
    }
    if (irreducible) {
      // Galois-conjugate roots share their chain depth, so F(M^t)^i P_F b = 0
      // detects the depth of every root of F at once.
      const RatMatrix fm = evaluate_at(proj.factor_poly.cast<Rational>(), mt);
      std::vector<Rational> v = pb[pi];
      unsigned depth = 0;
      while (nonzero(v)) {
        v = fm.apply(v);
        ++depth;
        if (depth > proj.multiplicity) throw Error("elimination depth exceeds multiplicity");
      }
      kappa = std::max(kappa, depth);
    } else {
      for (std::size_t root : proj.roots) {
        if (eig.values[root].modulus_class != out.modulus_class) continue;
        CVec v = root_projection(cmt, eig, proj, root, to_complex(pb[pi]));
        unsigned depth = 0;
        while (norm(v) > tol && depth <= proj.multiplicity) {
          v = shift_apply(cmt, eig.values[root].value(), v);
          ++depth;
        }
        kappa = std::max(kappa, depth);
      }
    }
  }
  for (std::size_t i = 0; i < b.size(); ++i) out.pr[i] += exact[i].convert_to<double>();
  if (all_exact) out.pr_exact = exact;
  out.kappa = kappa;
  return out;
}

}  // namespace substrum
