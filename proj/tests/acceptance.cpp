// One line per acceptance criterion; exit status is nonzero when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "substrum/bicoincidence.hpp"
#include "substrum/classifier.hpp"
#include "substrum/corpus.hpp"
#include "substrum/eigenvalues.hpp"
#include "substrum/estimator.hpp"
#include "substrum/queffelec.hpp"
#include "substrum/reduction.hpp"

using namespace substrum;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED: " << what << ';';
    }
  }
};

Substitution load(const std::string& name) { return parse_substitution(corpus_entry(name).dsl); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kEtaPaper =
    "a -> a d a\nb -> d e a\nc -> d f a\nd -> d c f\ne -> d a f\nf -> a b f\n";

bool same_up_to_permutation(const IntMatrix& x, const IntMatrix& y) {
  if (x.rows() != y.rows()) return false;
  std::vector<std::size_t> perm(x.rows());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool eq = true;
    for (std::size_t i = 0; i < x.rows() && eq; ++i)
      for (std::size_t j = 0; j < x.rows() && eq; ++j) eq = x(i, j) == y(perm[i], perm[j]);
    if (eq) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Outcome criterion1() {
  Outcome o;
  double worst = 0;
  auto timed = [&](const char* name) {
    const auto t0 = std::chrono::steady_clock::now();
    auto v = classify(load(name));
    const double s = seconds_since(t0);
    worst = std::max(worst, s);
    o.require(s < 1.0, std::string(name) + " took " + std::to_string(s) + " s");
    return v;
  };
  auto ex61 = timed("ex61");
  o.require(ex61.verdict == Verdict::Singular, "ex61 Singular");
  auto ex62 = timed("ex62");
  o.require(ex62.verdict == Verdict::PurelyDiscrete, "ex62 PurelyDiscrete");
  o.require(ex62.evidence.pure_base && ex62.evidence.pure_base->eta.size() == 6, "ex62 pure-base alphabet 6");
  if (ex62.evidence.pure_base)
    o.require(same_up_to_permutation(substitution_matrix(ex62.evidence.pure_base->eta),
                                     substitution_matrix(parse_substitution(kEtaPaper))),
              "S_eta matches up to permutation");
  auto ex63 = timed("ex63");
  o.require(ex63.verdict == Verdict::Singular, "ex63 Singular");
  o.require(std::count(ex63.reasons.begin(), ex63.reasons.end(), Reason::NoSqrtQEigenvalue) == 1 &&
                std::count(ex63.reasons.begin(), ex63.reasons.end(), Reason::SecondEigenvalueSmall) == 1,
            "ex63 both certificates");
  for (const char* name : {"rudin_shapiro", "modified_rudin_shapiro"}) {
    auto v = timed(name);
    o.require(v.verdict == Verdict::Inconclusive, std::string(name) + " Inconclusive");
    bool plus = false, minus = false;
    if (v.evidence.sqrt_q)
      for (const auto& w : v.evidence.sqrt_q->witnesses) {
        plus = plus || (std::abs(w.re - std::sqrt(2.0)) < 1e-12 && std::abs(w.im) < 1e-12);
        minus = minus || (std::abs(w.re + std::sqrt(2.0)) < 1e-12 && std::abs(w.im) < 1e-12);
      }
    o.require(plus && minus, std::string(name) + " witnesses +-sqrt2");
  }
  auto tm = timed("thue_morse");
  o.require(tm.verdict == Verdict::Singular, "thue_morse Singular");
  o.detail << " slowest classification " << worst << " s";
  return o;
}

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return v;
}

Outcome criterion2() {
  Outcome o;
  const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  const auto eta = pure_base(load("ex62")).eta;
  struct Case {
    std::string name;
    IntMatrix m;
    std::vector<std::complex<double>> expected;
  };
  std::vector<Case> cases = {
      {"ex61", substitution_matrix(load("ex61")), {3, 2, 1, 1}},
      {"ex62", substitution_matrix(load("ex62")), {3, 1, 0, 0, 0}},
      {"eta", substitution_matrix(eta), {3, {0.5, s3 / 2}, {0.5, -s3 / 2}, 0, 0, 0}},
      {"ex63", substitution_matrix(load("ex63")), {3, 1, 0}},
      {"rudin_shapiro", substitution_matrix(load("rudin_shapiro")), {2, s2, -s2, 0}},
      {"modified_rudin_shapiro", substitution_matrix(load("modified_rudin_shapiro")), {2, s2, -s2, 0}},
  };
  double widest = 0;
  for (const auto& c : cases) {
    const auto eig = eigenvalues(c.m);
    auto got = sorted(eig.expanded());
    auto want = sorted(c.expected);
    bool ok = got.size() == want.size();
    for (std::size_t i = 0; ok && i < got.size(); ++i) ok = std::abs(got[i] - want[i]) < 1e-10;
    o.require(ok, c.name + " multiset");
    for (const auto& v : eig.values) widest = std::max({widest, 2 * v.radius, v.modulus_hi - v.modulus_lo});
  }
  o.require(widest < 1e-10, "enclosure width");
  const auto cmp =
      spectrum_difference_is_trivial(char_poly(substitution_matrix(load("ex62"))), char_poly(substitution_matrix(eta)));
  o.require(cmp.trivial, "ex62 / eta spectrum difference trivial");
  o.detail << " widest enclosure " << widest;
  return o;
}

unsigned root_multiplicity(IntPoly p, long r) {
  const IntPoly lin(std::vector<BigInt>{BigInt(-r), BigInt(1)});
  unsigned k = 0;
  while (auto d = divide_exact(p, lin)) {
    p = *d;
    ++k;
  }
  return k;
}

Outcome criterion3() {
  Outcome o;
  const auto e61 = ergodic_classes(load("ex61"));
  o.require(e61.k == 2 && e61.transitive.empty(), "ex61 k=2, T empty");
  const auto rs = ergodic_classes(load("rudin_shapiro"));
  o.require(rs.k == 2 && !rs.transitive.empty(), "rudin_shapiro k=2, T nonempty");
  const auto mrs = ergodic_classes(load("modified_rudin_shapiro"));
  o.require(mrs.k == 3 && mrs.transitive.empty(), "modified_rudin_shapiro k=3, T empty");
  std::vector<std::pair<std::string, Substitution>> subs;
  for (const char* name : {"ex61", "ex62", "ex63", "rudin_shapiro", "modified_rudin_shapiro", "thue_morse"})
    subs.emplace_back(name, load(name));
  subs.emplace_back("ex62 pure base", pure_base(load("ex62")).eta);
  for (const auto& [name, z] : subs) {
    const auto k = ergodic_classes(z).k;
    const auto mult = root_multiplicity(char_poly(coincidence_matrix(z)), static_cast<long>(*constant_length(z)));
    o.require(mult == k, name + " multiplicity of q equals k");
    o.detail << ' ' << name << ":k=" << k;
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto z = load("ex61");
  const auto classes = ergodic_classes(z);
  const auto f = eigenspace_F(z, classes);
  const auto ep = extreme_points_Q(z, classes, f);
  std::vector<std::vector<Rational>> got;
  for (const auto& p : ep.points)
    if (p.exact) got.push_back(*p.exact);
  const std::vector<std::vector<Rational>> want = {{Rational(1), Rational(1)}, {Rational(1), Rational(-1, 3)}};
  o.require(ep.exact && got == want, "extreme points exactly {(1,1),(1,-1/3)}");
  std::vector<double> mu;
  for (const auto& x : letter_frequencies(z)) mu.push_back(x.convert_to<double>());
  double recon = 0, mean = 0;
  for (std::size_t i = 0; i < ep.points.size(); ++i) {
    const auto dec = decompose_lambda(associated_matrix(f, ep.points[i].w), mu);
    recon = std::max(recon, dec.reconstruction_error);
    // The all-ones point is the constant part; orthogonality is asserted on the others.
    if (i > 0) mean = std::max(mean, dec.max_mean);
  }
  o.require(recon < 1e-10, "reconstruction to 1e-10");
  o.require(mean < 1e-10, "generators orthogonal to constants");
  o.detail << " reconstruction " << recon << ", max |mean| " << mean;
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ex61 = load("ex61");
  const std::vector<Rational> f61 = {Rational(1), Rational(-1), Rational(0), Rational(0)};
  // Top five scales with q^n <= K: n = 3..7 for q = 3, K = 4096.
  const auto d61 = dimension_fit(ex61, f61, 3, 7, kDefaultLags, kDefaultPrefix);
  o.require(d61.d_hat >= 0.64 && d61.d_hat <= 0.84, "ex61 d_hat in [0.64, 0.84]");
  const auto tm = load("thue_morse");
  const auto dtm = dimension_fit(tm, {Rational(1), Rational(-1)}, 8, 12, kDefaultLags, kDefaultPrefix);
  o.require(dtm.d_hat >= 1.5, "thue_morse d_hat >= 1.5");
  const std::vector<Rational> one = {Rational(1), Rational(0), Rational(0), Rational(0)};
  const auto table = correlations(ex61, CorrelationFunction::cylindrical(one), kDefaultLags, kDefaultPrefix);
  const double mean = letter_frequencies(ex61)[0].convert_to<double>();
  const double pm = point_mass_at_zero(table);
  o.require(std::abs(pm - mean * mean) <= 5e-3, "point mass within 5e-3 of |mean|^2");
  const double s = seconds_since(t0);
  o.require(s <= 120, "desk scale time");
  o.detail << " ex61 d_hat " << d61.d_hat << " (pred " << d61.d_pred << "), thue_morse d_hat " << dtm.d_hat
           << ", point mass " << pm << " vs " << mean * mean << ", " << s << " s";
  return o;
}

Outcome criterion6() {
  Outcome o;
  // Exact projector identities.
  for (const auto& e : corpus()) {
    const auto m = substitution_matrix(parse_substitution(e.dsl));
    const auto proj = factor_projectors(m, eigenvalues(m));
    const std::size_t n = m.rows();
    RatMatrix sum(n, n);
    bool ok = true;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      ok = ok && proj[i].matrix * proj[i].matrix == proj[i].matrix;
      for (std::size_t j = 0; j < proj.size(); ++j)
        if (j != i) ok = ok && (proj[i].matrix * proj[j].matrix).is_zero();
      sum = sum + proj[i].matrix;
    }
    o.require(ok && sum == RatMatrix::identity(n), e.name + " projector identities");
  }

  // Renormalization identity at K = 1e3, L = 1e7, and its decrease under L -> 4L.
  {
    const auto z = load("thue_morse");
    const std::size_t K = 1000, L = kDefaultPrefix;
    const Word u = estimator_prefix(z, 4 * L + K);
    const double d1 = renormalization_check(z, pair_counts(u, z.size(), K, L));
    const double d4 = renormalization_check(z, pair_counts(u, z.size(), K, 4 * L));
    o.require(d1 <= 1e-2, "thue_morse renormalization <= 1e-2");
    o.require(d4 <= 1.5 * d1, "thue_morse renormalization dev(4L) <= 1.5 dev(L)");
    o.detail << " renorm thue_morse " << d1 << " -> " << d4 << ';';
  }
  for (const char* name : {"ex61", "rudin_shapiro"}) {
    const auto z = load(name);
    const std::size_t K = 1000, L = kDefaultPrefix;
    const Word u = estimator_prefix(z, 4 * L + K);
    const double d1 = renormalization_check(z, pair_counts(u, z.size(), K, L));
    const double d4 = renormalization_check(z, pair_counts(u, z.size(), K, 4 * L));
    o.require(d1 <= 1e-2, std::string(name) + " renormalization <= 1e-2");
    o.require(d4 <= 1.5 * d1, std::string(name) + " renormalization dev(4L) <= 1.5 dev(L)");
    o.detail << ' ' << name << ' ' << d1 << " -> " << d4 << ';';
  }

  // Birkhoff growth.
  const auto ex61 = load("ex61");
  const auto g = birkhoff_growth(ex61, {Rational(1), Rational(-1), Rational(0), Rational(0)});
  const double target = std::log(2.0) / std::log(3.0);
  o.require(std::abs(g.exponent - target) <= 0.08, "ex61 Birkhoff slope within 0.08 of log_3 2");
  o.detail << " Birkhoff slope " << g.exponent << " vs " << target << ';';

  // Verdicts under powers.
  for (const auto& e : corpus()) {
    const auto z = parse_substitution(e.dsl);
    const auto base = classify(z);
    for (unsigned j = 2; j <= 3; ++j) {
      const auto v = classify(power_substitution(z, j));
      o.require(v.verdict == base.verdict && v.detail == base.detail, e.name + " verdict under power " + std::to_string(j));
    }
  }

  // Thread-count independence.
  {
    const Word u = estimator_prefix(ex61, 1'000'000 + 512);
    const auto ref = pair_counts(u, ex61.size(), 512, 1'000'000, 1);
    bool same = true;
    for (unsigned t : {2u, 3u, 8u}) same = same && pair_counts(u, ex61.size(), 512, 1'000'000, t).counts == ref.counts;
    o.require(same, "pair counts independent of threads");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "golden verdicts", criterion1},
      {2, "exact eigenvalue multisets", criterion2},
      {3, "ergodic-class counts", criterion3},
      {4, "extreme points and cylindrical decomposition", criterion4},
      {5, "dimension at zero and point mass", criterion5},
      {6, "property suites", criterion6},
  };
  int failures = 0;
  bool surrogates = true;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("%s %d %s:%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
    if (c.id >= 3 && !o.pass) surrogates = false;
  }
  // Mutual singularity and the maximal spectral type identity are not computable;
  // they stand or fall with the surrogates checked in 3 to 6.
  std::printf("%s 7 measure-theoretic statements: not reproducible at desk scale; covered by surrogates 3-6\n",
              surrogates ? "PASS" : "FAIL");
  if (!surrogates) ++failures;
  return failures == 0 ? 0 : 1;
}
