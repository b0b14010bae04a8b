#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "helpers.hpp"
#include "substrum/error.hpp"
#include "substrum/estimator.hpp"
#include "substrum/kernels.hpp"
#include "substrum/queffelec.hpp"

using namespace substrum;

namespace {

// Limit correlations sigma_ab(k) of a constant-length substitution from the
// self-similarity of the fixed point: a lag k = qn + r splits each position
// into a block offset s and reads letters from the images of u[j] and u[j+n]
// or u[j+n+1].
class CorrelationOracle {
 public:
  explicit CorrelationOracle(const Substitution& z) : z_(z), m_(z.size()), q_(*constant_length(z)) {
    const auto mu = letter_frequencies(z);
    std::vector<Rational> s0(m_ * m_, Rational(0));
    for (std::size_t a = 0; a < m_; ++a) s0[a * m_ + a] = mu[a];
    table_.push_back(s0);
  }

  const std::vector<Rational>& at(std::size_t k) {
    while (table_.size() <= k) extend();
    return table_[k];
  }

  Rational pair(std::size_t a, std::size_t b, std::size_t k) { return at(k)[a * m_ + b]; }

 private:
  // sigma(k) = A sigma(n) + B sigma(n + 1) with k = qn + r.
  void split(std::size_t k, RatMatrix& from_n, RatMatrix& from_next) const {
    const std::size_t r = k % q_;
    const std::size_t mm = m_ * m_;
    from_n = RatMatrix(mm, mm);
    from_next = RatMatrix(mm, mm);
    const Rational w(1, static_cast<long>(q_));
    for (std::size_t s = 0; s < q_; ++s)
      for (std::size_t c = 0; c < m_; ++c)
        for (std::size_t d = 0; d < m_; ++d) {
          const std::size_t b = z_.image(static_cast<Letter>(d))[s];
          const std::size_t t = s + r;
          const std::size_t a = z_.image(static_cast<Letter>(c))[t % q_];
          (t < q_ ? from_n : from_next)(a * m_ + b, c * m_ + d) += w;
        }
  }

  void extend() {
    const std::size_t k = table_.size();
    const std::size_t n = k / q_;
    RatMatrix a, b;
    split(k, a, b);
    const std::size_t mm = m_ * m_;
    if (n + 1 < k) {
      auto x = a.apply(table_[n]);
      auto y = b.apply(table_[n + 1]);
      for (std::size_t i = 0; i < mm; ++i) x[i] += y[i];
      table_.push_back(x);
      return;
    }
    // Lag 1 refers to itself: solve (I - B) x = A sigma(0).
    REQUIRE(n + 1 == k);
    RatMatrix lhs = RatMatrix::identity(mm) - b;
    auto rhs = a.apply(table_[n]);
    for (std::size_t col = 0; col < mm; ++col) {
      std::size_t piv = col;
      while (lhs(piv, col) == 0) ++piv;
      for (std::size_t j = 0; j < mm; ++j) std::swap(lhs(piv, j), lhs(col, j));
      std::swap(rhs[piv], rhs[col]);
      for (std::size_t r = 0; r < mm; ++r) {
        if (r == col || lhs(r, col) == 0) continue;
        const Rational f = lhs(r, col) / lhs(col, col);
        for (std::size_t j = 0; j < mm; ++j) lhs(r, j) -= f * lhs(col, j);
        rhs[r] -= f * rhs[col];
      }
    }
    for (std::size_t i = 0; i < mm; ++i) rhs[i] /= lhs(i, i);
    table_.push_back(rhs);
  }

  Substitution z_;
  std::size_t m_;
  std::size_t q_;
  std::vector<std::vector<Rational>> table_;
};

Rational function_correlation(CorrelationOracle& o, const std::vector<Rational>& f, std::size_t k) {
  Rational s = 0;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < f.size(); ++b) s += f[a] * f[b] * o.pair(a, b, k);
  return s;
}

std::vector<Substitution> estimable_corpus() {
  std::vector<Substitution> out;
  for (const auto& e : corpus())
    if (e.name != "periodic") out.push_back(parse_substitution(e.dsl));
  return out;
}

double det(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

}  // namespace

TEST_CASE("correlation oracle reproduces the Thue-Morse recursion") {
  CorrelationOracle o(test::load("thue_morse"));
  const std::vector<Rational> f{Rational(1), Rational(-1)};
  // gamma(0) = 1, gamma(2n) = gamma(n), gamma(2n+1) = -(gamma(n) + gamma(n+1)) / 2
  std::vector<Rational> gamma{Rational(1)};
  gamma.push_back(Rational(-1, 3));
  for (std::size_t k = 2; k < 200; ++k)
    gamma.push_back(k % 2 ? -(gamma[k / 2] + gamma[k / 2 + 1]) / 2 : gamma[k / 2]);
  for (std::size_t k = 0; k < 200; ++k) CHECK(function_correlation(o, f, k) == gamma[k]);
}

TEST_CASE("kernels agree with the scalar reference") {
  std::mt19937_64 rng(99);
  std::vector<std::uint64_t> a(1200), b(1200);
  for (auto& x : a) x = rng();
  for (auto& x : b) x = rng();
  for (auto isa : kernels::supported_isas()) {
    CAPTURE(kernels::name(isa));
    for (std::size_t off : {0, 1, 3, 7, 9}) {
      for (std::size_t words : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 123, 124, 127, 128, 129, 1000}) {
        CHECK(kernels::and_popcount(isa, a.data() + off, b.data(), words) ==
              kernels::detail::and_popcount_scalar(a.data() + off, b.data(), words));
      }
    }
    // saturation of byte counters in long runs of ones
    std::vector<std::uint64_t> ones(5000, ~std::uint64_t{0});
    CHECK(kernels::and_popcount(isa, ones.data(), ones.data(), ones.size()) == 64u * 5000u);
  }
  CHECK(kernels::supported(kernels::Isa::Scalar));
  CHECK(kernels::supported(kernels::active()));
}

TEST_CASE("bitset and direct routes count the same pairs on every kernel") {
  const std::vector<std::size_t> lags{0, 1, 2, 63, 64, 65, 127, 128, 129, 200, 255};
  const auto saved = kernels::active();
  for (const auto& z : estimable_corpus()) {
    CAPTURE(z.to_dsl());
    const std::size_t L = 10007;
    const Word u = estimator_prefix(z, L + 256);
    const auto direct = pair_counts_direct(u, z.size(), lags, L);
    for (auto isa : kernels::supported_isas()) {
      kernels::set_active(isa);
      const auto pc = pair_counts(u, z.size(), 255, L, 1);
      const std::size_t m = z.size();
      for (std::size_t i = 0; i < lags.size(); ++i)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) CHECK(pc.count(lags[i], a, b) == direct[(i * m + a) * m + b]);
    }
  }
  kernels::set_active(saved);
}

TEST_CASE("pair counts do not depend on the thread count") {
  auto z = test::load("ex61");
  const Word u = estimator_prefix(z, 200000 + 700);
  const auto one = pair_counts(u, z.size(), 700, 200000, 1);
  for (unsigned t : {2u, 3u, 8u, 64u}) CHECK(pair_counts(u, z.size(), 700, 200000, t).counts == one.counts);
}

TEST_CASE("estimates converge to the exact correlations") {
  struct Case {
    const char* name;
    double tol;
  };
  for (auto [name, tol] : {Case{"thue_morse", 1e-4}, Case{"ex61", 2e-2}, Case{"ex63", 1e-2}, Case{"rudin_shapiro", 1e-2},
                           Case{"modified_rudin_shapiro", 1e-2}, Case{"ex62", 2e-2}}) {
    const std::string label = name;
    CAPTURE(label);
    auto z = test::load(label);
    CorrelationOracle o(z);
    const std::size_t L = 1'000'000, K = 100;
    const Word u = estimator_prefix(z, L + K);
    const auto pc = pair_counts(u, z.size(), K, L);
    double worst = 0;
    for (std::size_t k = 0; k <= K; ++k)
      for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = 0; b < z.size(); ++b)
          worst = std::max(worst, std::abs(pc.sigma(a, b, k) - o.pair(a, b, k).convert_to<double>()));
    CHECK(worst < tol);
  }
}

TEST_CASE("lag-zero bookkeeping and Hermitian symmetry") {
  for (const auto& z : estimable_corpus()) {
    CAPTURE(z.to_dsl());
    const std::size_t L = 300000, K = 10, m = z.size();
    const Word u = estimator_prefix(z, L + 2 * K);
    const auto pc = pair_counts(u, m, K, L);
    const double slack = 10.0 / static_cast<double>(L);
    double total = 0;
    for (std::size_t a = 0; a < m; ++a) {
      total += pc.sigma(a, a, 0);
      for (std::size_t b = 0; b < m; ++b) {
        if (a != b) CHECK(pc.count(0, a, b) == 0);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    // sigma_ba(-k) estimated independently on the window n in [K, L + K)
    for (std::size_t k = 0; k <= K; ++k)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          std::uint64_t back = 0;
          for (std::size_t n = K; n < L + K; ++n) back += (u[n - k] == b && u[n] == a);
          CHECK(std::abs(pc.sigma(a, b, k) - static_cast<double>(back) / static_cast<double>(L)) <= slack);
        }
  }
}

TEST_CASE("lag-zero frequencies match the Perron-Frobenius vector") {
  for (const auto& z : estimable_corpus()) {
    const std::size_t L = 2'000'000;
    const auto pc = pair_counts(estimator_prefix(z, L), z.size(), 0, L);
    const auto mu = letter_frequencies(z);
    // frequency discrepancy of substitution prefixes decays like L^(alpha - 1); allow that
    for (std::size_t a = 0; a < z.size(); ++a) CHECK(std::abs(pc.sigma(a, a, 0) - mu[a].convert_to<double>()) < 5e-3);
  }
}

TEST_CASE("correlation tables are positive definite sequences") {
  for (const auto& z : estimable_corpus()) {
    CAPTURE(z.to_dsl());
    std::vector<Rational> f(z.size());
    for (std::size_t a = 0; a < f.size(); ++a) f[a] = Rational(static_cast<long>(a % 3) - 1, 1 + static_cast<long>(a));
    if (std::all_of(f.begin(), f.end(), [](const Rational& x) { return x == 0; })) f[0] = 1;
    auto t = correlations(z, CorrelationFunction::cylindrical(f), 64, 200000);
    for (std::size_t order = 1; order <= 4; ++order) {
      std::vector<std::vector<double>> a(order, std::vector<double>(order));
      for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j) a[i][j] = t.at(static_cast<long>(i) - static_cast<long>(j)).real();
      CHECK(det(a) >= -1e-6);
    }
    Rational norm = 0;
    const auto mu = letter_frequencies(z);
    for (std::size_t a = 0; a < f.size(); ++a) norm += f[a] * f[a] * mu[a];
    CHECK(std::abs(t.coeffs[0].real() - norm.convert_to<double>()) < 5e-3);
  }
}

TEST_CASE("renormalization identity") {
  auto tm = test::load("thue_morse");
  const std::size_t K = 1000;
  const Word u = estimator_prefix(tm, 4'000'000 + K);
  const auto small = pair_counts(u, 2, K, 1'000'000);
  const auto large = pair_counts(u, 2, K, 4'000'000);
  const double d1 = renormalization_check(tm, small);
  const double d4 = renormalization_check(tm, large);
  CHECK(d1 <= 1e-2);
  CHECK(d4 <= 1.5 * d1);

  // n = 0 column: the identity only moves letter frequencies around
  for (const auto& z : estimable_corpus()) {
    const std::size_t L = 500000;
    const auto pc = pair_counts(estimator_prefix(z, L), z.size(), 0, L);
    CHECK(renormalization_check(z, pc) <= 10.0 / static_cast<double>(L) + 1e-3);
  }
}

TEST_CASE("point mass at zero") {
  auto tm = test::load("thue_morse");
  auto mean_zero = correlations(tm, CorrelationFunction::cylindrical({Rational(1), Rational(-1)}), 1000, 1'000'000);
  CHECK(point_mass_at_zero(mean_zero) <= 5e-3);
  auto constant = correlations(tm, CorrelationFunction::cylindrical({Rational(1), Rational(1)}), 1000, 100000);
  CHECK(point_mass_at_zero(constant) == doctest::Approx(1.0));
  auto ex61 = test::load("ex61");
  auto one = correlations(ex61, CorrelationFunction::cylindrical({Rational(1), 0, 0, 0}), 1000, 1'000'000);
  CHECK(std::abs(point_mass_at_zero(one) - 1.0 / 16) <= 5e-3);
}

TEST_CASE("Fejer ball mass") {
  auto tm = test::load("thue_morse");
  auto constant = correlations(tm, CorrelationFunction::cylindrical({Rational(1), Rational(1)}), 512, 100000);
  for (double r : {0.5, 0.25, 1.0 / 64, 1.0 / 512}) CHECK(ball_mass(constant, r) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ball_mass(constant, 1.0 / 1024), Error);

  auto f = correlations(tm, CorrelationFunction::cylindrical({Rational(1), Rational(-1)}), 1024, 1'000'000);
  double prev = 1e9;
  for (unsigned n = 4; n <= 10; ++n) {
    const double m = ball_mass(f, std::ldexp(1.0, -static_cast<int>(n)));
    CHECK(m < prev);
    CHECK(m >= 0);
    prev = m;
  }
}

TEST_CASE("dimension fit") {
  auto tm = test::load("thue_morse");
  const std::vector<Rational> f{Rational(1), Rational(-1)};
  auto d = dimension_fit(tm, f, 4, 10, 1024, 1'000'000);
  CHECK(d.d_hat >= 1.5);
  CHECK(d.d_pred_lower_bound);
  CHECK(d.radii.size() == 7);
  // too few scales
  CHECK_THROWS_AS(dimension_fit(tm, f, 4, 7, 1024, 100000), PreconditionError);

  auto ex61 = test::load("ex61");
  auto nonzero_mean = dimension_fit(ex61, {Rational(1), 0, 0, 0}, 3, 7, 4096, 1'000'000);
  CHECK(nonzero_mean.j == 1);
  CHECK(nonzero_mean.d_pred == 0);
  CHECK(std::abs(nonzero_mean.d_hat) < 0.15);
}

TEST_CASE("Birkhoff growth") {
  auto ex61 = test::load("ex61");
  auto g = birkhoff_growth(ex61, {Rational(1), Rational(-1), 0, 0});
  CHECK(g.expected == doctest::Approx(std::log(2.0) / std::log(3.0)));
  CHECK(std::abs(g.exponent - g.expected) < 0.08);
  CHECK(g.lengths.front() == 81);
  CHECK(g.lengths.back() == 531441);

  auto tm = test::load("thue_morse");
  auto b = birkhoff_growth(tm, {Rational(1), Rational(-1)});
  CHECK(std::abs(b.exponent) < 0.05);
  CHECK(b.expected == 0);
  auto c = birkhoff_growth(tm, {Rational(1), Rational(1)});
  CHECK(c.exponent == doctest::Approx(1.0));
  auto zero = birkhoff_growth(tm, {Rational(0), Rational(0)});
  CHECK(zero.degenerate);
  CHECK(zero.exponent == 0);
}

TEST_CASE("suspension kernel") {
  CHECK(suspension_kernel(0) == 1.0);
  CHECK(suspension_kernel(1) == doctest::Approx(0.0));
  CHECK(suspension_kernel(0.5) == doctest::Approx(4.0 / (M_PI * M_PI)));
  CHECK(suspension_kernel(-0.3) == doctest::Approx(suspension_kernel(0.3)));
}

TEST_CASE("coefficient parsing and descriptors") {
  auto c = parse_coefficients("1 -1, 1/2\t0");
  CHECK(c == std::vector<Rational>{Rational(1), Rational(-1), Rational(1, 2), Rational(0)});
  CHECK_THROWS_AS(parse_coefficients("1 x"), Error);
  CHECK_THROWS_AS(parse_coefficients("  "), Error);
  CHECK(CorrelationFunction::cylindrical(c).describe() == "cylindrical(1,-1,1/2,0)");
  CHECK(CorrelationFunction::pair(0, 3).describe() == "pair(0,3)");
}

TEST_CASE("correlation cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "substrum-cache-test";
  std::filesystem::remove_all(dir);
  EstimatorOptions opt;
  opt.cache_dir = dir;
  auto z = test::load("ex63");
  auto f = CorrelationFunction::cylindrical({Rational(1), Rational(-1, 3), Rational(2, 7)});
  auto first = correlations(z, f, 300, 50000, opt);
  CHECK_FALSE(first.from_cache);
  auto second = correlations(z, f, 300, 50000, opt);
  CHECK(second.from_cache);
  CHECK(second.coeffs == first.coeffs);
  // a different budget is a different key
  CHECK_FALSE(correlations(z, f, 300, 50001, opt).from_cache);
  std::filesystem::remove_all(dir);
}

TEST_CASE("budgets") {
  EstimatorOptions opt;
  opt.max_symbols = 1000;
  auto z = test::load("thue_morse");
  CHECK_THROWS_AS(correlations(z, CorrelationFunction::pair(0, 0), 10, 5000, opt), BudgetError);
  CHECK_THROWS_AS(correlations(z, CorrelationFunction::pair(0, 2), 10, 500), Error);
  CHECK_THROWS_AS(correlations(z, CorrelationFunction::pair(0, 0), 500, 500), Error);
}
