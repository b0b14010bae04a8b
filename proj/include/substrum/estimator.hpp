#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "substrum/matrix.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

inline constexpr std::size_t kDefaultPrefix = 10'000'000;
inline constexpr std::size_t kDefaultLags = 4096;

struct EstimatorOptions {
  /// Worker threads for the lag loop; 0 means the hardware concurrency.
  unsigned threads = 0;
  /// Correlation tables are read from and written to this directory when set.
  std::optional<std::filesystem::path> cache_dir;
  /// Upper bound on L + K, the number of fixed-point symbols materialized.
  std::size_t max_symbols = std::size_t{1} << 30;
};

/// Exact lag statistics of the fixed-point prefix:
/// count(k, a, b) = #{n < L : u[n + k] = a, u[n] = b} for 0 <= k <= K.
struct PairCounts {
  std::size_t alphabet_size = 0;
  std::size_t max_lag = 0;
  std::size_t prefix_len = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t count(std::size_t k, std::size_t a, std::size_t b) const {
    return counts[(k * alphabet_size + a) * alphabet_size + b];
  }
  /// The estimate of the correlation coefficient of 1_a and 1_b at lag k.
  double sigma(std::size_t a, std::size_t b, std::size_t k) const {
    return static_cast<double>(count(k, a, b)) / static_cast<double>(prefix_len);
  }
};

/// Bitset route: one AND-popcount per letter pair and lag, on the active kernel.
/// u must hold at least L + K symbols.
PairCounts pair_counts(const Word& u, std::size_t alphabet_size, std::size_t max_lag, std::size_t prefix_len,
                       unsigned threads = 0);

/// Direct lag-dot route over the letters, for the listed lags only. Entry
/// (i * m + a) * m + b counts lag lags[i].
std::vector<std::uint64_t> pair_counts_direct(const Word& u, std::size_t alphabet_size,
                                              const std::vector<std::size_t>& lags, std::size_t prefix_len);

/// What a correlation table measures: a pair of letter cylinders, or a
/// cylindrical function sum_a b_a 1_a paired with itself.
struct CorrelationFunction {
  enum class Kind { Pair, Cylindrical };
  Kind kind = Kind::Cylindrical;
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<Rational> coeffs;

  static CorrelationFunction pair(std::size_t a, std::size_t b);
  static CorrelationFunction cylindrical(std::vector<Rational> coeffs);
  std::string describe() const;
};

/// Parses whitespace or comma separated rationals such as "1 -1 0 0" or "1/2,-1/2".
std::vector<Rational> parse_coefficients(const std::string& text);

struct CorrelationTable {
  /// sigma_hat(k) for k = 0..K
  std::vector<std::complex<double>> coeffs;
  std::size_t prefix_len = 0;
  std::uint64_t substitution_hash = 0;
  SeedLetter seed;
  std::string function;
  bool from_cache = false;

  std::size_t max_lag() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  /// sigma_hat at any integer lag, using sigma_hat(-k) = conj(sigma_hat(k)).
  std::complex<double> at(long k) const;
};

/// The fixed-point prefix used by every estimator routine.
Word estimator_prefix(const Substitution& z, std::size_t length, std::size_t max_symbols = std::size_t{1} << 30);

CorrelationTable correlation_table(const PairCounts& counts, const CorrelationFunction& f);

/// (1/L) sum_{n<L} f(u[n+k]) conj(f(u[n])) for k = 0..K.
CorrelationTable correlations(const Substitution& z, const CorrelationFunction& f, std::size_t max_lag,
                              std::size_t prefix_len, const EstimatorOptions& options = {});

/// Max over (a, b) and n <= K/q of |sigma_ab(qn) - (1/q) sum_cd C[(a,b),(c,d)] sigma_cd(n)|.
double renormalization_check(const Substitution& z, const PairCounts& counts);
double renormalization_check(const Substitution& z, std::size_t max_lag, std::size_t prefix_len,
                             const EstimatorOptions& options = {});

/// Cesaro mean (1/K) sum_{k<K} sigma_hat(k), estimating the atom at 0.
double point_mass_at_zero(const CorrelationTable& table);

/// Fejer mean (1/N) sum_{|k|<N} (1 - |k|/N) sigma_hat(k) with N = round(1/r); comparable
/// to the mass of the ball of radius r about 0 up to a constant factor.
double ball_mass(const CorrelationTable& table, double r);

struct DimensionEstimate {
  std::size_t q = 0;
  unsigned n_lo = 0;
  unsigned n_hi = 0;
  std::vector<double> radii;
  std::vector<double> masses;
  /// masses divided by |log r|^(kappa-1) when kappa > 1.
  std::vector<double> corrected;
  double d_hat = 0;
  /// Root mean square residual of the log-log fit.
  double residual = 0;
  /// 2 - 2 log_q |theta_j| when |theta_j| > 1; otherwise the prediction is only d >= 2 - eps.
  double d_pred = 0;
  bool d_pred_lower_bound = false;
  std::size_t j = 0;
  double theta_modulus = 0;
  unsigned kappa = 0;
  bool kappa_corrected = false;
  double point_mass = 0;
};

/// Log-log slope of ball_mass over r = q^-n for n_lo <= n <= n_hi.
DimensionEstimate dimension_fit(const Substitution& z, const std::vector<Rational>& f, unsigned n_lo, unsigned n_hi,
                                std::size_t max_lag, std::size_t prefix_len, const EstimatorOptions& options = {});
DimensionEstimate dimension_fit(const Substitution& z, const std::vector<Rational>& f, const CorrelationTable& table,
                                unsigned n_lo, unsigned n_hi);

struct BirkhoffGrowth {
  std::vector<std::size_t> lengths;
  /// max_{M <= N} |S_M| at each N
  std::vector<double> max_abs;
  double exponent = 0;
  /// All partial sums vanish; the exponent is reported as 0.
  bool degenerate = false;
  /// log_q |theta_j|, or 0 when |theta_j| <= 1.
  double expected = 0;
};

/// Growth exponent of S_N = sum_{n<N} f(u[n]) over N = q^n_lo .. q^n_hi.
BirkhoffGrowth birkhoff_growth(const Substitution& z, const std::vector<Rational>& f, unsigned n_lo = 4,
                               unsigned n_hi = 12);

/// (sin(pi w) / (pi w))^2, equal to 1 at w = 0.
double suspension_kernel(double omega);

/// Fixed-tree pairwise sum; the result depends only on the input order.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace substrum
