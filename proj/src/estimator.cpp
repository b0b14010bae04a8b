#include "substrum/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "substrum/bicoincidence.hpp"
#include "substrum/eigenvalues.hpp"
#include "substrum/error.hpp"
#include "substrum/kernels.hpp"

namespace substrum {

namespace {

constexpr double kPi = 3.14159265358979323846;

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t require_q(const Substitution& z) {
  auto q = constant_length(z);
  if (!q) throw PreconditionError("substitution is not of constant length");
  return *q;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double rms = 0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x.data(), x.size()) / n;
  const double my = pairwise_sum(y.data(), y.size()) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t hash, SeedLetter seed,
                                 std::size_t max_lag, std::size_t prefix_len, const std::string& function) {
  std::ostringstream name;
  name << hex(hash) << "-s" << seed.letter << "p" << seed.power << "-K" << max_lag << "-L" << prefix_len << "-f"
       << hex(fnv1a(function)) << ".csv";
  return dir / name.str();
}

std::optional<std::vector<std::complex<double>>> read_cache(const std::filesystem::path& path, std::size_t max_lag) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != "lag,re,im") return std::nullopt;
  std::vector<std::complex<double>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const char* p = line.c_str();
    const unsigned long lag = std::strtoul(p, &end, 10);
    if (*end != ',' || lag != out.size()) return std::nullopt;
    const double re = std::strtod(end + 1, &end);
    if (*end != ',') return std::nullopt;
    const double im = std::strtod(end + 1, &end);
    if (*end != '\0') return std::nullopt;
    out.emplace_back(re, im);
  }
  if (out.size() != max_lag + 1) return std::nullopt;
  return out;
}

void write_cache(const std::filesystem::path& path, const std::vector<std::complex<double>>& coeffs) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "w");
  if (!f) return;
  std::fputs("lag,re,im\n", f);
  for (std::size_t k = 0; k < coeffs.size(); ++k) std::fprintf(f, "%zu,%.17g,%.17g\n", k, coeffs[k].real(), coeffs[k].imag());
  std::fclose(f);
  std::filesystem::rename(tmp, path, ec);
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

PairCounts pair_counts(const Word& u, std::size_t alphabet_size, std::size_t max_lag, std::size_t prefix_len,
                       unsigned threads) {
  const std::size_t m = alphabet_size;
  const std::size_t L = prefix_len;
  const std::size_t K = max_lag;
  if (u.size() < L + K) throw Error("prefix shorter than L + K");
  PairCounts out{m, K, L, std::vector<std::uint64_t>((K + 1) * m * m, 0)};
  if (L == 0 || m == 0) return out;

  const std::size_t total_words = (L + K) / 64 + 2;
  const std::size_t w_len = (L + 63) / 64;
  std::vector<std::vector<std::uint64_t>> bits(m, std::vector<std::uint64_t>(total_words, 0));
  for (std::size_t i = 0; i < L + K; ++i) bits[u[i]][i / 64] |= std::uint64_t{1} << (i % 64);

  // Letter b at positions n < L.
  const std::size_t inner = m - 1;
  std::vector<std::vector<std::uint64_t>> low(inner);
  for (std::size_t b = 0; b < inner; ++b) {
    low[b].assign(bits[b].begin(), bits[b].begin() + static_cast<std::ptrdiff_t>(w_len));
    if (L % 64) low[b].back() &= (std::uint64_t{1} << (L % 64)) - 1;
  }

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(threads), std::min<std::size_t>(64, K + 1)));
  const kernels::Isa isa = kernels::active();
  auto run = [&](unsigned t) {
    std::vector<std::vector<std::uint64_t>> shifted(inner, std::vector<std::uint64_t>(total_words, 0));
    for (std::size_t s = t; s < 64 && s <= K; s += workers) {
      for (std::size_t a = 0; a < inner; ++a) {
        const auto& src = bits[a];
        auto& dst = shifted[a];
        for (std::size_t w = 0; w + 1 < total_words; ++w)
          dst[w] = s ? (src[w] >> s) | (src[w + 1] << (64 - s)) : src[w];
        dst[total_words - 1] = src[total_words - 1] >> s;
      }
      for (std::size_t k = s; k <= K; k += 64) {
        const std::size_t off = k / 64;
        for (std::size_t a = 0; a < inner; ++a)
          for (std::size_t b = 0; b < inner; ++b)
            out.counts[(k * m + a) * m + b] = kernels::and_popcount(isa, shifted[a].data() + off, low[b].data(), w_len);
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }

  // The last row and column follow from the letter counts in each window.
  std::vector<std::uint64_t> at_L(m, 0);
  for (std::size_t i = 0; i < L; ++i) ++at_L[u[i]];
  std::vector<std::uint64_t> head(m, 0), window = at_L;  // counts on [0, k) and [k, L + k)
  for (std::size_t k = 0; k <= K; ++k) {
    if (k > 0) {
      ++head[u[k - 1]];
      --window[u[k - 1]];
      ++window[u[L + k - 1]];
    }
    auto c = [&](std::size_t a, std::size_t b) -> std::uint64_t& { return out.counts[(k * m + a) * m + b]; };
    for (std::size_t a = 0; a < inner; ++a) {
      std::uint64_t s = 0;
      for (std::size_t b = 0; b < inner; ++b) s += c(a, b);
      c(a, inner) = window[a] - s;
    }
    for (std::size_t b = 0; b < inner; ++b) {
      std::uint64_t s = 0;
      for (std::size_t a = 0; a < inner; ++a) s += c(a, b);
      c(inner, b) = at_L[b] - s;
    }
    std::uint64_t s = 0;
    for (std::size_t b = 0; b < inner; ++b) s += c(inner, b);
    c(inner, inner) = window[inner] - s;
  }
  return out;
}

std::vector<std::uint64_t> pair_counts_direct(const Word& u, std::size_t alphabet_size,
                                              const std::vector<std::size_t>& lags, std::size_t prefix_len) {
  const std::size_t m = alphabet_size;
  std::vector<std::uint64_t> out(lags.size() * m * m, 0);
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (u.size() < prefix_len + lags[i]) throw Error("prefix shorter than L + k");
    std::uint64_t* row = out.data() + i * m * m;
    const Letter* ahead = u.data() + lags[i];
    for (std::size_t n = 0; n < prefix_len; ++n) ++row[ahead[n] * m + u[n]];
  }
  return out;
}

CorrelationFunction CorrelationFunction::pair(std::size_t a, std::size_t b) {
  CorrelationFunction f;
  f.kind = Kind::Pair;
  f.a = a;
  f.b = b;
  return f;
}

CorrelationFunction CorrelationFunction::cylindrical(std::vector<Rational> coeffs) {
  CorrelationFunction f;
  f.kind = Kind::Cylindrical;
  f.coeffs = std::move(coeffs);
  return f;
}

std::string CorrelationFunction::describe() const {
  if (kind == Kind::Pair) return "pair(" + std::to_string(a) + "," + std::to_string(b) + ")";
  std::string s = "cylindrical(";
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? "," : "") + coeffs[i].str();
  return s + ")";
}

std::vector<Rational> parse_coefficients(const std::string& text) {
  std::vector<Rational> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    try {
      out.emplace_back(token);
    } catch (const std::exception&) {
      throw Error("invalid coefficient '" + token + "'");
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == ',' || c == '\t' || c == '\n') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (out.empty()) throw Error("no coefficients given");
  return out;
}

std::complex<double> CorrelationTable::at(long k) const {
  const std::size_t idx = static_cast<std::size_t>(k < 0 ? -k : k);
  if (idx >= coeffs.size()) throw Error("lag outside the table");
  return k < 0 ? std::conj(coeffs[idx]) : coeffs[idx];
}

Word estimator_prefix(const Substitution& z, std::size_t length, std::size_t max_symbols) {
  if (length > max_symbols)
    throw BudgetError("prefix of " + std::to_string(length) + " symbols exceeds the budget of " +
                      std::to_string(max_symbols));
  Word u = fixed_point_prefix(z, seed_letter(z), length, std::max(max_symbols, length * 2));
  u.resize(length);
  return u;
}

CorrelationTable correlation_table(const PairCounts& counts, const CorrelationFunction& f) {
  const std::size_t m = counts.alphabet_size;
  CorrelationTable t;
  t.prefix_len = counts.prefix_len;
  t.function = f.describe();
  t.coeffs.resize(counts.max_lag + 1);
  const double inv_l = 1.0 / static_cast<double>(counts.prefix_len);
  if (f.kind == CorrelationFunction::Kind::Pair) {
    if (f.a >= m || f.b >= m) throw Error("letter index outside the alphabet");
    for (std::size_t k = 0; k <= counts.max_lag; ++k) t.coeffs[k] = static_cast<double>(counts.count(k, f.a, f.b)) * inv_l;
    return t;
  }
  if (f.coeffs.size() != m) throw Error("function needs one coefficient per letter");
  std::vector<double> b;
  for (const auto& x : f.coeffs) b.push_back(x.convert_to<double>());
  std::vector<double> terms(m * m);
  for (std::size_t k = 0; k <= counts.max_lag; ++k) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < m; ++c) terms[a * m + c] = b[a] * b[c] * static_cast<double>(counts.count(k, a, c));
    t.coeffs[k] = pairwise_sum(terms.data(), terms.size()) * inv_l;
  }
  return t;
}

CorrelationTable correlations(const Substitution& z, const CorrelationFunction& f, std::size_t max_lag,
                              std::size_t prefix_len, const EstimatorOptions& options) {
  require_q(z);
  if (!is_primitive(z).primitive) throw PreconditionError("substitution is not primitive");
  if (prefix_len == 0) throw Error("prefix length must be positive");
  if (max_lag >= prefix_len) throw Error("the number of lags must be smaller than the prefix");
  if (prefix_len + max_lag > options.max_symbols)
    throw BudgetError("L + K = " + std::to_string(prefix_len + max_lag) + " exceeds the symbol budget of " +
                      std::to_string(options.max_symbols));
  const SeedLetter seed = seed_letter(z);
  const std::string function = f.describe();
  std::optional<std::filesystem::path> path;
  if (options.cache_dir) {
    path = cache_path(*options.cache_dir, z.hash(), seed, max_lag, prefix_len, function);
    if (auto cached = read_cache(*path, max_lag)) {
      CorrelationTable t;
      t.coeffs = std::move(*cached);
      t.prefix_len = prefix_len;
      t.substitution_hash = z.hash();
      t.seed = seed;
      t.function = function;
      t.from_cache = true;
      return t;
    }
  }
  const Word u = estimator_prefix(z, prefix_len + max_lag, options.max_symbols);
  auto counts = pair_counts(u, z.size(), max_lag, prefix_len, options.threads);
  CorrelationTable t = correlation_table(counts, f);
  t.substitution_hash = z.hash();
  t.seed = seed;
  if (path) write_cache(*path, t.coeffs);
  return t;
}

double renormalization_check(const Substitution& z, const PairCounts& counts) {
  const std::size_t q = require_q(z);
  const std::size_t m = counts.alphabet_size;
  const IntMatrix c = coincidence_matrix(z);
  double worst = 0;
  for (std::size_t n = 0; n * q <= counts.max_lag; ++n) {
    for (std::size_t p = 0; p < m * m; ++p) {
      const auto [a, b] = pair_letters(p, m);
      std::int64_t rhs = 0;
      for (std::size_t r = 0; r < m * m; ++r) {
        if (!c(p, r)) continue;
        const auto [cc, d] = pair_letters(r, m);
        rhs += c(p, r) * static_cast<std::int64_t>(counts.count(n, cc, d));
      }
      const double lhs = counts.sigma(a, b, n * q);
      const double right = static_cast<double>(rhs) / (static_cast<double>(q) * static_cast<double>(counts.prefix_len));
      worst = std::max(worst, std::abs(lhs - right));
    }
  }
  return worst;
}

double renormalization_check(const Substitution& z, std::size_t max_lag, std::size_t prefix_len,
                             const EstimatorOptions& options) {
  require_q(z);
  if (prefix_len + max_lag > options.max_symbols) throw BudgetError("L + K exceeds the symbol budget");
  const Word u = estimator_prefix(z, prefix_len + max_lag, options.max_symbols);
  return renormalization_check(z, pair_counts(u, z.size(), max_lag, prefix_len, options.threads));
}

double point_mass_at_zero(const CorrelationTable& table) {
  const std::size_t k = std::max<std::size_t>(1, table.max_lag());
  std::vector<double> re(k);
  for (std::size_t i = 0; i < k; ++i) re[i] = table.coeffs[i].real();
  return pairwise_sum(re.data(), k) / static_cast<double>(k);
}

double ball_mass(const CorrelationTable& table, double r) {
  if (!(r > 0)) throw Error("radius must be positive");
  const double n_real = std::round(1.0 / r);
  if (n_real < 1) throw Error("radius too large for the Fejer estimate");
  const std::size_t n = static_cast<std::size_t>(n_real);
  if (n > table.max_lag()) throw Error("N = " + std::to_string(n) + " exceeds the number of lags");
  std::vector<double> terms(n);
  terms[0] = table.coeffs[0].real();
  for (std::size_t k = 1; k < n; ++k)
    terms[k] = 2.0 * (1.0 - static_cast<double>(k) / n_real) * table.coeffs[k].real();
  return pairwise_sum(terms.data(), n) / n_real;
}

DimensionEstimate dimension_fit(const Substitution& z, const std::vector<Rational>& f, unsigned n_lo, unsigned n_hi,
                                std::size_t max_lag, std::size_t prefix_len, const EstimatorOptions& options) {
  auto table = correlations(z, CorrelationFunction::cylindrical(f), max_lag, prefix_len, options);
  return dimension_fit(z, f, table, n_lo, n_hi);
}

DimensionEstimate dimension_fit(const Substitution& z, const std::vector<Rational>& f, const CorrelationTable& table,
                                unsigned n_lo, unsigned n_hi) {
  const std::size_t q = require_q(z);
  if (f.size() != z.size()) throw Error("function needs one coefficient per letter");
  if (std::all_of(f.begin(), f.end(), [](const Rational& x) { return x == 0; }))
    throw PreconditionError("the zero function has no spectral measure");
  DimensionEstimate est;
  est.q = q;
  est.n_lo = n_lo;
  est.n_hi = n_hi;

  const auto jk = j_pr_kappa(substitution_matrix(z), f);
  est.j = jk.j;
  est.kappa = jk.kappa;
  est.theta_modulus = 0.5 * (jk.modulus_lo + jk.modulus_hi);
  const double lq = std::log(static_cast<double>(q));
  if (jk.modulus_lo > 1.0) {
    est.d_pred = 2.0 - 2.0 * std::log(est.theta_modulus) / lq;
  } else {
    est.d_pred = 2.0;
    est.d_pred_lower_bound = true;
  }
  est.kappa_corrected = est.kappa > 1 && !est.d_pred_lower_bound;
  est.point_mass = point_mass_at_zero(table);

  std::vector<double> xs, ys;
  for (unsigned n = n_lo; n <= n_hi; ++n) {
    const double r = std::pow(static_cast<double>(q), -static_cast<double>(n));
    if (std::round(1.0 / r) > static_cast<double>(table.max_lag())) break;
    const double mass = ball_mass(table, r);
    double corrected = mass;
    if (est.kappa_corrected) corrected /= std::pow(std::abs(std::log(r)), static_cast<double>(est.kappa - 1));
    est.radii.push_back(r);
    est.masses.push_back(mass);
    est.corrected.push_back(corrected);
    if (corrected > 0) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(corrected));
    }
  }
  if (xs.size() < 5)
    throw PreconditionError("only " + std::to_string(xs.size()) + " usable scales; at least 5 are needed");
  const auto fit = least_squares(xs, ys);
  est.d_hat = fit.slope;
  est.residual = fit.rms;
  return est;
}

BirkhoffGrowth birkhoff_growth(const Substitution& z, const std::vector<Rational>& f, unsigned n_lo, unsigned n_hi) {
  const std::size_t q = require_q(z);
  if (f.size() != z.size()) throw Error("function needs one coefficient per letter");
  if (n_lo > n_hi) throw Error("empty range of scales");
  BirkhoffGrowth out;
  if (std::any_of(f.begin(), f.end(), [](const Rational& x) { return x != 0; })) {
    const auto jk = j_pr_kappa(substitution_matrix(z), f);
    if (jk.modulus_lo > 1.0) out.expected = std::log(0.5 * (jk.modulus_lo + jk.modulus_hi)) / std::log(static_cast<double>(q));
  }

  std::size_t top = 1;
  for (unsigned i = 0; i < n_hi; ++i) top *= q;
  const Word u = estimator_prefix(z, top);
  std::vector<double> b;
  for (const auto& x : f) b.push_back(x.convert_to<double>());

  std::vector<std::size_t> marks;
  std::size_t len = 1;
  for (unsigned i = 0; i < n_lo; ++i) len *= q;
  for (unsigned n = n_lo; n <= n_hi; ++n, len *= q) marks.push_back(len);

  double s = 0, best = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < top && next < marks.size(); ++i) {
    s += b[u[i]];
    best = std::max(best, std::abs(s));
    if (i + 1 == marks[next]) {
      out.lengths.push_back(marks[next]);
      out.max_abs.push_back(best);
      ++next;
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.lengths.size(); ++i)
    if (out.max_abs[i] > 0) {
      xs.push_back(std::log(static_cast<double>(out.lengths[i])));
      ys.push_back(std::log(out.max_abs[i]));
    }
  if (xs.size() < 2) {
    out.degenerate = true;
    out.exponent = 0;
    return out;
  }
  out.exponent = least_squares(xs, ys).slope;
  return out;
}

double suspension_kernel(double omega) {
  if (omega == 0) return 1.0;
  const double x = kPi * omega;
  const double s = std::sin(x) / x;
  return s * s;
}

}  // namespace substrum
