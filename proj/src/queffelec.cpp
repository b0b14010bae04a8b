#include "substrum/queffelec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "substrum/error.hpp"

namespace substrum {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t require_constant_length(const Substitution& z) {
  auto q = constant_length(z);
  if (!q) throw PreconditionError("substitution is not of constant length");
  return *q;
}

// Solves a square rational system; nothing when singular.
std::optional<std::vector<Rational>> solve(RatMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a(piv, col) == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      const Rational f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a(i, i);
  return b;
}

std::optional<Rational> rationalize(double x, long max_den = 1000000, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued fraction convergents.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) return Rational(h1, k1);
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

CMatrix to_complex(const RatMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  return out;
}

}  // namespace

std::vector<Rational> EigenspaceF::vector_at(const std::vector<Rational>& w) const {
  if (w.size() != k) throw Error("class chart needs k coordinates");
  std::vector<Rational> v(alphabet_size * alphabet_size, Rational(0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t p = 0; p < v.size(); ++p) v[p] += w[i] * basis[i][p];
  return v;
}

EigenspaceF eigenspace_F(const Substitution& z) { return eigenspace_F(z, ergodic_classes(z)); }

EigenspaceF eigenspace_F(const Substitution& z, const ErgodicClassification& classes) {
  const std::size_t q = require_constant_length(z);
  const std::size_t m = z.size();
  const std::size_t n = m * m;
  RatMatrix a = coincidence_matrix(z).transpose().cast<Rational>();
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= Rational(static_cast<long>(q));
  const auto kernel = nullspace(a);
  if (kernel.size() != classes.k)
    throw Error("dim ker(C^t - qI) = " + std::to_string(kernel.size()) + " differs from k = " +
                std::to_string(classes.k));

  // Class values of each kernel vector; they must be constant on each class.
  const std::size_t k = classes.k;
  RatMatrix chart(k, k);
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t i = 0; i < k; ++i) {
      const auto& cls = classes.classes[i];
      const Rational value = kernel[b][cls.front()];
      for (std::size_t p : cls)
        if (kernel[b][p] != value) throw Error("eigenvector of C^t is not constant on an ergodic class");
      chart(b, i) = value;
    }

  EigenspaceF out;
  out.k = k;
  out.alphabet_size = m;
  // basis_i = sum_b c_b kernel_b with chart^T c = e_i
  const RatMatrix ct = chart.transpose();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Rational> e(k, Rational(0));
    e[i] = 1;
    auto c = solve(ct, e);
    if (!c) throw Error("class chart of F is singular");
    std::vector<Rational> v(n, Rational(0));
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t p = 0; p < n; ++p) v[p] += (*c)[b] * kernel[b][p];
    for (std::size_t p : classes.transitive)
      if (v[p] != 0) out.zero_on_transitive = false;
    out.basis.push_back(std::move(v));
  }
  return out;
}

RatMatrix associated_matrix(const std::vector<Rational>& v, std::size_t m) {
  RatMatrix w(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) w(a, b) = v[pair_index(a, b, m)];
  return w;
}

CMatrix associated_matrix(const EigenspaceF& f, const std::vector<std::complex<double>>& w) {
  const std::size_t m = f.alphabet_size;
  CMatrix out(m, m);
  for (std::size_t i = 0; i < f.k; ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) out(a, b) += w[i] * f.basis[i][pair_index(a, b, m)].convert_to<double>();
  return out;
}

std::vector<Rational> letter_frequencies(const Substitution& z) {
  const std::size_t q = require_constant_length(z);
  RatMatrix s = substitution_matrix(z).cast<Rational>();
  for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) -= Rational(static_cast<long>(q));
  auto kernel = nullspace(s);
  if (kernel.size() != 1) throw PreconditionError("Perron-Frobenius eigenspace is not one-dimensional");
  Rational total = 0;
  for (const auto& x : kernel[0]) total += x;
  for (auto& x : kernel[0]) x /= total;
  return kernel[0];
}

bool is_psd(const RatMatrix& input) {
  RatMatrix a = input;
  const std::size_t n = a.rows();
  std::vector<char> done(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    // Largest remaining diagonal pivot; a zero diagonal forces a zero row.
    std::optional<std::size_t> piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (a(i, i) < 0) return false;
      if (a(i, i) > 0 && (!piv || a(i, i) > a(*piv, *piv))) piv = i;
    }
    if (!piv) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (!done[i] && !done[j] && a(i, j) != 0) return false;
      return true;
    }
    const std::size_t p = *piv;
    done[p] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || a(i, p) == 0) continue;
      const Rational f = a(i, p) / a(p, p);
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j]) a(i, j) -= f * a(p, j);
    }
  }
  return true;
}

namespace {

struct ExactSimplex {
  std::vector<std::vector<Rational>> constraints;  // l_s(w) = sum_i w_i c_{s,i} >= 0
};

// Joint spectral decomposition of the commuting symmetric class matrices A_i,
// certified exactly: W(w) = sum_s l_s(w) E_s with E_s orthogonal projectors.
std::optional<ExactSimplex> commuting_constraints(const std::vector<RatMatrix>& mats) {
  const std::size_t k = mats.size();
  const std::size_t m = mats.front().rows();
  for (const auto& a : mats)
    if (!(a == a.transpose())) return std::nullopt;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (!(mats[i] * mats[j] == mats[j] * mats[i])) return std::nullopt;

  // Generic combination separates the joint eigenspaces.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<Eigen::MatrixXd> dense;
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c)
        d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = mats[i](r, c).convert_to<double>();
    g += std::sqrt(2.0 + static_cast<double>(i) * 1.618) * d;
    dense.push_back(std::move(d));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  if (solver.info() != Eigen::Success) return std::nullopt;

  std::vector<std::vector<Rational>> tuples;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(m); ++s) {
    const Eigen::VectorXd v = solver.eigenvectors().col(s);
    std::vector<Rational> t;
    for (std::size_t i = 0; i < k; ++i) {
      auto r = rationalize(v.dot(dense[i] * v));
      if (!r) return std::nullopt;
      t.push_back(*r);
    }
    if (std::find(tuples.begin(), tuples.end(), t) == tuples.end()) tuples.push_back(std::move(t));
  }

  std::vector<std::vector<Rational>> spectra(k);
  for (const auto& t : tuples)
    for (std::size_t i = 0; i < k; ++i)
      if (std::find(spectra[i].begin(), spectra[i].end(), t[i]) == spectra[i].end()) spectra[i].push_back(t[i]);

  const RatMatrix id = RatMatrix::identity(m);
  // Each A_i is annihilated by the product over its claimed spectrum.
  for (std::size_t i = 0; i < k; ++i) {
    RatMatrix prod = id;
    for (const auto& mu : spectra[i]) prod = prod * (mats[i] - mu * id);
    if (!prod.is_zero()) return std::nullopt;
  }
  RatMatrix total(m, m);
  for (const auto& t : tuples) {
    RatMatrix e = id;
    for (std::size_t i = 0; i < k; ++i)
      for (const auto& mu : spectra[i])
        if (mu != t[i]) e = e * ((Rational(1) / (t[i] - mu)) * (mats[i] - mu * id));
    if (e.is_zero()) return std::nullopt;
    for (std::size_t i = 0; i < k; ++i)
      if (!(mats[i] * e == t[i] * e)) return std::nullopt;
    total = total + e;
  }
  if (!(total == id)) return std::nullopt;
  return ExactSimplex{tuples};
}

// Vertices of {w : w_0 = 1, sum_i w_i c_{s,i} >= 0} by active-set enumeration.
std::vector<std::vector<Rational>> simplex_vertices(const ExactSimplex& sx, std::size_t k) {
  std::vector<std::vector<Rational>> vertices;
  if (k == 1) return {{Rational(1)}};
  const std::size_t d = k - 1;
  const std::size_t nc = sx.constraints.size();
  if (nc < d) return vertices;
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    RatMatrix a(d, d);
    std::vector<Rational> rhs(d);
    for (std::size_t r = 0; r < d; ++r) {
      const auto& c = sx.constraints[idx[r]];
      for (std::size_t j = 0; j < d; ++j) a(r, j) = c[j + 1];
      rhs[r] = -c[0];
    }
    if (auto sol = solve(a, rhs)) {
      std::vector<Rational> w{Rational(1)};
      w.insert(w.end(), sol->begin(), sol->end());
      bool feasible = true;
      for (const auto& c : sx.constraints) {
        Rational s = 0;
        for (std::size_t i = 0; i < k; ++i) s += w[i] * c[i];
        if (s < 0) {
          feasible = false;
          break;
        }
      }
      if (feasible && std::find(vertices.begin(), vertices.end(), w) == vertices.end()) vertices.push_back(w);
    }
    std::size_t pos = d;
    while (pos > 0 && idx[pos - 1] == nc - d + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t r = pos; r < d; ++r) idx[r] = idx[r - 1] + 1;
  }
  return vertices;
}

// ---- numeric fallback ------------------------------------------------------

struct RealChart {
  CMatrix base;                // W at the origin of the chart
  std::vector<CMatrix> dirs;   // Hermitian directions
  // Map from chart parameters back to class coordinates.
  std::vector<std::pair<std::size_t, bool>> param_class;  // (class, imaginary part?)
  std::vector<int> partner;                               // transposed class per class
};

CMatrix combine(const RealChart& ch, const std::vector<double>& x) {
  CMatrix w = ch.base;
  for (std::size_t r = 0; r < x.size(); ++r) w = w + std::complex<double>(x[r], 0) * ch.dirs[r];
  return w;
}

std::pair<double, Eigen::VectorXcd> min_eig(const CMatrix& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(w));
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

struct Cut {
  std::vector<double> normal;  // normal . x + offset >= 0
  double offset;
};

Cut cut_from(const RealChart& ch, const Eigen::VectorXcd& v) {
  auto quad = [&](const CMatrix& m) {
    std::complex<double> s = 0;
    for (std::size_t a = 0; a < m.rows(); ++a)
      for (std::size_t b = 0; b < m.cols(); ++b)
        s += std::conj(v(static_cast<Eigen::Index>(a))) * m(a, b) * v(static_cast<Eigen::Index>(b));
    return s.real();
  };
  Cut c;
  c.offset = quad(ch.base);
  double norm = 0;
  for (const auto& d : ch.dirs) {
    c.normal.push_back(quad(d));
    norm += c.normal.back() * c.normal.back();
  }
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (auto& x : c.normal) x /= norm;
    c.offset /= norm;
  }
  return c;
}

bool same_cut(const Cut& a, const Cut& b) {
  double d = std::abs(a.offset - b.offset);
  for (std::size_t i = 0; i < a.normal.size(); ++i) d += std::abs(a.normal[i] - b.normal[i]);
  return d < 1e-7;
}

std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-10) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

std::vector<std::vector<double>> polytope_vertices(const std::vector<Cut>& cuts, std::size_t d, bool& truncated) {
  std::vector<std::vector<double>> out;
  const std::size_t nc = cuts.size();
  if (nc < d) return out;
  double combos = 1;
  for (std::size_t i = 0; i < d; ++i) combos = combos * static_cast<double>(nc - i) / static_cast<double>(i + 1);
  if (combos > 3e6) {
    truncated = true;
    return out;
  }
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (auto i : idx) {
      a.push_back(cuts[i].normal);
      b.push_back(-cuts[i].offset);
    }
    if (auto x = solve_dense(a, b)) {
      bool feasible = true;
      for (const auto& c : cuts) {
        double s = c.offset;
        for (std::size_t j = 0; j < d; ++j) s += c.normal[j] * (*x)[j];
        if (s < -1e-9) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        bool dup = false;
        for (const auto& y : out) {
          double dist = 0;
          for (std::size_t j = 0; j < d; ++j) dist += std::abs(y[j] - (*x)[j]);
          if (dist < 1e-6) dup = true;
        }
        if (!dup) out.push_back(*x);
      }
    }
    std::size_t pos = d;
    while (pos > 0 && idx[pos - 1] == nc - d + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t r = pos; r < d; ++r) idx[r] = idx[r - 1] + 1;
  }
  return out;
}

ExtremePoints numeric_extreme_points(const EigenspaceF& f, const ErgodicClassification& classes) {
  ExtremePoints out;
  out.numeric = true;
  out.method = "ray-shooting with PSD boundary bisection and cutting planes";
  const std::size_t m = f.alphabet_size;
  const std::size_t k = f.k;

  RealChart ch;
  std::vector<RatMatrix> mats;
  for (std::size_t i = 0; i < k; ++i) mats.push_back(associated_matrix(f.basis[i], m));
  ch.base = to_complex(mats[0]);
  ch.partner.assign(k, -1);
  for (std::size_t i = 0; i < k; ++i) {
    const auto [a, b] = pair_letters(classes.classes[i].front(), m);
    ch.partner[i] = classes.membership[pair_index(b, a, m)];
  }
  for (std::size_t i = 1; i < k; ++i) {
    const int j = ch.partner[i];
    if (j < 0) {
      out.partial = true;
      return out;
    }
    const CMatrix ai = to_complex(mats[i]);
    if (static_cast<std::size_t>(j) == i) {
      ch.dirs.push_back(ai);
      ch.param_class.emplace_back(i, false);
    } else if (static_cast<std::size_t>(j) > i) {
      const CMatrix aj = to_complex(mats[static_cast<std::size_t>(j)]);
      ch.dirs.push_back(ai + aj);
      ch.param_class.emplace_back(i, false);
      ch.dirs.push_back(std::complex<double>(0, 1) * (ai - aj));
      ch.param_class.emplace_back(i, true);
    }
  }
  const std::size_t d = ch.dirs.size();
  auto to_class_coords = [&](const std::vector<double>& x) {
    std::vector<std::complex<double>> w(k, 0.0);
    w[0] = 1.0;
    for (std::size_t r = 0; r < d; ++r) {
      const auto [cls, imag] = ch.param_class[r];
      if (imag)
        w[cls] += std::complex<double>(0, x[r]);
      else
        w[cls] += x[r];
    }
    for (std::size_t i = 1; i < k; ++i)
      if (ch.partner[i] >= 0 && static_cast<std::size_t>(ch.partner[i]) < i) w[i] = std::conj(w[static_cast<std::size_t>(ch.partner[i])]);
    return w;
  };

  // Every W vanishes off the joint range of the class matrices; work on that range.
  {
    Eigen::MatrixXcd cols(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m * (d + 1)));
    cols.leftCols(static_cast<Eigen::Index>(m)) = to_eigen(ch.base);
    for (std::size_t r = 0; r < d; ++r)
      cols.middleCols(static_cast<Eigen::Index>(m * (r + 1)), static_cast<Eigen::Index>(m)) = to_eigen(ch.dirs[r]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cols, Eigen::ComputeThinU);
    svd.setThreshold(1e-10);
    const Eigen::Index rank = svd.rank();
    const Eigen::MatrixXcd basis = svd.matrixU().leftCols(rank);
    auto compress = [&](const CMatrix& a) {
      const Eigen::MatrixXcd c = basis.adjoint() * to_eigen(a) * basis;
      CMatrix out(static_cast<std::size_t>(rank), static_cast<std::size_t>(rank));
      for (Eigen::Index i = 0; i < rank; ++i)
        for (Eigen::Index j = 0; j < rank; ++j) out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = c(i, j);
      return out;
    };
    ch.base = compress(ch.base);
    for (auto& dir : ch.dirs) dir = compress(dir);
  }

  if (min_eig(ch.base).first <= 1e-9) {
    out.partial = true;
    return out;
  }

  // Deterministic direction set: coordinate axes plus a Kronecker sequence on the sphere.
  std::vector<std::vector<double>> directions;
  for (std::size_t r = 0; r < d; ++r)
    for (double s : {1.0, -1.0}) {
      std::vector<double> u(d, 0.0);
      u[r] = s;
      directions.push_back(u);
    }
  const std::size_t extra = 64 * d;
  for (std::size_t t = 1; t <= extra; ++t) {
    std::vector<double> u(d);
    double norm = 0;
    for (std::size_t r = 0; r < d; ++r) {
      const double alpha = std::sqrt(static_cast<double>(2 + 3 * r)) * static_cast<double>(t);
      const double frac = alpha - std::floor(alpha);
      u[r] = std::cos(2 * kPi * frac) + 0.5 * std::sin(2 * kPi * frac * (r + 1));
      norm += u[r] * u[r];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (auto& x : u) x /= norm;
    directions.push_back(u);
  }

  std::vector<Cut> cuts;
  auto add_cut = [&](const Cut& c) {
    for (const auto& e : cuts)
      if (same_cut(e, c)) return false;
    cuts.push_back(c);
    return true;
  };
  for (const auto& u : directions) {
    double hi = 1.0;
    auto at = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t r = 0; r < d; ++r) x[r] = t * u[r];
      return x;
    };
    while (min_eig(combine(ch, at(hi))).first >= 0 && hi < 1e6) hi *= 2;
    if (hi >= 1e6) continue;
    double lo = 0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      (min_eig(combine(ch, at(mid))).first >= 0 ? lo : hi) = mid;
    }
    add_cut(cut_from(ch, min_eig(combine(ch, at(lo))).second));
  }

  bool truncated = false;
  std::vector<std::vector<double>> verts;
  for (int iter = 0; iter < 60; ++iter) {
    verts = polytope_vertices(cuts, d, truncated);
    if (truncated) break;
    bool added = false;
    for (const auto& v : verts) {
      auto [lam, vec] = min_eig(combine(ch, v));
      if (lam < -1e-10 && add_cut(cut_from(ch, vec))) added = true;
    }
    if (!added) break;
  }
  for (const auto& v : verts) out.points.push_back({to_class_coords(v), std::nullopt});
  // all-ones first
  std::stable_sort(out.points.begin(), out.points.end(), [](const ExtremePoint& a, const ExtremePoint& b) {
    double da = 0, db = 0;
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      da += std::abs(a.w[i] - 1.0);
      db += std::abs(b.w[i] - 1.0);
    }
    return da < db;
  });
  out.partial = truncated || out.points.size() != k;
  return out;
}

}  // namespace

ExtremePoints extreme_points_Q(const Substitution& z) {
  const auto classes = ergodic_classes(z);
  return extreme_points_Q(z, classes, eigenspace_F(z, classes));
}

ExtremePoints extreme_points_Q(const Substitution& z, const ErgodicClassification& classes, const EigenspaceF& f) {
  const std::size_t m = z.size();
  ExtremePoints out;
  if (f.k == 1) {
    out.exact = true;
    out.method = "single point";
    out.points.push_back({{1.0}, std::vector<Rational>{Rational(1)}});
    return out;
  }
  std::vector<RatMatrix> mats;
  for (std::size_t i = 0; i < f.k; ++i) mats.push_back(associated_matrix(f.basis[i], m));
  if (auto sx = commuting_constraints(mats)) {
    auto verts = simplex_vertices(*sx, f.k);
    const std::vector<Rational> ones(f.k, Rational(1));
    std::stable_partition(verts.begin(), verts.end(), [&](const auto& v) { return v == ones; });
    bool certified = true;
    for (const auto& w : verts) {
      RatMatrix wm(m, m);
      for (std::size_t i = 0; i < f.k; ++i) wm = wm + w[i] * mats[i];
      if (!is_psd(wm)) certified = false;
      ExtremePoint p;
      for (const auto& x : w) p.w.emplace_back(x.convert_to<double>());
      p.exact = w;
      out.points.push_back(std::move(p));
    }
    if (certified) {
      out.exact = true;
      out.method = "commuting class matrices: simplex of linear constraints";
      out.partial = out.points.size() != f.k;
      return out;
    }
    out.points.clear();
  }
  return numeric_extreme_points(f, classes);
}

ExtremePoints extreme_points_Q_numeric(const ErgodicClassification& classes, const EigenspaceF& f) {
  if (f.k == 1) return {{{{1.0}, std::nullopt}}, false, true, false, "single point"};
  return numeric_extreme_points(f, classes);
}

CylindricalDecomposition decompose_lambda(const CMatrix& w, const std::vector<double>& mu) {
  const std::size_t m = w.rows();
  if (mu.size() != m) throw Error("frequency vector has the wrong size");
  double scale = 0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      scale = std::max(scale, std::abs(w(a, b)));
      if (std::abs(w(a, b) - std::conj(w(b, a))) > 1e-12 * std::max(1.0, scale))
        throw PreconditionError("associated matrix is not Hermitian");
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(w));
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");

  CylindricalDecomposition out;
  CMatrix rebuilt(m, m);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
    double kappa = solver.eigenvalues()(j);
    if (kappa < -1e-12 * std::max(1.0, scale)) throw PreconditionError("associated matrix is not positive semidefinite");
    if (kappa <= 1e-12 * std::max(1.0, scale)) continue;
    CylindricalGenerator g;
    g.weight = kappa;
    const double root = std::sqrt(kappa);
    for (std::size_t a = 0; a < m; ++a) {
      g.coeffs.push_back(root * solver.eigenvectors()(static_cast<Eigen::Index>(a), j));
      g.mean += g.coeffs.back() * mu[a];
    }
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) rebuilt(a, b) += g.coeffs[a] * std::conj(g.coeffs[b]);
    out.max_mean = std::max(out.max_mean, std::abs(g.mean));
    out.generators.push_back(std::move(g));
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rebuilt(a, b) - w(a, b)));
  return out;
}

}  // namespace substrum
