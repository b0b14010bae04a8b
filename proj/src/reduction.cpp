#include "substrum/reduction.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "substrum/error.hpp"

namespace substrum {

namespace {

std::size_t require_constant_length(const Substitution& z) {
  auto q = constant_length(z);
  if (!q) throw PreconditionError("substitution is not of constant length");
  return *q;
}

}  // namespace

HeightInfo compute_height(const Substitution& z, std::size_t budget) {
  const std::size_t q = require_constant_length(z);
  if (q < 2) throw PreconditionError("constant length must be at least 2");
  const SeedLetter seed = seed_letter(z);

  std::size_t len = q * q * q * q;
  while (len < 1024) len *= q;

  std::vector<unsigned long> history;
  HeightInfo info;
  for (;;) {
    if (len > budget)
      throw BudgetError("height did not stabilize within the symbol budget (partial g0 = " +
                        std::to_string(history.empty() ? 0 : history.back()) + ")");
    const Word u = fixed_point_prefix(z, seed, len, budget);
    unsigned long g = 0;
    for (std::size_t k = 1; k < u.size(); ++k)
      if (u[k] == u[0]) g = std::gcd(g, static_cast<unsigned long>(k));
    history.push_back(g);
    info.prefix_len_used = len;
    const std::size_t n = history.size();
    if (g != 0 && n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3]) break;
    len *= 2;
  }
  info.g0 = history.back();
  unsigned long h = info.g0;
  for (unsigned long c = std::gcd(h, static_cast<unsigned long>(q)); c > 1;
       c = std::gcd(h, static_cast<unsigned long>(q)))
    h /= c;
  info.h = h;
  return info;
}

PureBase pure_base(const Substitution& z, std::size_t budget) {
  return pure_base(z, compute_height(z, budget), budget);
}

namespace {

std::vector<std::string> block_names(const Substitution& z, const std::vector<Word>& blocks) {
  bool single_char = true;
  for (std::size_t a = 0; a < z.size(); ++a)
    if (z.alphabet().token(static_cast<Letter>(a)).size() != 1) single_char = false;
  std::vector<std::string> names;
  for (const auto& b : blocks) names.push_back(z.render(b, single_char ? "" : "."));
  std::set<std::string> distinct(names.begin(), names.end());
  bool clash = distinct.size() != names.size();
  for (const auto& n : names)
    if (n.find("->") != std::string::npos || n.front() == '#') clash = true;
  if (clash)
    for (std::size_t i = 0; i < names.size(); ++i) names[i] = "i" + std::to_string(i);
  return names;
}

}  // namespace

PureBase pure_base(const Substitution& z, const HeightInfo& info, std::size_t budget) {
  const std::size_t q = require_constant_length(z);
  PureBase base{z, {}, info.h, info};
  if (info.h == 1) {
    for (std::size_t a = 0; a < z.size(); ++a) base.phi.push_back(Word{static_cast<Letter>(a)});
    return base;
  }
  const std::size_t h = info.h;
  const Word u = fixed_point_prefix(z, seed_letter(z), std::max(info.prefix_len_used, h * 64), budget);

  std::map<Word, std::size_t> index;
  std::vector<Word> blocks;
  auto intern = [&](const Word& w) {
    auto [it, fresh] = index.emplace(w, blocks.size());
    if (fresh) blocks.push_back(w);
    return it->second;
  };
  for (std::size_t k = 0; (k + 1) * h <= u.size(); ++k)
    intern(Word(u.begin() + static_cast<std::ptrdiff_t>(k * h), u.begin() + static_cast<std::ptrdiff_t>((k + 1) * h)));

  // Close under eta; z(phi(i)) has length q*h and splits into q blocks.
  std::vector<Word> images;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Word img = z.apply(blocks[i]);
    Word eta_img;
    for (std::size_t k = 0; k < q; ++k)
      eta_img.push_back(static_cast<Letter>(intern(
          Word(img.begin() + static_cast<std::ptrdiff_t>(k * h), img.begin() + static_cast<std::ptrdiff_t>((k + 1) * h)))));
    images.push_back(std::move(eta_img));
  }
  if (blocks.size() > (std::size_t{1} << 16)) throw BudgetError("pure base alphabet too large");

  base.eta = Substitution(Alphabet(block_names(z, blocks)), std::move(images));
  base.phi = std::move(blocks);
  return base;
}

bool verify_conjugacy(const Substitution& z, const PureBase& base) {
  for (std::size_t i = 0; i < base.eta.size(); ++i) {
    Word lhs;
    for (Letter b : base.eta.image(static_cast<Letter>(i))) lhs.insert(lhs.end(), base.phi[b].begin(), base.phi[b].end());
    if (lhs != z.apply(base.phi[i])) return false;
  }
  return true;
}

std::vector<Word> split_at_occurrences(const Word& w, const Word& u) {
  std::vector<Word> parts;
  if (u.empty() || w.size() < u.size() || !std::equal(u.begin(), u.end(), w.begin())) return parts;
  std::size_t start = 0;
  for (std::size_t i = 1; i + u.size() <= w.size(); ++i)
    if (std::equal(u.begin(), u.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) {
      parts.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(start), w.begin() + static_cast<std::ptrdiff_t>(i));
      start = i;
    }
  parts.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(start), w.end());
  return parts;
}

ReturnWordSystem return_words(const Substitution& z, const Word& u, std::size_t budget) {
  if (u.empty()) throw PreconditionError("return words need a nonempty prefix");
  const std::size_t q = require_constant_length(z);
  const SeedLetter seed = seed_letter(z);

  std::size_t len = std::max<std::size_t>(4096, 64 * u.size());
  for (;;) {
    if (len > budget) throw BudgetError("return-word set did not close within the symbol budget");
    const Word U = fixed_point_prefix(z, seed, len, budget);
    if (U.size() < u.size() || !std::equal(u.begin(), u.end(), U.begin()))
      throw PreconditionError("u is not a prefix of the fixed point");

    std::map<Word, std::size_t> index;
    std::vector<Word> words;
    std::size_t last = 0, gap = 0, last_new = 0;
    for (std::size_t i = 1; i + u.size() <= U.size(); ++i) {
      if (!std::equal(u.begin(), u.end(), U.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      Word v(U.begin() + static_cast<std::ptrdiff_t>(last), U.begin() + static_cast<std::ptrdiff_t>(i));
      gap = std::max(gap, i - last);
      if (index.emplace(v, words.size()).second) {
        words.push_back(std::move(v));
        last_new = i;
      }
      last = i;
    }
    if (words.empty() || U.size() - last_new < 2 * gap * u.size() * q) {
      len *= 4;
      continue;
    }

    const std::vector<Word> images = power_substitution(z, seed.power, budget).images();
    auto apply_power = [&](const Word& w) {
      Word out;
      for (Letter a : w) out.insert(out.end(), images[a].begin(), images[a].end());
      return out;
    };
    const Word zu = apply_power(u);
    std::vector<Word> theta_images;
    bool complete = true;
    for (const auto& v : words) {
      const Word zv = apply_power(v);
      Word w = zv;
      w.insert(w.end(), zu.begin(), zu.end());
      // Cut at occurrences of u that start inside z(v).
      std::vector<std::size_t> cuts;
      for (std::size_t i = 0; i < zv.size(); ++i)
        if (i + u.size() <= w.size() && std::equal(u.begin(), u.end(), w.begin() + static_cast<std::ptrdiff_t>(i)))
          cuts.push_back(i);
      if (cuts.empty() || cuts.front() != 0) throw Error("image of a return word does not start with u");
      cuts.push_back(zv.size());
      Word img;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        Word piece(zv.begin() + static_cast<std::ptrdiff_t>(cuts[c]), zv.begin() + static_cast<std::ptrdiff_t>(cuts[c + 1]));
        auto it = index.find(piece);
        if (it == index.end()) {
          complete = false;
          break;
        }
        img.push_back(static_cast<Letter>(it->second));
      }
      if (!complete) break;
      theta_images.push_back(std::move(img));
    }
    if (!complete) {
      len *= 4;
      continue;
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < words.size(); ++i) names.push_back("r" + std::to_string(i));
    ReturnWordSystem sys{u, words, Substitution(Alphabet(names), std::move(theta_images)), gap, len, seed.power};
    return sys;
  }
}

IntPoly strip_zero_and_roots_of_unity(const IntPoly& p) {
  IntPoly g = primitive_part(p);
  const IntPoly x = IntPoly::monomial(1);
  while (g.degree() > 0 && g.coeffs()[0] == 0) g = *divide_exact(g, x);
  if (g.degree() <= 0) return g;
  const unsigned deg = static_cast<unsigned>(g.degree());
  const unsigned dmax = 2 * deg * deg + 2;
  for (unsigned d = 1; d <= dmax && g.degree() > 0; ++d) {
    if (euler_phi(d) > static_cast<unsigned long>(g.degree())) continue;
    const IntPoly phi = cyclotomic(d);
    while (g.degree() > 0)
      if (auto r = divide_exact(g, phi))
        g = *r;
      else
        break;
  }
  return g;
}

SpectrumComparison spectrum_difference_is_trivial(const IntPoly& p1, const IntPoly& p2) {
  SpectrumComparison out;
  const IntPoly a = strip_zero_and_roots_of_unity(p1);
  const IntPoly b = strip_zero_and_roots_of_unity(p2);
  const IntPoly common = gcd(a, b);
  out.leftover_first = *divide_exact(a, common);
  out.leftover_second = *divide_exact(b, common);
  out.trivial = out.leftover_first.degree() == 0 && out.leftover_second.degree() == 0;
  return out;
}

}  // namespace substrum
