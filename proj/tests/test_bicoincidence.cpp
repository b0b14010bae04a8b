#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "substrum/bicoincidence.hpp"
#include "substrum/eigenvalues.hpp"
#include "substrum/error.hpp"
#include "substrum/reduction.hpp"

using namespace substrum;

namespace {

// Exact multiplicity of r as a root of p.
unsigned root_multiplicity(IntPoly p, long r) {
  const IntPoly lin(std::vector<BigInt>{BigInt(-r), BigInt(1)});
  unsigned k = 0;
  while (auto d = divide_exact(p, lin)) {
    p = *d;
    ++k;
  }
  return k;
}

unsigned q_multiplicity(const Substitution& z) {
  return root_multiplicity(char_poly(coincidence_matrix(z)), static_cast<long>(*constant_length(z)));
}

// Minimal orbit closures by direct reachability.
std::vector<std::set<std::size_t>> minimal_closures(const Substitution& z) {
  auto sq = bisubstitution(z);
  const std::size_t n = sq.size();
  std::vector<std::set<std::size_t>> closure(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::size_t> todo{p};
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      for (Letter c : sq.image(static_cast<Letter>(v)))
        if (closure[p].insert(c).second) todo.push_back(c);
    }
  }
  std::vector<std::set<std::size_t>> minimal;
  for (std::size_t p = 0; p < n; ++p) {
    bool is_min = true;
    for (std::size_t r = 0; r < n; ++r)
      if (std::includes(closure[p].begin(), closure[p].end(), closure[r].begin(), closure[r].end()) &&
          closure[r] != closure[p])
        is_min = false;
    if (is_min && std::find(minimal.begin(), minimal.end(), closure[p]) == minimal.end()) minimal.push_back(closure[p]);
  }
  return minimal;
}

}  // namespace

TEST_CASE("bi-substitution images") {
  auto tm = test::load("thue_morse");
  auto sq = bisubstitution(tm);
  CHECK(sq.image(1) == Word{1, 2});  // (0,1) -> (0,1)(1,0)
  auto z = test::load("ex61");
  auto s61 = bisubstitution(z);
  const auto i12 = *s61.alphabet().find("(1,2)");
  CHECK(s61.render(s61.image(i12), "") == "(1,2)(1,3)(3,2)");
  for (std::size_t a = 0; a < z.size(); ++a) {
    auto img = s61.image(static_cast<Letter>(pair_index(a, a, 4)));
    for (Letter p : img) CHECK(pair_letters(p, 4).first == pair_letters(p, 4).second);
  }
}

TEST_CASE("coincidence matrix column sums are q") {
  for (const auto& e : corpus()) {
    auto z = parse_substitution(e.dsl);
    auto c = coincidence_matrix(z);
    for (std::size_t j = 0; j < c.cols(); ++j) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < c.rows(); ++i) s += c(i, j);
      CHECK(s == static_cast<std::int64_t>(*constant_length(z)));
    }
  }
  auto c = coincidence_matrix(test::load("thue_morse"));
  CHECK(c(0, 0) == 1);
  CHECK(c(3, 0) == 1);
  CHECK(c(0, 3) == 1);
  CHECK(c(3, 3) == 1);
}

TEST_CASE("ergodic class counts") {
  auto e61 = ergodic_classes(test::load("ex61"));
  CHECK(e61.k == 2);
  CHECK(e61.transitive.empty());
  CHECK(e61.classes[1].size() == 12);

  auto rs = ergodic_classes(test::load("rudin_shapiro"));
  CHECK(rs.k == 2);
  CHECK_FALSE(rs.transitive.empty());

  auto mrs = ergodic_classes(test::load("modified_rudin_shapiro"));
  CHECK(mrs.k == 3);
  CHECK(mrs.transitive.empty());
}

TEST_CASE("multiplicity of q in char(C) equals k") {
  for (const char* name : {"ex61", "ex62", "ex63", "rudin_shapiro", "modified_rudin_shapiro", "thue_morse"}) {
    auto z = test::load(name);
    CHECK(q_multiplicity(z) == ergodic_classes(z).k);
  }
  auto base = pure_base(test::load("ex62"));
  CHECK(q_multiplicity(base.eta) == ergodic_classes(base.eta).k);
}

TEST_CASE("classes are the minimal orbit closures") {
  for (const char* name : {"ex61", "ex62", "ex63", "rudin_shapiro", "modified_rudin_shapiro", "thue_morse"}) {
    auto z = test::load(name);
    auto cls = ergodic_classes(z);
    auto minimal = minimal_closures(z);
    CHECK(minimal.size() == cls.k);
    for (const auto& c : cls.classes) {
      std::set<std::size_t> s(c.begin(), c.end());
      CHECK(std::find(minimal.begin(), minimal.end(), s) != minimal.end());
    }
    // diagonal first
    CHECK(cls.classes[0].size() == z.size());
    for (std::size_t p : cls.classes[0]) CHECK(pair_letters(p, z.size()).first == pair_letters(p, z.size()).second);
  }
}

TEST_CASE("transitive pairs reach an ergodic class") {
  auto z = test::load("rudin_shapiro");
  auto cls = ergodic_classes(z);
  auto sq = bisubstitution(z);
  for (std::size_t p : cls.transitive) {
    std::set<std::size_t> seen{p};
    std::vector<std::size_t> todo{p};
    bool hit = false;
    while (!todo.empty() && !hit) {
      auto v = todo.back();
      todo.pop_back();
      for (Letter c : sq.image(static_cast<Letter>(v))) {
        if (cls.membership[c] >= 0) hit = true;
        if (seen.insert(c).second) todo.push_back(c);
      }
    }
    CHECK(hit);
  }
}

TEST_CASE("class partition is invariant under powers coprime to the class periods") {
  for (const char* name : {"ex61", "ex62", "ex63", "rudin_shapiro", "modified_rudin_shapiro", "thue_morse"}) {
    auto z = test::load(name);
    auto a = ergodic_classes(z);
    for (unsigned j = 2; j <= 5; ++j) {
      auto b = ergodic_classes(power_substitution(z, j));
      CHECK(a.transitive == b.transitive);
      if (std::gcd(j, a.stabilizing_power) == 1) {
        CHECK(a.classes == b.classes);
      } else {
        // a class of period d splits into gcd(j, d) classes of the power
        std::size_t expected = 0;
        for (unsigned d : a.periods) expected += std::gcd(j, d);
        CHECK(b.k == expected);
      }
    }
  }
  auto mrs = ergodic_classes(test::load("modified_rudin_shapiro"));
  CHECK(mrs.stabilizing_power == 2);
}

TEST_CASE("dekking criterion") {
  auto base = pure_base(test::load("ex62"));
  CHECK(dekking_pure_discrete(base.eta));
  CHECK_FALSE(dekking_pure_discrete(test::load("thue_morse")));
  CHECK_FALSE(dekking_pure_discrete(test::load("ex61")));
  CHECK_THROWS_AS(dekking_pure_discrete(test::load("ex62")), PreconditionError);
}

TEST_CASE("bijectivity profile") {
  auto tm = bijectivity_profile(test::load("thue_morse"));
  CHECK(tm.bijective);
  CHECK(tm.abelian == true);
  auto e61 = bijectivity_profile(test::load("ex61"));
  CHECK(e61.bijective);
  CHECK(e61.abelian == false);
  auto rs = bijectivity_profile(test::load("rudin_shapiro"));
  CHECK_FALSE(rs.bijective);
  CHECK_FALSE(rs.abelian.has_value());
  for (const char* name : {"ex61", "ex63", "modified_rudin_shapiro", "thue_morse"}) {
    auto z = test::load(name);
    CHECK(bijectivity_profile(z).bijective);
    auto cls = ergodic_classes(z);
    CHECK(cls.transitive.empty());
    CHECK(cls.k >= 2);
  }
}
