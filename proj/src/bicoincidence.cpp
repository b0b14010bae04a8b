#include "substrum/bicoincidence.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

#include "substrum/error.hpp"
#include "substrum/reduction.hpp"

namespace substrum {

namespace {

std::size_t require_constant_length(const Substitution& z) {
  auto q = constant_length(z);
  if (!q) throw PreconditionError("bi-substitution needs constant length");
  return *q;
}

}  // namespace

Substitution bisubstitution(const Substitution& z) {
  const std::size_t q = require_constant_length(z);
  const std::size_t m = z.size();
  if (m * m > (std::size_t{1} << 16)) throw BudgetError("pair alphabet too large");
  std::vector<std::string> names;
  std::vector<Word> images;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      names.push_back("(" + z.alphabet().token(static_cast<Letter>(a)) + "," +
                      z.alphabet().token(static_cast<Letter>(b)) + ")");
      const Word& za = z.image(static_cast<Letter>(a));
      const Word& zb = z.image(static_cast<Letter>(b));
      Word img(q);
      for (std::size_t i = 0; i < q; ++i) img[i] = static_cast<Letter>(pair_index(za[i], zb[i], m));
      images.push_back(std::move(img));
    }
  return Substitution(Alphabet(std::move(names)), std::move(images));
}

IntMatrix coincidence_matrix(const Substitution& z) { return substitution_matrix(bisubstitution(z)); }

ErgodicClassification ergodic_classes(const Substitution& z) {
  const Substitution sq = bisubstitution(z);
  const std::size_t m = z.size();
  const std::size_t n = m * m;
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (Letter c : sq.image(static_cast<Letter>(p))) adj[p].push_back(c);
    std::sort(adj[p].begin(), adj[p].end());
    adj[p].erase(std::unique(adj[p].begin(), adj[p].end()), adj[p].end());
  }

  // Tarjan's strongly connected components (iterative).
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        const std::size_t w = adj[v][next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }

  std::vector<char> terminal(static_cast<std::size_t>(ncomp), 1);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : adj[v])
      if (comp[w] != comp[v]) terminal[static_cast<std::size_t>(comp[v])] = 0;

  ErgodicClassification out;
  out.alphabet_size = m;
  out.membership.assign(n, -1);
  const int diag = comp[pair_index(0, 0, m)];
  for (std::size_t a = 0; a < m; ++a)
    if (comp[pair_index(a, a, m)] != diag || !terminal[static_cast<std::size_t>(diag)])
      throw PreconditionError("diagonal is not an ergodic class: substitution is not primitive");

  // Classes ordered by smallest member, with the diagonal first.
  std::vector<int> order;
  for (std::size_t v = 0; v < n; ++v) {
    const int c = comp[v];
    if (terminal[static_cast<std::size_t>(c)] && std::find(order.begin(), order.end(), c) == order.end())
      order.push_back(c);
  }
  std::stable_partition(order.begin(), order.end(), [&](int c) { return c == diag; });
  for (int c : order) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) {
        members.push_back(v);
        out.membership[v] = static_cast<int>(out.classes.size());
      }
    out.classes.push_back(std::move(members));
  }
  for (std::size_t v = 0; v < n; ++v)
    if (out.membership[v] == -1) out.transitive.push_back(v);
  out.k = out.classes.size();

  // Period of each class: gcd of level differences along edges from a BFS tree.
  unsigned power = 1;
  for (const auto& cls : out.classes) {
    std::vector<long> level(n, -1);
    std::queue<std::size_t> bfs;
    level[cls.front()] = 0;
    bfs.push(cls.front());
    unsigned long g = 0;
    while (!bfs.empty()) {
      const std::size_t v = bfs.front();
      bfs.pop();
      for (std::size_t w : adj[v]) {
        if (level[w] == -1) {
          level[w] = level[v] + 1;
          bfs.push(w);
        } else {
          g = std::gcd(g, static_cast<unsigned long>(std::labs(level[v] + 1 - level[w])));
        }
      }
    }
    const unsigned period = g == 0 ? 1u : static_cast<unsigned>(g);
    out.periods.push_back(period);
    power = std::lcm(power, period);
  }
  out.stabilizing_power = power;
  return out;
}

bool dekking_pure_discrete(const ErgodicClassification& classes) { return classes.k == 1; }

bool dekking_pure_discrete(const Substitution& z) {
  if (compute_height(z).h != 1) throw PreconditionError("Dekking's criterion needs height 1: reduce to the pure base first");
  return dekking_pure_discrete(ergodic_classes(z));
}

BijectivityProfile bijectivity_profile(const Substitution& z) {
  const std::size_t q = require_constant_length(z);
  const std::size_t m = z.size();
  BijectivityProfile out;
  out.bijective = true;
  for (std::size_t i = 0; i < q; ++i) {
    std::vector<Letter> map(m);
    std::vector<char> hit(m, 0);
    for (std::size_t a = 0; a < m; ++a) {
      map[a] = z.image(static_cast<Letter>(a))[i];
      if (hit[map[a]]) out.bijective = false;
      hit[map[a]] = 1;
    }
    out.position_maps.push_back(std::move(map));
  }
  if (!out.bijective) return out;
  bool abelian = true;
  for (std::size_t i = 0; i < q && abelian; ++i)
    for (std::size_t j = i + 1; j < q && abelian; ++j)
      for (std::size_t a = 0; a < m; ++a)
        if (out.position_maps[i][out.position_maps[j][a]] != out.position_maps[j][out.position_maps[i][a]]) {
          abelian = false;
          break;
        }
  out.abelian = abelian;
  return out;
}

}  // namespace substrum
