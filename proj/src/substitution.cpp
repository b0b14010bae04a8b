#include "substrum/substitution.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "substrum/error.hpp"

namespace substrum {

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() > std::size_t{1} << 16) throw Error("alphabet larger than 65536 letters");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error("empty letter token");
    if (!index_.emplace(tokens_[i], static_cast<Letter>(i)).second)
      throw Error("duplicate letter token '" + tokens_[i] + "'");
  }
}

std::optional<Letter> Alphabet::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Substitution::Substitution(Alphabet alphabet, std::vector<Word> images)
    : alphabet_(std::move(alphabet)), images_(std::move(images)) {
  if (images_.size() != alphabet_.size()) throw Error("one image per letter required");
  for (const auto& w : images_) {
    if (w.empty()) throw Error("empty image");
    for (Letter a : w)
      if (a >= alphabet_.size()) throw Error("image letter outside the alphabet");
  }
}

Word Substitution::apply(std::span<const Letter> w) const {
  Word out;
  std::size_t total = 0;
  for (Letter a : w) total += images_[a].size();
  out.reserve(total);
  for (Letter a : w) out.insert(out.end(), images_[a].begin(), images_[a].end());
  return out;
}

std::string Substitution::render(std::span<const Letter> w, std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += alphabet_.token(w[i]);
  }
  return out;
}

std::string Substitution::to_dsl() const {
  std::string out;
  for (std::size_t a = 0; a < size(); ++a) {
    out += alphabet_.token(static_cast<Letter>(a));
    out += " -> ";
    out += render(images_[a]);
    out += '\n';
  }
  return out;
}

std::uint64_t Substitution::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_dsl()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    tokens.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return tokens;
}

struct RawRule {
  Token lhs;
  std::vector<Token> rhs;
  std::size_t line;
};

}  // namespace

Substitution parse_substitution(std::string_view text) {
  std::vector<RawRule> rules;
  std::vector<std::string> letters;
  std::unordered_map<std::string, std::size_t> declared_at;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().text.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() < 2 || tokens[1].text != "->") {
      const std::size_t col = tokens.size() < 2 ? tokens[0].column + tokens[0].text.size() : tokens[1].column;
      throw ParseError("expected '->' after letter '" + tokens[0].text + "'", line_no, col);
    }
    if (tokens[0].text == "->") throw ParseError("missing letter before '->'", line_no, tokens[0].column);
    if (tokens.size() == 2)
      throw ParseError("empty image for letter '" + tokens[0].text + "'", line_no,
                       tokens[1].column + 2);
    for (std::size_t i = 2; i < tokens.size(); ++i)
      if (tokens[i].text == "->") throw ParseError("unexpected '->' in image", line_no, tokens[i].column);

    if (auto it = declared_at.find(tokens[0].text); it != declared_at.end())
      throw ParseError("duplicate rule for letter '" + tokens[0].text + "' (first defined on line " +
                           std::to_string(it->second) + ")",
                       line_no, tokens[0].column);
    declared_at.emplace(tokens[0].text, line_no);
    letters.push_back(tokens[0].text);
    rules.push_back({tokens[0], std::vector<Token>(tokens.begin() + 2, tokens.end()), line_no});
    if (end == text.size()) break;
  }

  if (rules.empty()) throw ParseError("no substitution rules found", 1, 1);

  Alphabet alphabet(letters);
  std::vector<Word> images;
  images.reserve(rules.size());
  for (const auto& rule : rules) {
    Word w;
    w.reserve(rule.rhs.size());
    for (const auto& tok : rule.rhs) {
      auto letter = alphabet.find(tok.text);
      if (!letter)
        throw ParseError("unknown letter '" + tok.text + "' in image: every letter needs a rule",
                         rule.line, tok.column);
      w.push_back(*letter);
    }
    images.push_back(std::move(w));
  }
  return Substitution(std::move(alphabet), std::move(images));
}

IntMatrix substitution_matrix(const Substitution& z) {
  const std::size_t m = z.size();
  IntMatrix s(m, m);
  for (std::size_t b = 0; b < m; ++b)
    for (Letter a : z.image(static_cast<Letter>(b))) s(a, b) += 1;
  return s;
}

PrimitivityResult is_primitive(const Substitution& z, std::optional<unsigned> max_power) {
  const std::size_t m = z.size();
  const unsigned bound = max_power.value_or(static_cast<unsigned>(m * m + 1));
  // Boolean powers of the incidence pattern.
  std::vector<std::vector<char>> base(m, std::vector<char>(m, 0));
  for (std::size_t b = 0; b < m; ++b)
    for (Letter a : z.image(static_cast<Letter>(b))) base[a][b] = 1;

  auto power = base;
  for (unsigned n = 1; n <= bound; ++n) {
    bool positive = true;
    for (std::size_t i = 0; i < m && positive; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!power[i][j]) {
          positive = false;
          break;
        }
    if (positive) return {true, n};
    if (n == bound) break;
    std::vector<std::vector<char>> next(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k)
        if (power[i][k])
          for (std::size_t j = 0; j < m; ++j)
            if (base[k][j]) next[i][j] = 1;
    power = std::move(next);
  }
  return {false, std::nullopt};
}

std::optional<std::size_t> constant_length(const Substitution& z) {
  const std::size_t q = z.image(0).size();
  for (const auto& w : z.images())
    if (w.size() != q) return std::nullopt;
  return q;
}

SeedLetter seed_letter(const Substitution& z) {
  const std::size_t m = z.size();
  std::optional<SeedLetter> best;
  for (std::size_t a = 0; a < m; ++a) {
    Letter cur = static_cast<Letter>(a);
    for (unsigned p = 1; p <= m; ++p) {
      cur = z.image(cur).front();
      if (cur == a) {
        if (!best || p < best->power) best = SeedLetter{static_cast<Letter>(a), p};
        break;
      }
    }
  }
  // The first-letter map on a finite set always has a cycle of length <= m.
  return *best;
}

namespace {

std::vector<Word> power_images(const Substitution& z, unsigned p, std::size_t budget) {
  std::vector<Word> images = z.images();
  for (unsigned i = 1; i < p; ++i)
    for (auto& w : images) {
      std::size_t total = 0;
      for (Letter a : w) total += z.image(a).size();
      if (total > budget) throw BudgetError("substitution power image exceeds symbol budget");
      w = z.apply(w);
    }
  return images;
}

}  // namespace

Word fixed_point_prefix(const Substitution& z, SeedLetter seed, std::size_t target_len,
                        std::size_t budget) {
  if (target_len == 0) return {};
  if (target_len > budget)
    throw BudgetError("fixed-point prefix of " + std::to_string(target_len) +
                      " symbols exceeds budget of " + std::to_string(budget));
  const auto images = power_images(z, seed.power, budget);
  if (images[seed.letter].empty() || images[seed.letter].front() != seed.letter)
    throw PreconditionError("seed letter is not the first letter of its image");

  Word out;
  out.reserve(target_len);
  out = images[seed.letter];
  if (out.size() == 1 && target_len > 1)
    throw PreconditionError("seed letter image has length 1: no infinite fixed point");
  // U = z^p(u_0) z^p(u_1) ...: position i of the output is read before it is expanded.
  std::size_t i = 1;
  while (out.size() < target_len) {
    const Word& img = images[out[i]];
    const std::size_t take = std::min(img.size(), target_len - out.size());
    out.insert(out.end(), img.begin(), img.begin() + static_cast<std::ptrdiff_t>(take));
    ++i;
  }
  out.resize(target_len);
  return out;
}

std::set<Word> allowed_words(const Substitution& z, std::size_t length) {
  std::set<Word> result;
  if (length == 0) return result;

  auto add_factors = [&](const Word& w, std::vector<Word>& fresh) {
    if (w.size() < length) return;
    for (std::size_t i = 0; i + length <= w.size(); ++i) {
      Word f(w.begin() + static_cast<std::ptrdiff_t>(i),
             w.begin() + static_cast<std::ptrdiff_t>(i + length));
      if (result.insert(f).second) fresh.push_back(std::move(f));
    }
  };

  std::vector<Word> frontier;
  for (std::size_t a = 0; a < z.size(); ++a) {
    Word w{static_cast<Letter>(a)};
    std::size_t guard = 0;
    while (w.size() < length) {
      w = z.apply(w);
      if (++guard > 64 * (length + z.size())) break;  // non-growing letter
    }
    add_factors(w, frontier);
  }
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const auto& w : frontier) add_factors(z.apply(w), next);
    frontier = std::move(next);
  }
  return result;
}

bool injective_on_letters(const Substitution& z) {
  std::set<Word> seen(z.images().begin(), z.images().end());
  return seen.size() == z.size();
}

AperiodicityResult is_aperiodic_pansiot(const Substitution& z) {
  if (!injective_on_letters(z))
    return {std::nullopt, "Pansiot precondition fails: substitution is not injective on letters"};
  const auto words = allowed_words(z, 3);
  std::vector<std::set<std::pair<Letter, Letter>>> neighbourhoods(z.size());
  for (const auto& w : words) neighbourhoods[w[1]].insert({w[0], w[2]});
  for (std::size_t a = 0; a < z.size(); ++a)
    if (neighbourhoods[a].size() >= 2)
      return {true, "letter '" + z.alphabet().token(static_cast<Letter>(a)) +
                        "' has at least two distinct neighbourhoods"};
  return {false, "every letter has a single neighbourhood: the system is periodic"};
}

Substitution power_substitution(const Substitution& z, unsigned j, std::size_t budget) {
  if (j == 0) throw PreconditionError("substitution power must be >= 1");
  return Substitution(z.alphabet(), power_images(z, j, budget));
}

}  // namespace substrum
