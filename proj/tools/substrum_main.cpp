#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "substrum/classifier.hpp"
#include "substrum/corpus.hpp"
#include "substrum/error.hpp"
#include "substrum/estimator.hpp"
#include "substrum/reduction.hpp"
#include "substrum/report.hpp"

namespace fs = std::filesystem;
using namespace substrum;

namespace {

enum Exit { kOk = 0, kUsage = 2, kPrecondition = 3, kBudget = 4, kInternal = 1 };

struct Globals {
  unsigned precision_bits = kDefaultPrecisionBits;
  unsigned threads = 0;
  std::string cache_dir;
  bool json = false;
  bool pretty = false;
};

struct EstimateArgs {
  std::string function;
  std::size_t lags = kDefaultLags;
  double prefix = static_cast<double>(kDefaultPrefix);
  std::string scales;
  std::string csv;
  std::size_t max_symbols = std::size_t{1} << 30;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

Substitution load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_substitution(ss.str());
}

void emit(const Json& j, const Globals& g) { std::cout << (g.pretty ? j.dump(2) : j.dump()) << '\n'; }

bool refused(const SpectralVerdict& v) { return v.reason == Reason::PreconditionFailed; }

fs::path cache_dir(const Globals& g) {
  if (!g.cache_dir.empty()) return g.cache_dir;
  if (const char* env = std::getenv("SUBSTRUM_CACHE"); env && *env) return env;
  return ".substrum-cache";
}

int cmd_analyze(const std::string& path, const Globals& g) {
  const auto z = load(path);
  const auto v = classify(z, {g.precision_bits, kDefaultSymbolBudget});
  emit(to_json(analyze(z, v, {g.precision_bits, kDefaultSymbolBudget, true})), g);
  if (refused(v)) std::cerr << "precondition failed: " << v.detail << '\n';
  return refused(v) ? kPrecondition : kOk;
}

int cmd_classify(const std::string& path, const Globals& g) {
  const auto z = load(path);
  const auto v = classify(z, {g.precision_bits, kDefaultSymbolBudget});
  if (g.json || g.pretty) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["input"] = z.to_dsl();
    j["verdict"] = to_json(verdict_entry(v));
    emit(j, g);
  } else {
    std::cout << v.summary() << '\n';
    if (!v.note.empty()) std::cout << v.note << '\n';
  }
  if (refused(v)) std::cerr << "precondition failed: " << v.detail << '\n';
  return refused(v) ? kPrecondition : kOk;
}

int cmd_purebase(const std::string& path, const Globals& g) {
  const auto z = load(path);
  if (!constant_length(z)) throw PreconditionError("substitution is not of constant length");
  if (!is_primitive(z).primitive) throw PreconditionError("substitution is not primitive");
  const auto base = pure_base(z);
  if (g.json || g.pretty) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["input"] = z.to_dsl();
    j["height"] = Json{{"g0", base.height_info.g0}, {"h", base.height_info.h},
                       {"prefix_len_used", base.height_info.prefix_len_used}};
    Json blocks = Json::array();
    for (std::size_t i = 0; i < base.phi.size(); ++i)
      blocks.push_back(Json{{"letter", base.eta.alphabet().token(static_cast<Letter>(i))}, {"block", z.render(base.phi[i])}});
    j["phi"] = blocks;
    j["eta"] = base.eta.to_dsl();
    emit(j, g);
  } else {
    std::cout << render_pure_base(z, base);
  }
  return kOk;
}

int cmd_spectrum(const std::string& path, const Globals& g) {
  const auto z = load(path);
  const IntMatrix s = substitution_matrix(z);
  const auto eig = eigenvalues(s, g.precision_bits);
  const auto q = constant_length(z);
  std::optional<SqrtQCheck> sq;
  if (q) sq = has_modulus_sqrt_q(s, static_cast<long>(*q), g.precision_bits);
  if (g.json || g.pretty) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["input"] = z.to_dsl();
    if (q) j["q"] = *q;
    j["char_poly"] = to_string(eig.char_poly);
    j["eigenvalues"] = Json::array();
    for (const auto& e : eig.values) {
      Json x = to_json(complex_value(e));
      x["multiplicity"] = e.multiplicity;
      x["exact"] = e.exact;
      j["eigenvalues"].push_back(x);
    }
    if (sq) {
      const char* names[] = {"no", "yes", "ambiguous"};
      j["sqrt_q"] = names[static_cast<int>(sq->present)];
    }
    emit(j, g);
  } else {
    std::cout << "char poly: " << to_string(eig.char_poly) << '\n';
    for (const auto& e : eig.values) {
      std::cout << "  " << e.re << (e.im < 0 ? " - " : " + ") << std::abs(e.im) << "i  |.| in [" << e.modulus_lo << ", "
                << e.modulus_hi << "]  x" << e.multiplicity << (e.exact ? "  exact" : "") << '\n';
    }
    if (sq) {
      const char* names[] = {"no", "yes", "ambiguous"};
      std::cout << "modulus sqrt(q) eigenvalue: " << names[static_cast<int>(sq->present)] << '\n';
    }
  }
  return kOk;
}

std::pair<unsigned, unsigned> parse_scales(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("--scales expects n1..n2");
  try {
    std::size_t used = 0;
    const auto a = std::stoul(text.substr(0, dots), &used);
    if (used != dots) throw UsageError("--scales expects n1..n2");
    const auto rest = text.substr(dots + 2);
    const auto b = std::stoul(rest, &used);
    if (used != rest.size()) throw UsageError("--scales expects n1..n2");
    return {static_cast<unsigned>(a), static_cast<unsigned>(b)};
  } catch (const std::logic_error&) {
    throw UsageError("--scales expects n1..n2");
  }
}

int cmd_estimate(const std::string& path, const EstimateArgs& a, const Globals& g) {
  const auto z = load(path);
  if (a.function.empty()) throw UsageError("--function is required");
  const auto f = parse_coefficients(a.function);
  if (f.size() != z.size()) throw UsageError("--function needs one coefficient per letter");
  if (!(a.prefix >= 1) || a.prefix > 1e18) throw UsageError("--prefix must be a positive length");
  const auto prefix = static_cast<std::size_t>(a.prefix);

  const auto v = classify(z, {g.precision_bits, kDefaultSymbolBudget});
  if (refused(v)) throw PreconditionError("substitution is not classifiable: " + v.detail);
  const std::size_t q = *constant_length(z);

  unsigned n_lo = 0, n_hi = 0;
  if (a.scales.empty()) {
    // The top five scales whose Fejer window fits in the lag table.
    std::size_t p = 1;
    while (p <= a.lags / q) {
      p *= q;
      ++n_hi;
    }
    n_lo = n_hi >= 5 ? n_hi - 4 : 1;
  } else {
    std::tie(n_lo, n_hi) = parse_scales(a.scales);
  }

  EstimatorOptions opts;
  opts.threads = g.threads;
  opts.cache_dir = cache_dir(g);
  opts.max_symbols = a.max_symbols;
  const auto table = correlations(z, CorrelationFunction::cylindrical(f), a.lags, prefix, opts);
  std::cerr << (table.from_cache ? "correlation table read from cache\n" : "correlation table computed\n");
  const auto d = dimension_fit(z, f, table, n_lo, n_hi);
  const auto growth = birkhoff_growth(z, f);

  const fs::path csv = a.csv.empty() ? fs::path(fs::path(path).stem().string() + "-dim.csv") : fs::path(a.csv);
  {
    std::ofstream out(csv);
    if (!out) throw UsageError("cannot write '" + csv.string() + "'");
    out << "r,mass,corrected_mass\n";
    char line[128];
    for (std::size_t i = 0; i < d.radii.size(); ++i) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", d.radii[i], d.masses[i], d.corrected[i]);
      out << line;
    }
  }
  std::cerr << "wrote " << csv.string() << '\n';

  auto report = analyze(z, v, {g.precision_bits, kDefaultSymbolBudget, false});
  report.estimate = estimate_entry(CorrelationFunction::cylindrical(f), a.lags, prefix, d, growth);
  emit(to_json(report), g);
  return kOk;
}

int cmd_examples(const std::string& dir, const Globals& g) {
  fs::create_directories(dir);
  Json manifest = Json::array();
  for (const auto& e : corpus()) {
    const auto file = e.name + ".sub";
    std::ofstream out(fs::path(dir) / file);
    if (!out) throw Error("cannot write '" + (fs::path(dir) / file).string() + "'");
    out << e.dsl;
    if (!e.dsl.empty() && e.dsl.back() != '\n') out << '\n';
    manifest.push_back(Json{{"name", e.name},
                            {"file", file},
                            {"expected_verdict", e.expected_verdict},
                            {"expected_reason", e.expected_reason},
                            {"note", e.note}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw Error("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
  Json summary{{"directory", dir}, {"count", manifest.size()}};
  emit(summary, g);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral classification of constant-length substitutions", "substrum"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--precision-bits", g.precision_bits, "Starting working precision for root isolation")
      ->check(CLI::Range(53u, 4096u));
  app.add_option("--threads", g.threads, "Estimator worker threads (0 = all cores)");
  app.add_option("--cache-dir", g.cache_dir, "Correlation cache directory (default $SUBSTRUM_CACHE or .substrum-cache)");
  app.add_flag("--json", g.json, "JSON output for classify, purebase and spectrum");
  app.add_flag("--pretty", g.pretty, "Indented JSON output");

  std::string path;
  auto add_path_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("file", path, "Substitution file")->required();
    return sub;
  };
  auto* analyze_cmd = add_path_cmd("analyze", "Full static pipeline as a JSON report");
  auto* classify_cmd = add_path_cmd("classify", "Spectral verdict only");
  auto* purebase_cmd = add_path_cmd("purebase", "Height and pure base");
  auto* spectrum_cmd = add_path_cmd("spectrum", "Eigenvalues of the substitution matrix");
  auto* estimate_cmd = add_path_cmd("estimate-dim", "Local dimension at zero of a correlation measure");
  EstimateArgs ea;
  estimate_cmd->add_option("--function", ea.function, "Coefficients b_a of f = sum b_a 1_a, e.g. \"1 -1 0 0\"")
      ->required();
  estimate_cmd->add_option("--lags", ea.lags, "Number of lags K")->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--prefix", ea.prefix, "Prefix length L");
  estimate_cmd->add_option("--scales", ea.scales, "Scale range n1..n2 (radii q^-n)");
  estimate_cmd->add_option("--csv", ea.csv, "Output CSV path (default <stem>-dim.csv)");
  estimate_cmd->add_option("--max-symbols", ea.max_symbols, "Budget on L + K");
  auto* examples_cmd = app.add_subcommand("examples", "Write the bundled corpus and its manifest");
  examples_cmd->fallthrough();
  std::string dir;
  examples_cmd->add_option("dir", dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(path, g);
    if (*classify_cmd) return cmd_classify(path, g);
    if (*purebase_cmd) return cmd_purebase(path, g);
    if (*spectrum_cmd) return cmd_spectrum(path, g);
    if (*estimate_cmd) return cmd_estimate(path, ea, g);
    if (*examples_cmd) return cmd_examples(dir, g);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
