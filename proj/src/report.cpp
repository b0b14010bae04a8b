#include "substrum/report.hpp"

#include <cstdio>

#include "substrum/error.hpp"

namespace substrum {

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string kind_name(PolyFactor::Kind k) {
  switch (k) {
    case PolyFactor::Kind::X:
      return "x";
    case PolyFactor::Kind::Linear:
      return "linear";
    case PolyFactor::Kind::Cyclotomic:
      return "cyclotomic";
    case PolyFactor::Kind::Other:
      return "other";
  }
  return "other";
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::No:
      return "no";
    case Decision::Yes:
      return "yes";
    case Decision::Ambiguous:
      return "ambiguous";
  }
  return "ambiguous";
}

std::string pair_name(const Substitution& z, std::size_t p) {
  const auto [a, b] = pair_letters(p, z.size());
  return "(" + z.alphabet().token(static_cast<Letter>(a)) + "," + z.alphabet().token(static_cast<Letter>(b)) + ")";
}

ComplexValue complex_of(std::complex<double> c) {
  const double m = std::abs(c);
  return {c.real(), c.imag(), m, m};
}

}  // namespace

ComplexValue complex_value(const Eigenvalue& e) { return {e.re, e.im, e.modulus_lo, e.modulus_hi}; }

VerdictEntry verdict_entry(const SpectralVerdict& v) {
  VerdictEntry out;
  out.verdict = to_string(v.verdict);
  out.reason = to_string(v.reason);
  for (auto r : v.reasons) out.reasons.push_back(to_string(r));
  out.detail = v.detail;
  out.note = v.note;
  out.eigenvalue_group = v.eigenvalue_group();
  if (v.evidence.sqrt_q) {
    out.sqrt_q = decision_name(v.evidence.sqrt_q->present);
    for (const auto& w : v.evidence.sqrt_q->witnesses) out.sqrt_q_witnesses.push_back({w.re, w.im, w.modulus_lo, w.modulus_hi});
  }
  if (v.evidence.second_eigenvalue_small) out.second_eigenvalue_small = decision_name(*v.evidence.second_eigenvalue_small);
  if (v.evidence.classes) out.pure_base_k = v.evidence.classes->k;
  return out;
}

EstimateEntry estimate_entry(const CorrelationFunction& f, std::size_t lags, std::size_t prefix,
                             const DimensionEstimate& d, const BirkhoffGrowth& g) {
  EstimateEntry e;
  e.function = f.describe();
  e.lags = lags;
  e.prefix = prefix;
  e.n_lo = d.n_lo;
  e.n_hi = d.n_hi;
  e.d_hat = d.d_hat;
  e.d_pred = d.d_pred;
  e.d_pred_lower_bound = d.d_pred_lower_bound;
  e.residual = d.residual;
  e.kappa = d.kappa;
  e.j = d.j;
  e.theta_modulus = d.theta_modulus;
  e.point_mass = d.point_mass;
  e.birkhoff_exponent = g.exponent;
  e.birkhoff_expected = g.expected;
  e.radii = d.radii;
  e.masses = d.masses;
  e.corrected = d.corrected;
  return e;
}

AnalysisReport analyze(const Substitution& z, const AnalyzeOptions& options) {
  return analyze(z, classify(z, {options.precision_bits, options.symbol_budget}), options);
}

AnalysisReport analyze(const Substitution& z, const SpectralVerdict& verdict, const AnalyzeOptions& options) {
  AnalysisReport r;
  r.input = z.to_dsl();
  r.alphabet = z.alphabet().tokens();
  r.hash = hex(z.hash());
  r.q = constant_length(z);
  const IntMatrix s = substitution_matrix(z);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    r.matrix.emplace_back();
    for (std::size_t j = 0; j < s.cols(); ++j) r.matrix.back().push_back(s(i, j));
  }

  std::optional<EigenvalueSet> eig = verdict.evidence.eigenvalues;
  if (!eig) {
    try {
      eig = eigenvalues(s, options.precision_bits);
    } catch (const PrecisionError&) {
    }
  }
  r.char_poly = to_string(eig ? eig->char_poly : char_poly(s));
  if (eig) {
    for (const auto& f : eig->factors) r.factors.push_back({to_string(f.poly), f.multiplicity, kind_name(f.kind), f.irreducible});
    for (const auto& e : eig->values) r.eigenvalues.push_back({complex_value(e), e.multiplicity, e.exact, e.factor, e.modulus_class});
  }

  const auto& ev = verdict.evidence;
  if (ev.pure_base) {
    const auto& info = ev.pure_base->height_info;
    r.height = HeightEntry{info.g0, info.h, info.prefix_len_used};
    PureBaseEntry pb;
    pb.alphabet_size = ev.pure_base->eta.size();
    for (const auto& b : ev.pure_base->phi) pb.blocks.push_back(z.render(b));
    pb.eta = ev.pure_base->eta.to_dsl();
    r.pure_base = pb;
  }

  if (r.q && ev.primitive.value_or(false)) {
    const auto classes = ergodic_classes(z);
    ClassesEntry c;
    c.k = classes.k;
    for (const auto& cls : classes.classes) {
      c.classes.emplace_back();
      for (auto p : cls) c.classes.back().push_back(pair_name(z, p));
    }
    for (auto p : classes.transitive) c.transitive.push_back(pair_name(z, p));
    c.periods = classes.periods;
    c.stabilizing_power = classes.stabilizing_power;
    const auto bij = bijectivity_profile(z);
    c.bijective = bij.bijective;
    c.abelian = bij.abelian;
    r.classes = c;

    if (options.extreme_points) {
      try {
        const auto f = eigenspace_F(z, classes);
        const auto ep = extreme_points_Q(z, classes, f);
        ExtremePointsEntry e;
        e.k = f.k;
        e.zero_on_transitive = f.zero_on_transitive;
        e.exact = ep.exact;
        e.numeric = ep.numeric;
        e.partial = ep.partial;
        e.method = ep.method;
        for (const auto& p : ep.points) {
          if (p.exact) {
            e.exact_points.emplace_back();
            for (const auto& x : *p.exact) e.exact_points.back().push_back(x.str());
          }
          e.points.emplace_back();
          for (const auto& x : p.w) e.points.back().push_back(complex_of(x));
        }
        r.extreme_points = e;
      } catch (const Error&) {
      }
    }
  }
  r.verdict = verdict_entry(verdict);
  return r;
}

Json to_json(const ComplexValue& c) {
  Json j;
  j["re"] = c.re;
  j["im"] = c.im;
  j["modulus_lo"] = c.modulus_lo;
  j["modulus_hi"] = c.modulus_hi;
  return j;
}

Json to_json(const VerdictEntry& v) {
  Json j;
  j["verdict"] = v.verdict;
  j["reason"] = v.reason;
  j["reasons"] = v.reasons;
  j["detail"] = v.detail;
  j["note"] = v.note;
  j["eigenvalue_group"] = v.eigenvalue_group;
  if (v.sqrt_q) j["sqrt_q"] = *v.sqrt_q;
  j["sqrt_q_witnesses"] = Json::array();
  for (const auto& w : v.sqrt_q_witnesses) j["sqrt_q_witnesses"].push_back(to_json(w));
  if (v.second_eigenvalue_small) j["second_eigenvalue_small"] = *v.second_eigenvalue_small;
  if (v.pure_base_k) j["pure_base_k"] = *v.pure_base_k;
  return j;
}

Json to_json(const EstimateEntry& e) {
  Json j;
  j["function"] = e.function;
  j["lags"] = e.lags;
  j["prefix"] = e.prefix;
  j["n_lo"] = e.n_lo;
  j["n_hi"] = e.n_hi;
  j["d_hat"] = e.d_hat;
  j["d_pred"] = e.d_pred;
  j["d_pred_lower_bound"] = e.d_pred_lower_bound;
  j["residual"] = e.residual;
  j["kappa"] = e.kappa;
  j["j"] = e.j;
  j["theta_modulus"] = e.theta_modulus;
  j["point_mass"] = e.point_mass;
  j["birkhoff_exponent"] = e.birkhoff_exponent;
  j["birkhoff_expected"] = e.birkhoff_expected;
  j["radii"] = e.radii;
  j["masses"] = e.masses;
  j["corrected"] = e.corrected;
  return j;
}

Json to_json(const AnalysisReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["input"] = r.input;
  j["alphabet"] = r.alphabet;
  j["hash"] = r.hash;
  if (r.q) j["q"] = *r.q;
  j["matrix"] = r.matrix;
  j["char_poly"] = r.char_poly;
  j["factors"] = Json::array();
  for (const auto& f : r.factors)
    j["factors"].push_back(
        Json{{"poly", f.poly}, {"multiplicity", f.multiplicity}, {"kind", f.kind}, {"irreducible", f.irreducible}});
  j["eigenvalues"] = Json::array();
  for (const auto& e : r.eigenvalues) {
    Json x = to_json(e.value);
    x["multiplicity"] = e.multiplicity;
    x["exact"] = e.exact;
    x["factor"] = e.factor;
    x["modulus_class"] = e.modulus_class;
    j["eigenvalues"].push_back(x);
  }
  if (r.height) j["height"] = Json{{"g0", r.height->g0}, {"h", r.height->h}, {"prefix_len_used", r.height->prefix_len_used}};
  if (r.pure_base)
    j["pure_base"] =
        Json{{"alphabet_size", r.pure_base->alphabet_size}, {"blocks", r.pure_base->blocks}, {"eta", r.pure_base->eta}};
  if (r.classes) {
    Json c;
    c["k"] = r.classes->k;
    c["classes"] = r.classes->classes;
    c["transitive"] = r.classes->transitive;
    c["periods"] = r.classes->periods;
    c["stabilizing_power"] = r.classes->stabilizing_power;
    c["bijective"] = r.classes->bijective;
    if (r.classes->abelian) c["abelian"] = *r.classes->abelian;
    j["classes"] = c;
  }
  j["verdict"] = to_json(r.verdict);
  if (r.extreme_points) {
    const auto& e = *r.extreme_points;
    Json x;
    x["k"] = e.k;
    x["zero_on_transitive"] = e.zero_on_transitive;
    x["exact"] = e.exact;
    x["numeric"] = e.numeric;
    x["partial"] = e.partial;
    x["method"] = e.method;
    x["exact_points"] = e.exact_points;
    x["points"] = Json::array();
    for (const auto& p : e.points) {
      Json row = Json::array();
      for (const auto& c : p) row.push_back(to_json(c));
      x["points"].push_back(row);
    }
    j["extreme_points"] = x;
  }
  if (r.estimate) j["estimate"] = to_json(*r.estimate);
  return j;
}

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("report is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report field '") + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> optional_field(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return field<T>(j, key);
}

ComplexValue complex_from(const Json& j) {
  return {field<double>(j, "re"), field<double>(j, "im"), field<double>(j, "modulus_lo"), field<double>(j, "modulus_hi")};
}

}  // namespace

AnalysisReport report_from_json(const Json& j) {
  AnalysisReport r;
  r.schema_version = field<int>(j, "schema_version");
  if (r.schema_version != kSchemaVersion) throw Error("unsupported schema_version " + std::to_string(r.schema_version));
  r.input = field<std::string>(j, "input");
  r.alphabet = field<std::vector<std::string>>(j, "alphabet");
  r.hash = field<std::string>(j, "hash");
  r.q = optional_field<std::size_t>(j, "q");
  r.matrix = field<std::vector<std::vector<std::int64_t>>>(j, "matrix");
  r.char_poly = field<std::string>(j, "char_poly");
  for (const auto& f : j.at("factors"))
    r.factors.push_back({field<std::string>(f, "poly"), field<unsigned>(f, "multiplicity"), field<std::string>(f, "kind"),
                         field<bool>(f, "irreducible")});
  for (const auto& e : j.at("eigenvalues"))
    r.eigenvalues.push_back({complex_from(e), field<unsigned>(e, "multiplicity"), field<bool>(e, "exact"),
                             field<std::size_t>(e, "factor"), field<std::size_t>(e, "modulus_class")});
  if (j.contains("height")) {
    const auto& h = j.at("height");
    r.height = HeightEntry{field<unsigned long>(h, "g0"), field<unsigned long>(h, "h"), field<std::size_t>(h, "prefix_len_used")};
  }
  if (j.contains("pure_base")) {
    const auto& p = j.at("pure_base");
    r.pure_base = PureBaseEntry{field<std::size_t>(p, "alphabet_size"), field<std::vector<std::string>>(p, "blocks"),
                                field<std::string>(p, "eta")};
  }
  if (j.contains("classes")) {
    const auto& c = j.at("classes");
    ClassesEntry e;
    e.k = field<std::size_t>(c, "k");
    e.classes = field<std::vector<std::vector<std::string>>>(c, "classes");
    e.transitive = field<std::vector<std::string>>(c, "transitive");
    e.periods = field<std::vector<unsigned>>(c, "periods");
    e.stabilizing_power = field<unsigned>(c, "stabilizing_power");
    e.bijective = field<bool>(c, "bijective");
    e.abelian = optional_field<bool>(c, "abelian");
    r.classes = e;
  }
  {
    const auto& v = j.at("verdict");
    auto& e = r.verdict;
    e.verdict = field<std::string>(v, "verdict");
    e.reason = field<std::string>(v, "reason");
    e.reasons = field<std::vector<std::string>>(v, "reasons");
    e.detail = field<std::string>(v, "detail");
    e.note = field<std::string>(v, "note");
    e.eigenvalue_group = field<std::string>(v, "eigenvalue_group");
    e.sqrt_q = optional_field<std::string>(v, "sqrt_q");
    for (const auto& w : v.at("sqrt_q_witnesses")) e.sqrt_q_witnesses.push_back(complex_from(w));
    e.second_eigenvalue_small = optional_field<std::string>(v, "second_eigenvalue_small");
    e.pure_base_k = optional_field<std::size_t>(v, "pure_base_k");
  }
  if (j.contains("extreme_points")) {
    const auto& x = j.at("extreme_points");
    ExtremePointsEntry e;
    e.k = field<std::size_t>(x, "k");
    e.zero_on_transitive = field<bool>(x, "zero_on_transitive");
    e.exact = field<bool>(x, "exact");
    e.numeric = field<bool>(x, "numeric");
    e.partial = field<bool>(x, "partial");
    e.method = field<std::string>(x, "method");
    e.exact_points = field<std::vector<std::vector<std::string>>>(x, "exact_points");
    for (const auto& row : x.at("points")) {
      e.points.emplace_back();
      for (const auto& c : row) e.points.back().push_back(complex_from(c));
    }
    r.extreme_points = e;
  }
  if (j.contains("estimate")) {
    const auto& x = j.at("estimate");
    EstimateEntry e;
    e.function = field<std::string>(x, "function");
    e.lags = field<std::size_t>(x, "lags");
    e.prefix = field<std::size_t>(x, "prefix");
    e.n_lo = field<unsigned>(x, "n_lo");
    e.n_hi = field<unsigned>(x, "n_hi");
    e.d_hat = field<double>(x, "d_hat");
    e.d_pred = field<double>(x, "d_pred");
    e.d_pred_lower_bound = field<bool>(x, "d_pred_lower_bound");
    e.residual = field<double>(x, "residual");
    e.kappa = field<unsigned>(x, "kappa");
    e.j = field<std::size_t>(x, "j");
    e.theta_modulus = field<double>(x, "theta_modulus");
    e.point_mass = field<double>(x, "point_mass");
    e.birkhoff_exponent = field<double>(x, "birkhoff_exponent");
    e.birkhoff_expected = field<double>(x, "birkhoff_expected");
    e.radii = field<std::vector<double>>(x, "radii");
    e.masses = field<std::vector<double>>(x, "masses");
    e.corrected = field<std::vector<double>>(x, "corrected");
    r.estimate = e;
  }
  return r;
}

std::string render_pure_base(const Substitution& z, const PureBase& base) {
  std::string out = "# height " + std::to_string(base.height) + "\n";
  for (std::size_t i = 0; i < base.phi.size(); ++i)
    out += "# " + base.eta.alphabet().token(static_cast<Letter>(i)) + " = " + z.render(base.phi[i]) + "\n";
  return out + base.eta.to_dsl();
}

}  // namespace substrum
