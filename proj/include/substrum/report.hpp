#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "substrum/classifier.hpp"
#include "substrum/estimator.hpp"
#include "substrum/queffelec.hpp"
#include "substrum/substitution.hpp"

namespace substrum {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ComplexValue {
  double re = 0;
  double im = 0;
  double modulus_lo = 0;
  double modulus_hi = 0;
  friend bool operator==(const ComplexValue&, const ComplexValue&) = default;
};

struct EigenvalueEntry {
  ComplexValue value;
  unsigned multiplicity = 1;
  bool exact = false;
  std::size_t factor = 0;
  std::size_t modulus_class = 0;
  friend bool operator==(const EigenvalueEntry&, const EigenvalueEntry&) = default;
};

struct FactorEntry {
  std::string poly;
  unsigned multiplicity = 1;
  std::string kind;
  bool irreducible = true;
  friend bool operator==(const FactorEntry&, const FactorEntry&) = default;
};

struct HeightEntry {
  unsigned long g0 = 1;
  unsigned long h = 1;
  std::size_t prefix_len_used = 0;
  friend bool operator==(const HeightEntry&, const HeightEntry&) = default;
};

struct PureBaseEntry {
  std::size_t alphabet_size = 0;
  /// Block of original letters behind each letter of eta.
  std::vector<std::string> blocks;
  std::string eta;
  friend bool operator==(const PureBaseEntry&, const PureBaseEntry&) = default;
};

struct ClassesEntry {
  std::size_t k = 0;
  std::vector<std::vector<std::string>> classes;
  std::vector<std::string> transitive;
  std::vector<unsigned> periods;
  unsigned stabilizing_power = 1;
  bool bijective = false;
  std::optional<bool> abelian;
  friend bool operator==(const ClassesEntry&, const ClassesEntry&) = default;
};

struct VerdictEntry {
  std::string verdict;
  std::string reason;
  std::vector<std::string> reasons;
  std::string detail;
  std::string note;
  std::string eigenvalue_group;
  std::optional<std::string> sqrt_q;
  std::vector<ComplexValue> sqrt_q_witnesses;
  std::optional<std::string> second_eigenvalue_small;
  std::optional<std::size_t> pure_base_k;
  friend bool operator==(const VerdictEntry&, const VerdictEntry&) = default;
};

struct ExtremePointsEntry {
  std::size_t k = 0;
  bool zero_on_transitive = true;
  bool exact = false;
  bool numeric = false;
  bool partial = false;
  std::string method;
  /// Exact coordinates as rationals when known, otherwise complex values.
  std::vector<std::vector<std::string>> exact_points;
  std::vector<std::vector<ComplexValue>> points;
  friend bool operator==(const ExtremePointsEntry&, const ExtremePointsEntry&) = default;
};

struct EstimateEntry {
  std::string function;
  std::size_t lags = 0;
  std::size_t prefix = 0;
  unsigned n_lo = 0;
  unsigned n_hi = 0;
  double d_hat = 0;
  double d_pred = 0;
  bool d_pred_lower_bound = false;
  double residual = 0;
  unsigned kappa = 0;
  std::size_t j = 0;
  double theta_modulus = 0;
  double point_mass = 0;
  double birkhoff_exponent = 0;
  double birkhoff_expected = 0;
  std::vector<double> radii;
  std::vector<double> masses;
  std::vector<double> corrected;
  friend bool operator==(const EstimateEntry&, const EstimateEntry&) = default;
};

struct AnalysisReport {
  int schema_version = kSchemaVersion;
  std::string input;
  std::vector<std::string> alphabet;
  std::string hash;
  std::optional<std::size_t> q;
  std::vector<std::vector<std::int64_t>> matrix;
  std::string char_poly;
  std::vector<FactorEntry> factors;
  std::vector<EigenvalueEntry> eigenvalues;
  std::optional<HeightEntry> height;
  std::optional<PureBaseEntry> pure_base;
  std::optional<ClassesEntry> classes;
  VerdictEntry verdict;
  std::optional<ExtremePointsEntry> extreme_points;
  std::optional<EstimateEntry> estimate;
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct AnalyzeOptions {
  unsigned precision_bits = kDefaultPrecisionBits;
  std::size_t symbol_budget = kDefaultSymbolBudget;
  bool extreme_points = true;
};

/// The static pipeline: matrix, spectrum, height, pure base, classes, verdict.
AnalysisReport analyze(const Substitution& z, const AnalyzeOptions& options = {});
/// Same, with the verdict already computed.
AnalysisReport analyze(const Substitution& z, const SpectralVerdict& verdict, const AnalyzeOptions& options = {});

VerdictEntry verdict_entry(const SpectralVerdict& v);
EstimateEntry estimate_entry(const CorrelationFunction& f, std::size_t lags, std::size_t prefix,
                             const DimensionEstimate& d, const BirkhoffGrowth& g);
ComplexValue complex_value(const Eigenvalue& e);

Json to_json(const AnalysisReport& r);
Json to_json(const VerdictEntry& v);
Json to_json(const EstimateEntry& e);
Json to_json(const ComplexValue& c);
/// Throws Error on a schema mismatch.
AnalysisReport report_from_json(const Json& j);

/// Text form of a pure base: '#' comment lines for the blocks, then eta.
std::string render_pure_base(const Substitution& z, const PureBase& base);

}  // namespace substrum
