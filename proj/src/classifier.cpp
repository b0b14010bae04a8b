#include "substrum/classifier.hpp"

#include "substrum/error.hpp"

namespace substrum {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PurelyDiscrete:
      return "PurelyDiscrete";
    case Verdict::Singular:
      return "Singular";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

std::string to_string(Reason r) {
  switch (r) {
    case Reason::DekkingCoincidence:
      return "DekkingCoincidence";
    case Reason::NoSqrtQEigenvalue:
      return "NoSqrtQEigenvalue";
    case Reason::SecondEigenvalueSmall:
      return "SecondEigenvalueSmall";
    case Reason::SqrtQPresent:
      return "SqrtQPresent";
    case Reason::NumericallyAmbiguous:
      return "NumericallyAmbiguous";
    case Reason::PreconditionFailed:
      return "PreconditionFailed";
  }
  return "?";
}

std::string SpectralVerdict::summary() const {
  std::string r = to_string(reason);
  if (reason == Reason::PreconditionFailed) r += "(" + detail + ")";
  return to_string(verdict) + "(" + r + ")";
}

std::string SpectralVerdict::eigenvalue_group() const {
  if (!evidence.q || !evidence.h) return "";
  std::string s = "e(Z(" + std::to_string(*evidence.q) + ")";
  if (*evidence.h > 1) s += " x Z/" + std::to_string(*evidence.h) + "Z";
  return s + ")";
}

namespace {

SpectralVerdict refuse(SpectralVerdict v, std::string detail) {
  v.verdict = Verdict::Inconclusive;
  v.reason = Reason::PreconditionFailed;
  v.reasons = {Reason::PreconditionFailed};
  v.detail = std::move(detail);
  return v;
}

const char* kNotNecessary =
    "no eigenvalue of modulus sqrt(q) is a sufficient condition for singularity, not a necessary one; "
    "the spectral type is not decided here";

}  // namespace

SpectralVerdict classify(const Substitution& z, const ClassifyOptions& options) {
  SpectralVerdict v;
  auto& ev = v.evidence;

  const auto q = constant_length(z);
  if (!q) return refuse(std::move(v), "not-constant-length");
  ev.q = *q;
  ev.primitive = is_primitive(z).primitive;
  if (!*ev.primitive) return refuse(std::move(v), "not-primitive");
  const auto ap = is_aperiodic_pansiot(z);
  if (!ap.aperiodic) return refuse(std::move(v), "pansiot-precondition");
  ev.aperiodic = *ap.aperiodic;
  if (!*ap.aperiodic) return refuse(std::move(v), "periodic");

  const auto info = compute_height(z, options.symbol_budget);
  ev.h = info.h;
  ev.pure_base = pure_base(z, info, options.symbol_budget);
  ev.classes = ergodic_classes(ev.pure_base->eta);

  const IntMatrix s = substitution_matrix(z);
  const long ql = static_cast<long>(*q);
  try {
    ev.eigenvalues = eigenvalues(s, options.precision_bits);
  } catch (const PrecisionError&) {
  }

  if (dekking_pure_discrete(*ev.classes)) {
    v.verdict = Verdict::PurelyDiscrete;
    v.reason = Reason::DekkingCoincidence;
    v.reasons = {Reason::DekkingCoincidence};
    return v;
  }

  // The sqrt(q) test runs on S itself: the pure base changes the spectrum only by 0
  // and roots of unity, which never have modulus sqrt(q).
  Decision present = Decision::Ambiguous;
  Decision small = Decision::Ambiguous;
  try {
    ev.sqrt_q = has_modulus_sqrt_q(s, ql, options.precision_bits);
    present = ev.sqrt_q->present;
  } catch (const PrecisionError&) {
  }
  try {
    small = second_eigenvalue_below_sqrt_q(s, ql, options.precision_bits);
  } catch (const PrecisionError&) {
  }
  ev.second_eigenvalue_small = small;

  if (present == Decision::No || small == Decision::Yes) {
    v.verdict = Verdict::Singular;
    if (present == Decision::No) v.reasons.push_back(Reason::NoSqrtQEigenvalue);
    if (small == Decision::Yes) v.reasons.push_back(Reason::SecondEigenvalueSmall);
    v.reason = v.reasons.front();
    return v;
  }
  v.verdict = Verdict::Inconclusive;
  v.reason = present == Decision::Yes ? Reason::SqrtQPresent : Reason::NumericallyAmbiguous;
  v.reasons = {v.reason};
  v.note = kNotNecessary;
  return v;
}

}  // namespace substrum
