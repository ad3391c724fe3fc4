#include "bellrand/certify.hpp"

#include <algorithm>
#include <cmath>

namespace bellrand::certify {

GuessingProbability guessing_probability(const bell::Behavior& b, std::span<const int> settings) {
  std::size_t x = 0;
  try {
    x = b.scenario().setting_index(settings);
  } catch (const Error&) {
    throw InvalidArgument("guessing_probability: unknown settings");
  }
  const double c = b.conditional(x).maxCoeff();
  return {c, std::max(0.0, -std::log2(c))};
}

GuessingProbability guessing_probability(const bell::Behavior& b, int x, int y) {
  const int xy[2] = {x, y};
  return guessing_probability(b, xy);
}

bool exceeds_tsirelson(double s) noexcept { return s > kTsirelson; }

double min_entropy_bound_chsh(double s) {
  if (!(std::abs(s) <= 4.0)) throw InvalidArgument("min_entropy_bound_chsh: |S| > 4");
  if (s <= 2.0) return 0.0;
  const double c = std::min(s, kTsirelson);
  const double root = std::sqrt(std::max(0.0, 2.0 - c * c / 4.0));
  return std::clamp(1.0 - std::log2(1.0 + root), 0.0, 1.0);
}

KvDocument CertificationReport::document() const {
  KvDocument doc;
  doc.set("s_hat", s_hat)
      .set("s_lo", s_lo)
      .set("deviation", deviation)
      .set("confidence", confidence)
      .set("bits_per_round", bits_per_round)
      .set("rounds", rounds)
      .set("certified_bits", certified_bits);
  for (std::size_t i = 0; i < warnings.size(); ++i) doc.set("warning_" + std::to_string(i), warnings[i]);
  return doc;
}

CertificationReport certify_estimate(const bell::FunctionalEstimate& estimate, std::size_t rounds) {
  CertificationReport r;
  r.s_hat = estimate.value;
  r.s_lo = estimate.lower_bound;
  r.deviation = estimate.deviation;
  r.confidence = estimate.confidence;
  r.rounds = rounds;
  // The Hoeffding term can push S_lo below -4 for tiny samples; nothing is certified then.
  const double s = std::clamp(r.s_lo, -4.0, 4.0);
  if (exceeds_tsirelson(s))
    r.warnings.push_back("S_lo exceeds the Tsirelson bound; evaluated at 2 sqrt 2");
  r.bits_per_round = min_entropy_bound_chsh(s);
  r.certified_bits = static_cast<std::size_t>(std::floor(static_cast<double>(rounds) * r.bits_per_round));
  return r;
}

namespace {

void require_chsh_scenario(const bell::BellFunctional& f) {
  if (!(f.scenario == bell::Scenario(2, 2, 2)))
    throw InvalidArgument("certify: the min-entropy bound applies to (2,2,2) CHSH functionals");
}

}  // namespace

CertificationReport certify(const bell::Records& records, const bell::BellFunctional& functional,
                            double confidence) {
  require_chsh_scenario(functional);
  return certify_estimate(bell::estimate_functional(records, functional, confidence), records.size());
}

CertificationReport certify(const bell::Behavior& exact, const bell::BellFunctional& functional,
                            double confidence, std::size_t rounds) {
  require_chsh_scenario(functional);
  return certify_estimate(bell::estimate_functional(exact, functional, confidence), rounds);
}

}  // namespace bellrand::certify
