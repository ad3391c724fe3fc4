#include "bellrand/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bellrand/common.hpp"
#include "bellrand/rng.hpp"

namespace bellrand::protocols {

namespace {

const bell::Scenario kChshScenario(2, 2, 2);

void require_chsh_devices(const DeviceBox& d) {
  if (!(d.scenario() == kChshScenario))
    throw InvalidArgument("protocol devices must implement the (2, 2, 2) scenario, got " +
                          bell::to_string(d.scenario()));
}

std::size_t draw(const std::vector<double>& cdf, std::size_t begin, std::size_t count, double u) {
  const auto first = cdf.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = first + static_cast<std::ptrdiff_t>(count);
  const double target = u * *(last - 1);
  const auto it = std::upper_bound(first, last, target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - first), count - 1);
}

}  // namespace

std::string to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::honest: return "honest";
    case DeviceKind::local: return "local";
    case DeviceKind::scripted: return "scripted";
  }
  return "unknown";
}

DeviceBox::DeviceBox(DeviceKind kind, bell::Behavior behavior, std::string label)
    : kind_(kind), label_(std::move(label)), behavior_(std::move(behavior)) {
  const auto& s = behavior_.scenario();
  cumulative_.resize(s.cells());
  for (std::size_t x = 0; x < s.setting_count(); ++x) {
    double acc = 0.0;
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      acc += behavior_(x, a);
      cumulative_[x * s.outcome_count() + a] = acc;
    }
    if (!(acc > 0.0)) throw InvalidArgument("DeviceBox: setting with no outcome mass");
  }
}

DeviceBox::DeviceBox(bell::LocalModel model, std::string label)
    : kind_(DeviceKind::local), label_(std::move(label)), behavior_(model.behavior()), local_(std::move(model)) {
  double acc = 0.0;
  for (double w : local_->weights()) cumulative_.push_back(acc += w);
}

std::uint32_t DeviceBox::respond(std::size_t setting, std::uint64_t device_seed, std::uint64_t round) const {
  const auto& s = scenario();
  if (setting >= s.setting_count()) throw ModelViolation("device did not respond: setting out of range");
  CounterRng rng(device_seed, round, Stream::device);
  const double u = rng.uniform();
  if (local_) {
    const auto& strategy = local_->strategies()[draw(cumulative_, 0, cumulative_.size(), u)];
    const auto xs = s.settings_of(setting);
    std::vector<int> outs(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k)
      outs[k] = strategy.outputs[k][static_cast<std::size_t>(xs[k])];
    return static_cast<std::uint32_t>(s.outcome_index(outs));
  }
  return static_cast<std::uint32_t>(draw(cumulative_, setting * s.outcome_count(), s.outcome_count(), u));
}

DeviceBox make_device(const DeviceSpec& spec) {
  switch (spec.kind) {
    case DeviceKind::honest: {
      if (!(spec.visibility >= 0.0 && spec.visibility <= 1.0))
        throw InvalidArgument("make_device: visibility must lie in [0, 1]");
      auto b = bell::quantum_behavior(quantum::werner(spec.visibility), bell::chsh_optimal_measurements());
      return DeviceBox(DeviceKind::honest, std::move(b), "honest");
    }
    case DeviceKind::local:
      if (!spec.local) throw InvalidArgument("make_device: local device needs a model");
      return DeviceBox(*spec.local, "local");
    case DeviceKind::scripted:
      if (!spec.table) throw InvalidArgument("make_device: scripted device needs a behavior table");
      return DeviceBox(DeviceKind::scripted, *spec.table, "scripted");
  }
  throw InvalidArgument("make_device: unknown device kind");
}

// ---------------------------------------------------------------------------

bool SeedSource::next_bit() {
  if (position_ >= bits_.size()) throw SeedExhausted("seed exhausted after " + std::to_string(position_) + " bits");
  return bits_[position_++];
}

std::uint64_t SeedSource::next_bits(unsigned count) {
  if (count > 64) throw InvalidArgument("SeedSource::next_bits: at most 64 bits");
  std::uint64_t v = 0;
  for (unsigned i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(next_bit());
  return v;
}

BitString SeedSource::take(std::size_t count) {
  if (count > remaining())
    throw SeedExhausted("seed exhausted: need " + std::to_string(count) + " bits, " +
                        std::to_string(remaining()) + " left");
  BitString out = bits_.slice(position_, count);
  position_ += count;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t frame_length(double q) {
  const double inv = 1.0 / q;
  const auto l = static_cast<std::size_t>(std::llround(inv));
  if (!(q > 0.0 && q <= 1.0) || l == 0 || std::abs(inv - static_cast<double>(l)) > 1e-9 || !std::has_single_bit(l))
    throw InvalidArgument("test probability must be 1/L with L a power of two");
  return l;
}

void append_pair(BitString& out, std::uint32_t joint) {
  out.push_back((joint >> 1) & 1U);  // party 0
  out.push_back(joint & 1U);
}

void finish_ratio(ProtocolReport& r) {
  const std::size_t spent = r.seed_bits + r.extractor_seed_bits;
  r.expansion_ratio = spent == 0 ? 0.0 : static_cast<double>(r.certified_entropy) / static_cast<double>(spent);
}

}  // namespace

void ExpansionConfig::validate() const {
  if (rounds == 0) throw InvalidArgument("expansion: need N >= 1 rounds");
  frame_length(test_probability);
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("expansion: confidence must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("expansion: epsilon must lie in (0, 1)");
  if (block_bits < 2 || block_bits % 2 != 0) throw InvalidArgument("expansion: block length must be even and >= 2");
}

void AmplificationConfig::validate() const {
  if (rounds == 0) throw InvalidArgument("amplification: need N >= 1 rounds");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidArgument("amplification: confidence must lie in (0, 1)");
  if (block_bits == 0) throw InvalidArgument("amplification: block length must be >= 1");
}

std::size_t expansion_setting_bits(const ExpansionConfig& cfg) {
  cfg.validate();
  const std::size_t l = frame_length(cfg.test_probability);
  const std::size_t frames = (cfg.rounds + l - 1) / l;
  return frames * (static_cast<std::size_t>(std::countr_zero(l)) + 2);
}

KvDocument ProtocolReport::document() const {
  KvDocument doc;
  doc.set("protocol", protocol)
      .set("rounds", rounds)
      .set("test_rounds", test_rounds)
      .set("seed_bits", seed_bits)
      .set("extractor_seed_bits", extractor_seed_bits)
      .set("generated_bits", generated_bits)
      .set("certified_entropy", certified_entropy)
      .set("output_length", output_length)
      .set("expansion_ratio", expansion_ratio)
      .set("aborted", aborted)
      .set("abort_reason", abort_reason);
  for (std::size_t i = 0; i < tests.size(); ++i)
    doc.merge(tests[i].document(), tests.size() == 1 ? "test." : "test" + std::to_string(i + 1) + ".");
  for (std::size_t i = 0; i < warnings.size(); ++i) doc.set("warning_" + std::to_string(i), warnings[i]);
  return doc;
}

ProtocolOutcome run_expansion(const DeviceBox& devices, const ExpansionConfig& cfg, SeedSource& seed,
                              std::uint64_t device_seed) {
  cfg.validate();
  require_chsh_devices(devices);
  const std::size_t l = frame_length(cfg.test_probability);
  const unsigned position_bits = static_cast<unsigned>(std::countr_zero(l));
  const std::size_t start = seed.consumed();

  ProtocolOutcome out;
  ProtocolReport& r = out.report;
  r.protocol = "expansion";
  r.rounds = cfg.rounds;

  bell::Records tests{kChshScenario, {}, {}};
  BitString raw;
  for (std::size_t frame = 0; frame * l < cfg.rounds; ++frame) {
    const std::size_t test_at = position_bits ? seed.next_bits(position_bits) : 0;
    const auto setting = static_cast<std::uint32_t>(seed.next_bits(2));
    const std::size_t begin = frame * l;
    const std::size_t end = std::min(cfg.rounds, begin + l);
    for (std::size_t i = begin; i < end; ++i) {
      const bool is_test = i - begin == test_at;
      const std::uint32_t x = is_test ? setting : 0;
      const std::uint32_t a = devices.respond(x, device_seed, i);
      if (is_test) {
        tests.settings.push_back(x);
        tests.outcomes.push_back(a);
      }
      append_pair(raw, a);
    }
  }
  r.seed_bits = seed.consumed() - start;
  r.test_rounds = tests.size();
  r.generated_bits = raw.size();

  certify::CertificationReport cert;
  try {
    cert = certify::certify_estimate(bell::estimate_functional(tests, bell::chsh(), cfg.confidence), cfg.rounds);
  } catch (const InvalidArgument& e) {
    r.aborted = true;
    r.abort_reason = std::string("insufficient test statistics: ") + e.what();
    finish_ratio(r);
    return out;
  }
  r.tests.push_back(cert);
  if (!(cert.s_lo > 2.0)) {
    r.aborted = true;
    r.abort_reason = "no certified CHSH violation (S_lo <= 2)";
    finish_ratio(r);
    return out;
  }
  r.certified_entropy = cert.certified_bits;

  const std::size_t block = std::min(cfg.block_bits, raw.size());
  const double per_block = static_cast<double>(block / 2) * cert.bits_per_round;
  const std::size_t out_per_block = extract::output_length(per_block, cfg.epsilon);
  if (out_per_block == 0) {
    r.warnings.push_back("certified entropy per block below the extractor margin; no output");
    finish_ratio(r);
    return out;
  }
  const std::size_t need = extract::block_seed_bits(raw.size(), block, out_per_block, cfg.seed_mode);
  const BitString pool = seed.take(need);
  auto extraction = extract::toeplitz_extract_blocks(raw, block, out_per_block, pool, cfg.seed_mode, cfg.threads);
  r.extractor_seed_bits = extraction.seed_bits_used;
  r.output_length = extraction.output.size();
  for (auto& w : extraction.warnings) r.warnings.push_back(std::move(w));
  if (extraction.discarded_input_bits > 0)
    r.warnings.push_back(std::to_string(extraction.discarded_input_bits) + " trailing raw bits not extracted");
  out.output = std::move(extraction.output);
  finish_ratio(r);
  return out;
}

ProtocolOutcome run_amplification(const sources::SvSourceModel& sv, const DeviceBox& first,
                                  const DeviceBox& second, const AmplificationConfig& cfg,
                                  std::uint64_t sv_seed, std::uint64_t device_seed) {
  cfg.validate();
  require_chsh_devices(first);
  require_chsh_devices(second);
  const std::size_t n = cfg.rounds;
  const std::size_t raw_bits = 4 * n;
  const std::size_t blocks = raw_bits / cfg.block_bits;
  const std::size_t t_bits = blocks * cfg.block_bits;

  // One SV string: settings for every round, then the residual t.
  const auto bits = sources::sample_sv(sv, raw_bits + t_bits, sv_seed);

  ProtocolOutcome out;
  ProtocolReport& r = out.report;
  r.protocol = "amplification";
  r.rounds = n;
  r.test_rounds = n;
  r.seed_bits = raw_bits;

  bell::Records pair1{kChshScenario, {}, {}}, pair2{kChshScenario, {}, {}};
  pair1.settings.reserve(n);
  pair2.settings.reserve(n);
  BitString raw;
  // Each pair draws device randomness from its own counter range.
  const std::uint64_t seed1 = mix64(device_seed ^ 1), seed2 = mix64(device_seed ^ 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x1 = static_cast<std::uint32_t>(bits[4 * i] << 1 | bits[4 * i + 1]);
    const auto x2 = static_cast<std::uint32_t>(bits[4 * i + 2] << 1 | bits[4 * i + 3]);
    const std::uint32_t a1 = first.respond(x1, seed1, i);
    const std::uint32_t a2 = second.respond(x2, seed2, i);
    pair1.settings.push_back(x1);
    pair1.outcomes.push_back(a1);
    pair2.settings.push_back(x2);
    pair2.outcomes.push_back(a2);
    append_pair(raw, a1);
    append_pair(raw, a2);
  }
  r.generated_bits = raw.size();

  try {
    r.tests.push_back(certify::certify(pair1, bell::chsh(), cfg.confidence));
    r.tests.push_back(certify::certify(pair2, bell::chsh(), cfg.confidence));
  } catch (const InvalidArgument& e) {
    r.aborted = true;
    r.abort_reason = std::string("insufficient test statistics: ") + e.what();
    finish_ratio(r);
    return out;
  }
  for (std::size_t k = 0; k < r.tests.size(); ++k) {
    if (!(r.tests[k].s_lo > 2.0)) {
      r.aborted = true;
      r.abort_reason = "device pair " + std::to_string(k + 1) + ": no certified CHSH violation (S_lo <= 2)";
      finish_ratio(r);
      return out;
    }
  }
  r.certified_entropy = r.tests[0].certified_bits + r.tests[1].certified_bits;
  r.extractor_seed_bits = t_bits;

  BitString t(t_bits);
  for (std::size_t i = 0; i < t_bits; ++i) t.set(i, bits[raw_bits + i]);
  out.output = extract::inner_product_extract_blocks(raw.slice(0, t_bits), t, cfg.block_bits);
  r.output_length = out.output.size();
  finish_ratio(r);
  return out;
}

}  // namespace bellrand::protocols
