// Bell-certified randomness expansion and amplification over black-box
// device pairs, with exact accounting of every consumed seed bit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellrand/behaviors.hpp"
#include "bellrand/bitstring.hpp"
#include "bellrand/certify.hpp"
#include "bellrand/extractors.hpp"
#include "bellrand/kv_document.hpp"
#include "bellrand/sources.hpp"

namespace bellrand::protocols {

enum class DeviceKind { honest, local, scripted };

std::string to_string(DeviceKind k);

/// A memoryless box shared by the parties of one Bell test. Given the joint
/// setting it returns the joint outcome; its internal randomness for round r
/// comes from the counter RNG at (device_seed, r).
class DeviceBox {
 public:
  DeviceBox(DeviceKind kind, bell::Behavior behavior, std::string label);
  /// Local device: each round draws one deterministic strategy by weight.
  explicit DeviceBox(bell::LocalModel model, std::string label = "local");

  DeviceKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  const bell::Scenario& scenario() const noexcept { return behavior_.scenario(); }
  /// Table the empirical statistics converge to.
  const bell::Behavior& behavior() const noexcept { return behavior_; }

  std::uint32_t respond(std::size_t setting, std::uint64_t device_seed, std::uint64_t round) const;

 private:
  DeviceKind kind_;
  std::string label_;
  bell::Behavior behavior_;
  std::optional<bell::LocalModel> local_;
  std::vector<double> cumulative_;  // per setting, CDF over joint outcomes (or over strategies)
};

struct DeviceSpec {
  DeviceKind kind = DeviceKind::honest;
  double visibility = 1.0;                  // honest: Werner visibility of the shared state
  std::optional<bell::LocalModel> local;    // local: hidden-variable model
  std::optional<bell::Behavior> table;      // scripted: arbitrary behavior table
};

/// honest: Werner state of the given visibility with the optimal CHSH settings;
/// local: the supplied model; scripted: the supplied table.
DeviceBox make_device(const DeviceSpec& spec);

/// Seed with a debit counter; reads past the end throw SeedExhausted.
class SeedSource {
 public:
  explicit SeedSource(BitString bits) : bits_(std::move(bits)) {}

  bool next_bit();
  std::uint64_t next_bits(unsigned count);  // first bit read is the MSB
  BitString take(std::size_t count);

  std::size_t consumed() const noexcept { return position_; }
  std::size_t remaining() const noexcept { return bits_.size() - position_; }

 private:
  BitString bits_;
  std::size_t position_ = 0;
};

struct ExpansionConfig {
  std::size_t rounds = 1'000'000;
  /// Test-round fraction q = 1/L, L a power of two. Rounds are grouped into
  /// frames of L with one test round at a seed-chosen position; all other
  /// rounds use the generation setting (0, 0).
  double test_probability = 1.0;
  double confidence = 0.99;
  double epsilon = 0x1.0p-64;
  std::size_t block_bits = 65536;  // extractor input block
  extract::SeedMode seed_mode = extract::SeedMode::fresh;
  unsigned threads = 1;

  void validate() const;
};

struct AmplificationConfig {
  std::size_t rounds = 100'000;
  double confidence = 0.99;
  std::size_t block_bits = 64;  // inner-product block; |t| = block_bits per output bit

  void validate() const;
};

struct ProtocolReport {
  std::string protocol;
  std::size_t rounds = 0;
  std::size_t test_rounds = 0;
  std::size_t seed_bits = 0;            // N_s: setting choices
  std::size_t extractor_seed_bits = 0;  // N_e
  std::size_t generated_bits = 0;       // N_g: raw device output bits
  std::size_t certified_entropy = 0;    // R
  std::size_t output_length = 0;
  double expansion_ratio = 0.0;         // R / (N_s + N_e)
  bool aborted = false;
  std::string abort_reason;
  std::vector<certify::CertificationReport> tests;
  std::vector<std::string> warnings;

  KvDocument document() const;
};

struct ProtocolOutcome {
  ProtocolReport report;
  BitString output;  // empty on abort
};

/// Spot-checking expansion on one device pair.
ProtocolOutcome run_expansion(const DeviceBox& devices, const ExpansionConfig& cfg, SeedSource& seed,
                              std::uint64_t device_seed);

/// Amplification on two disjoint device pairs. The SV source supplies four
/// setting bits per round (x1 y1 x2 y2), then the residual string t; no
/// uniform seed is used. Both pairs must violate CHSH at the requested
/// confidence; the output is the blockwise inner product of the device
/// outputs with t.
ProtocolOutcome run_amplification(const sources::SvSourceModel& sv, const DeviceBox& first,
                                  const DeviceBox& second, const AmplificationConfig& cfg,
                                  std::uint64_t sv_seed, std::uint64_t device_seed);

/// Seed bits run_expansion will debit before extraction (N_s).
std::size_t expansion_setting_bits(const ExpansionConfig& cfg);

}  // namespace bellrand::protocols
