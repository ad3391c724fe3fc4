#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bellrand/behaviors.hpp"
#include "bellrand/certify.hpp"
#include "bellrand/digest.hpp"
#include "bellrand/extractors.hpp"
#include "bellrand/io.hpp"
#include "bellrand/protocols.hpp"
#include "bellrand/qrng.hpp"
#include "bellrand/sources.hpp"
#include "config.hpp"

namespace bellrand::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t effective_seed(const GlobalOptions& opts, const std::optional<std::uint64_t>& from_config) {
  if (opts.seed) return *opts.seed;
  return from_config.value_or(kDefaultSeed);
}

RunConfig require_config(const GlobalOptions& opts, const std::string& command) {
  if (!opts.config) throw ConfigError(command + ": --config is required");
  return load_config(*opts.config, command);
}

void stage_report(io::AtomicOutputs& outputs, const GlobalOptions& opts, const std::string& stem,
                  const KvDocument& doc) {
  outputs.add(opts.out / (stem + ".txt"), doc.to_text());
  outputs.add(opts.out / (stem + ".json"), doc.to_json());
  std::cout << doc.to_text();
}

std::string digest_of(const BitString& bits) { return sha256_hex(to_bytes(bits)); }

bell::Behavior read_behavior_file(const fs::path& path) {
  std::istringstream in(io::read_text(path));
  return bell::read_behavior(in);
}

protocols::DeviceSpec parse_device(ConfigNode& node, const RunConfig& cfg) {
  protocols::DeviceSpec spec;
  const auto kind = node.get<std::string>("kind");
  const bell::Scenario chsh_scenario(2, 2, 2);
  if (kind == "honest") {
    spec.kind = protocols::DeviceKind::honest;
    spec.visibility = node.get<double>("visibility", 1.0);
  } else if (kind == "local") {
    spec.kind = protocols::DeviceKind::local;
    const bell::LocalVertices vertices(chsh_scenario);
    auto vertex = [&](std::size_t k) {
      if (k >= vertices.size()) throw ConfigError(node.path() + ".vertex: index out of range");
      return vertices.strategy(k);
    };
    if (node.has("vertex")) {
      spec.local = bell::LocalModel(chsh_scenario, {1.0}, {vertex(node.get<std::size_t>("vertex"))});
    } else {
      std::vector<double> weights;
      std::vector<bell::DeterministicStrategy> strategies;
      for (ConfigNode* part : node.children("mixture")) {
        weights.push_back(part->get<double>("weight"));
        strategies.push_back(vertex(part->get<std::size_t>("vertex")));
      }
      spec.local = bell::LocalModel(chsh_scenario, std::move(weights), std::move(strategies));
    }
  } else if (kind == "scripted") {
    spec.kind = protocols::DeviceKind::scripted;
    if (node.has("table")) {
      spec.table = read_behavior_file(cfg.resolve(node.get<std::string>("table")));
    } else {
      const auto preset = node.get<std::string>("preset");
      if (preset == "pr-box")
        spec.table = bell::pr_box();
      else if (preset == "tsirelson")
        spec.table = bell::tsirelson_behavior();
      else if (preset == "uniform")
        spec.table = bell::uniform_behavior(chsh_scenario);
      else
        throw ConfigError(node.path() + ".preset: unknown preset '" + preset + "'");
    }
  } else {
    throw ConfigError(node.path() + ".kind: expected honest | local | scripted");
  }
  return spec;
}

sources::SvSourceModel parse_sv(ConfigNode& node) {
  const auto preset = node.get<std::string>("preset");
  const double eps = node.get<double>("epsilon");
  if (preset == "constant-bias") return sources::presets::constant_bias(eps, node.get<double>("bias", eps));
  if (preset == "prefix-parity") return sources::presets::prefix_parity(eps);
  if (preset == "periodic") return sources::presets::periodic(eps, node.get<std::size_t>("period"));
  throw ConfigError(node.path() + ".preset: expected constant-bias | prefix-parity | periodic");
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_chsh(const GlobalOptions& opts) {
  RunConfig cfg = require_config(opts, "chsh");
  const auto rounds = cfg.root.get<std::size_t>("rounds");
  const double confidence = cfg.root.get<double>("confidence", 0.99);
  const auto spec = parse_device(cfg.root.child("device"), cfg);
  cfg.root.finish();
  if (rounds == 0) throw ConfigError("rounds: must be >= 1");
  const std::uint64_t seed = effective_seed(opts, cfg.seed);

  const auto device = protocols::make_device(spec);
  const auto functional = bell::chsh();
  const auto& table = device.behavior();
  const auto records =
      bell::simulate_rounds(table, bell::uniform_settings(table.scenario()), rounds, seed, opts.threads);
  const auto cert = certify::certify(records, functional, confidence);
  const auto signaling = bell::check_no_signaling(table, 1e-9);

  KvDocument doc;
  doc.set("command", "chsh")
      .set("device", protocols::to_string(spec.kind))
      .set("seed", seed)
      .set("exact_s", bell::evaluate_functional(functional, table))
      .set("local_bound", bell::local_bound(functional))
      .set("local_vertices", bell::LocalVertices(table.scenario()).size())
      .set("tsirelson_bound", certify::kTsirelson)
      .set("no_signaling", signaling.pass)
      .set("no_signaling_violation", signaling.worst_violation)
      .merge(cert.document());

  io::AtomicOutputs outputs;
  stage_report(outputs, opts, "chsh_report", doc);
  outputs.commit();
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_extract(const GlobalOptions& opts, const ExtractOptions& flags) {
  ExtractOptions ex = flags;
  std::optional<RunConfig> cfg;
  std::optional<std::uint64_t> config_seed;
  if (opts.config) {
    cfg.emplace(load_config(*opts.config, "extract"));
    auto& root = cfg->root;
    auto path_key = [&](const char* key, std::optional<fs::path>& dst) {
      if (auto v = root.optional<std::string>(key); v && !dst) dst = cfg->resolve(*v);
    };
    if (auto v = root.optional<std::string>("mode"); v && !ex.mode) ex.mode = v;
    path_key("input", ex.input);
    path_key("input2", ex.input2);
    path_key("seed_file", ex.seed_file);
    if (auto v = root.optional<std::size_t>("input_bits"); v && !ex.input_bits) ex.input_bits = v;
    if (auto v = root.optional<std::size_t>("output_bits"); v && !ex.output_bits) ex.output_bits = v;
    if (auto v = root.optional<std::size_t>("block_bits"); v && !ex.block_bits) ex.block_bits = v;
    if (auto v = root.optional<double>("min_entropy"); v && !ex.min_entropy) ex.min_entropy = v;
    if (!ex.epsilon && (root.has("epsilon") || root.has("epsilon_log2"))) ex.epsilon = get_epsilon(root, 0.0);
    ex.identity = ex.identity || root.get<bool>("identity", false);
    config_seed = cfg->seed;
    root.finish();
  }
  const std::uint64_t seed = effective_seed(opts, config_seed);
  const std::string mode = ex.mode.value_or("toeplitz");
  if (!ex.input) throw ConfigError("extract: an input file is required");

  auto load = [&](const fs::path& p) {
    BitString bits = io::read_bits(p);
    if (ex.input_bits) {
      if (*ex.input_bits > bits.size()) throw ConfigError("input_bits: exceeds the file length");
      bits = bits.slice(0, *ex.input_bits);
    }
    return bits;
  };
  const BitString x = load(*ex.input);
  if (x.empty()) throw ConfigError("extract: empty input");

  KvDocument doc;
  doc.set("command", "extract").set("mode", mode).set("input_bits", x.size());
  io::AtomicOutputs outputs;
  BitString result;

  if (mode == "inner-product") {
    if (!ex.input2) throw ConfigError("inner-product mode needs a second input");
    if (ex.identity || ex.seed_file || ex.output_bits || ex.min_entropy)
      throw ConfigError("inner-product mode takes only input, input2 and block_bits");
    const BitString y = load(*ex.input2);
    if (y.size() != x.size()) throw ConfigError("inner-product mode needs inputs of equal length");
    const std::size_t block = ex.block_bits.value_or(x.size());
    if (block == 0 || block > x.size()) throw ConfigError("block_bits: must lie in [1, input length]");
    result = extract::inner_product_extract_blocks(x, y, block);
    doc.set("block_bits", block).set("discarded_input_bits", x.size() % block);
  } else if (mode == "toeplitz") {
    if (ex.input2) throw ConfigError("toeplitz mode takes a single input");
    const std::size_t n = x.size();
    if (ex.identity) {
      if (ex.seed_file || ex.output_bits || ex.min_entropy || ex.block_bits)
        throw ConfigError("identity seed takes no other extractor parameters");
      result = extract::toeplitz_extract(x, extract::ToeplitzSeed::identity(n));
      doc.set("seed_source", "identity").set("seed_bits", extract::ToeplitzSeed::length(n, n));
    } else {
      const std::size_t block = ex.block_bits.value_or(n);
      if (block == 0 || block > n) throw ConfigError("block_bits: must lie in [1, input length]");
      std::size_t m = 0;
      if (ex.output_bits && ex.min_entropy) throw ConfigError("give either output_bits or min_entropy");
      if (ex.output_bits) {
        m = *ex.output_bits;
      } else if (ex.min_entropy) {
        const double eps = ex.epsilon.value_or(0x1.0p-64);
        m = extract::output_length(*ex.min_entropy, eps);
        doc.set("min_entropy", *ex.min_entropy).set("epsilon", eps);
      } else {
        throw ConfigError("toeplitz mode needs output_bits, min_entropy or identity");
      }
      if (m == 0 || m > block) throw ConfigError("output length must lie in [1, block length]");
      const std::size_t need = extract::block_seed_bits(n, block, m, extract::SeedMode::fresh);
      BitString pool;
      if (ex.seed_file) {
        pool = io::read_bits(*ex.seed_file);
        if (pool.size() < need)
          throw ConfigError("seed file holds " + std::to_string(pool.size()) + " bits, need " + std::to_string(need));
        pool = pool.slice(0, need);
        doc.set("seed_source", "file");
      } else {
        pool = BitString::random(need, seed, Stream::extractor_seed);
        outputs.add_bits(opts.out / "extract_seed.bin", pool);
        doc.set("seed_source", "generated").set("seed", seed);
      }
      auto blocks = extract::toeplitz_extract_blocks(x, block, m, pool, extract::SeedMode::fresh, opts.threads);
      result = std::move(blocks.output);
      doc.set("block_bits", block)
          .set("blocks", blocks.blocks)
          .set("seed_bits", blocks.seed_bits_used)
          .set("discarded_input_bits", blocks.discarded_input_bits);
    }
  } else {
    throw ConfigError("mode: expected toeplitz | inner-product");
  }

  doc.set("output_bits", result.size()).set("output_sha256", digest_of(result));
  outputs.add_bits(opts.out / "extract.bin", result);
  stage_report(outputs, opts, "extract_report", doc);
  outputs.commit();
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_qrng(const GlobalOptions& opts) {
  RunConfig cfg = require_config(opts, "qrng");
  auto& root = cfg.root;
  const auto pulses = root.get<std::size_t>("pulses");
  const double kappa = root.get<double>("kappa");
  qrng::QrngOptions options;
  options.epsilon = get_epsilon(root, options.epsilon);
  options.threads = opts.threads;

  qrng::PulseModel pulse;
  if (root.has("pulse")) {
    auto& p = root.child("pulse");
    pulse.power_short = p.get<double>("power_short", pulse.power_short);
    pulse.power_long = p.get<double>("power_long", pulse.power_long);
    pulse.jitter_short = p.get<double>("jitter_short", pulse.jitter_short);
    pulse.jitter_long = p.get<double>("jitter_long", pulse.jitter_long);
    pulse.visibility = p.get<double>("visibility", pulse.visibility);
    pulse.phase_offset = p.get<double>("phase_offset", pulse.phase_offset);
  }
  qrng::NoiseModel noise;
  if (root.has("noise")) {
    auto& n = root.child("noise");
    noise.sigma = n.get<double>("sigma", noise.sigma);
    noise.threshold_jitter = n.get<double>("threshold_jitter", noise.threshold_jitter);
    noise.hangover = n.get<double>("hangover", noise.hangover);
    noise.responsivity = n.get<double>("responsivity", noise.responsivity);
    if (auto t = n.optional<std::string>("tail")) noise.tail = qrng::parse_tail_model(*t);
  }
  auto digitizer = qrng::default_digitizer(pulse, noise);
  if (root.has("digitizer")) {
    auto& d = root.child("digitizer");
    digitizer.threshold = d.get<double>("threshold", digitizer.threshold);
    digitizer.half_range = d.get<double>("half_range", digitizer.half_range);
  }
  std::optional<fs::path> calibration;
  qrng::FitWeighting weighting = qrng::FitWeighting::ordinary;
  if (root.has("calibration")) {
    auto& c = root.child("calibration");
    calibration = cfg.resolve(c.get<std::string>("file"));
    const auto w = c.get<std::string>("weighting", "ordinary");
    if (w == "relative")
      weighting = qrng::FitWeighting::relative;
    else if (w != "ordinary")
      throw ConfigError("calibration.weighting: expected ordinary | relative");
  }
  root.finish();
  if (pulses == 0) throw ConfigError("pulses: must be >= 1");
  const std::uint64_t seed = effective_seed(opts, cfg.seed);

  KvDocument doc;
  doc.set("command", "qrng").set("seed", seed).set("pulses", pulses);
  if (calibration) {
    std::istringstream in(io::read_text(*calibration));
    const auto points = qrng::read_calibration_csv(in);
    const auto fit = qrng::fit_variance_scaling(points, weighting);
    const char* names[] = {"A", "B", "C"};
    for (int i = 0; i < 3; ++i) {
      doc.set(std::string("fit.") + names[i], fit.coefficients(i))
          .set(std::string("fit.") + names[i] + "_ci_low", fit.ci_low(i))
          .set(std::string("fit.") + names[i] + "_ci_high", fit.ci_high(i));
    }
    doc.set("fit.points", points.size()).set("fit.max_shot_noise_fraction", fit.shot_noise_fraction.maxCoeff());
  }

  const auto result = qrng::qrng_pipeline(pulse, noise, digitizer, kappa, pulses, seed, options);
  doc.set("threshold", digitizer.threshold)
      .merge(result.budget.document())
      .set("raw_ones_fraction", static_cast<double>(result.raw.popcount()) / static_cast<double>(pulses))
      .set("epsilon", options.epsilon)
      .set("extracted_bits", result.extracted.size())
      .set("raw_sha256", digest_of(result.raw))
      .set("extracted_sha256", digest_of(result.extracted));
  for (std::size_t i = 0; i < result.notes.size(); ++i) doc.set("note_" + std::to_string(i), result.notes[i]);

  io::AtomicOutputs outputs;
  outputs.add_bits(opts.out / "qrng_raw.bin", result.raw);
  outputs.add_bits(opts.out / "qrng_extracted.bin", result.extracted);
  stage_report(outputs, opts, "qrng_report", doc);
  outputs.commit();
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_protocol(const GlobalOptions& opts) {
  RunConfig cfg = require_config(opts, "protocol");
  auto& root = cfg.root;
  const auto which = root.get<std::string>("protocol");
  std::uint64_t seed = 0;
  protocols::ProtocolOutcome outcome;

  if (which == "expansion") {
    protocols::ExpansionConfig ec;
    ec.rounds = root.get<std::size_t>("rounds");
    ec.test_probability = root.get<double>("test_probability", ec.test_probability);
    ec.confidence = root.get<double>("confidence", ec.confidence);
    ec.epsilon = get_epsilon(root, ec.epsilon);
    ec.block_bits = root.get<std::size_t>("block_bits", ec.block_bits);
    const auto mode = root.get<std::string>("seed_mode", "fresh");
    if (mode == "expander")
      ec.seed_mode = extract::SeedMode::expander;
    else if (mode != "fresh")
      throw ConfigError("seed_mode: expected fresh | expander");
    ec.threads = opts.threads;
    const auto device = protocols::make_device(parse_device(root.child("device"), cfg));
    const auto seed_file = root.optional<std::string>("seed_file");
    root.finish();
    ec.validate();
    seed = effective_seed(opts, cfg.seed);

    BitString bits;
    if (seed_file) {
      bits = io::read_bits(cfg.resolve(*seed_file));
    } else {
      // Enough for the settings plus the largest extractor seed any outcome can need.
      const std::size_t raw = 2 * ec.rounds;
      const std::size_t block = std::min(ec.block_bits, raw);
      const std::size_t per_seed = block + block / 2;
      const std::size_t blocks = ec.seed_mode == extract::SeedMode::expander ? 1 : raw / block;
      bits = BitString::random(protocols::expansion_setting_bits(ec) + blocks * per_seed, seed, Stream::seed_bits);
    }
    protocols::SeedSource source(std::move(bits));
    outcome = protocols::run_expansion(device, ec, source, seed);
  } else if (which == "amplification") {
    protocols::AmplificationConfig ac;
    ac.rounds = root.get<std::size_t>("rounds");
    ac.confidence = root.get<double>("confidence", ac.confidence);
    ac.block_bits = root.get<std::size_t>("block_bits", ac.block_bits);
    const auto sv = parse_sv(root.child("sv"));
    auto nodes = root.children("devices");
    if (nodes.size() != 2) throw ConfigError("devices: amplification takes exactly two device pairs");
    const auto first = protocols::make_device(parse_device(*nodes[0], cfg));
    const auto second = protocols::make_device(parse_device(*nodes[1], cfg));
    root.finish();
    ac.validate();
    seed = effective_seed(opts, cfg.seed);
    outcome = protocols::run_amplification(sv, first, second, ac, seed, seed);
  } else {
    throw ConfigError("protocol: expected expansion | amplification");
  }

  KvDocument doc;
  doc.set("command", "protocol").set("seed", seed).merge(outcome.report.document());
  io::AtomicOutputs outputs;
  if (!outcome.report.aborted) {
    doc.set("output_sha256", digest_of(outcome.output));
    outputs.add_bits(opts.out / "protocol_output.bin", outcome.output);
  }
  stage_report(outputs, opts, "protocol_report", doc);
  outputs.commit();
  if (outcome.report.aborted) {
    std::cerr << "protocol aborted: " << outcome.report.abort_reason << '\n';
    return kExitAbort;
  }
  return kExitOk;
}

}  // namespace bellrand::cli
