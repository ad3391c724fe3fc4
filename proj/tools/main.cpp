#include <iostream>

#include <CLI11.hpp>

#include "bellrand/common.hpp"
#include "commands.hpp"

namespace {

using namespace bellrand::cli;

void add_global_options(CLI::App* cmd, GlobalOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON run configuration");
  cmd->add_option("--seed", opts.seed, "64-bit seed; overrides the config");
  cmd->add_option("--out", opts.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-certified and phase-diffusion randomness toolkit"};
  app.require_subcommand(1);

  GlobalOptions opts;
  ExtractOptions ex;

  auto* chsh = app.add_subcommand("chsh", "simulate a CHSH test and certify min-entropy");
  auto* extract = app.add_subcommand("extract", "inner-product or Toeplitz extraction of a bit file");
  auto* qrng = app.add_subcommand("qrng", "phase-diffusion QRNG pipeline with entropy budget");
  auto* protocol = app.add_subcommand("protocol", "randomness expansion or amplification");
  for (auto* cmd : {chsh, extract, qrng, protocol}) add_global_options(cmd, opts);

  extract->add_option("--mode", ex.mode, "toeplitz | inner-product")
      ->check(CLI::IsMember({"toeplitz", "inner-product"}));
  extract->add_option("--input", ex.input, "packed input bits");
  extract->add_option("--input2", ex.input2, "second source (inner-product mode)");
  extract->add_option("--seed-file", ex.seed_file, "packed Toeplitz seed bits");
  extract->add_option("--input-bits", ex.input_bits, "use only the first N input bits");
  extract->add_option("--output-bits", ex.output_bits, "output bits per block");
  extract->add_option("--block-bits", ex.block_bits, "input bits per block");
  extract->add_option("--min-entropy", ex.min_entropy, "min-entropy of each block, sizes the output");
  extract->add_option("--epsilon", ex.epsilon, "distance target used with --min-entropy");
  extract->add_flag("--identity", ex.identity, "identity Toeplitz seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*chsh) return cmd_chsh(opts);
    if (*extract) return cmd_extract(opts, ex);
    if (*qrng) return cmd_qrng(opts);
    return cmd_protocol(opts);
  } catch (const bellrand::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const bellrand::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
