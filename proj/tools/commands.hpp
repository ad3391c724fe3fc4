#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace bellrand::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAbort = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitIo = 4;

inline constexpr std::uint64_t kDefaultSeed = 1;

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  unsigned threads = 1;
};

/// Extraction parameters; flags override the same keys from a config file.
struct ExtractOptions {
  std::optional<std::string> mode;  // toeplitz | inner-product
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> input2;
  std::optional<std::filesystem::path> seed_file;
  std::optional<std::size_t> input_bits;
  std::optional<std::size_t> output_bits;
  std::optional<std::size_t> block_bits;
  std::optional<double> min_entropy;
  std::optional<double> epsilon;
  bool identity = false;
};

// Each returns the process exit code for a completed run (0, or 2 on protocol
// abort) and throws on configuration or I/O failure.
int cmd_chsh(const GlobalOptions& opts);
int cmd_extract(const GlobalOptions& opts, const ExtractOptions& ex);
int cmd_qrng(const GlobalOptions& opts);
int cmd_protocol(const GlobalOptions& opts);

}  // namespace bellrand::cli
