// Acceptance checks: one PASS/FAIL line per criterion. Exits non-zero if
// any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellrand/behaviors.hpp"
#include "bellrand/certify.hpp"
#include "bellrand/digest.hpp"
#include "bellrand/extractors.hpp"
#include "bellrand/protocols.hpp"
#include "bellrand/qrng.hpp"
#include "oracles.hpp"

using namespace bellrand;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome r{false, ""};
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = r.pass && secs < time_limit_s;
  if (!ok) ++failures;
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << r.detail << " (" << secs << " s, limit "
       << time_limit_s << " s)";
  std::printf("%s\n", line.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// --- criterion 6 helpers
double arcsine_ks(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = std::clamp(v[i] / (2.0 * p) - 1.0, -1.0, 1.0);
    const double f = 1.0 - std::acos(x) / std::numbers::pi;
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

// --- criterion 10 helpers
std::map<std::string, std::string> digests_in(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".log") continue;
    std::ifstream in(e.path(), std::ios::binary);
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    out[e.path().filename().string()] = sha256_hex(bytes);
  }
  return out;
}

std::string command_of(const fs::path& config) {
  const std::string stem = config.stem().string();
  const std::string prefix = stem.substr(0, stem.find('-'));
  if (prefix == "expansion" || prefix == "amplification") return "protocol";
  return prefix;
}

}  // namespace

int main() {
  const bell::Scenario chsh_scenario(2, 2, 2);

  criterion(1, "CHSH quantum value", 1.0, [&] {
    const auto b = bell::quantum_behavior(quantum::phi_plus<double>(), bell::chsh_optimal_measurements());
    const double s = bell::evaluate_functional(bell::chsh(), b);
    const double err = std::abs(s - 2.0 * std::sqrt(2.0));
    return Outcome{err <= 1e-9, "S = " + fmt(s, 15) + ", |S - 2 sqrt2| = " + fmt(err, 3) + " (tol 1e-9)"};
  });

  criterion(2, "classical bound and vertex counts", 1.0, [&] {
    const double bound = bell::local_bound(bell::chsh());
    const std::size_t v1 = bell::LocalVertices(bell::Scenario(1, 2, 2)).size();
    const std::size_t v2 = bell::LocalVertices(chsh_scenario).size();
    const std::size_t v3 = bell::LocalVertices(bell::Scenario(3, 2, 2)).size();
    double worst = -10.0;
    for (const auto& v : bell::LocalVertices(chsh_scenario)) worst = std::max(worst, bell::evaluate_functional(bell::chsh(), v));
    const bool ok = bound == 2.0 && worst == 2.0 && v1 == 4 && v2 == 16 && v3 == 64;
    return Outcome{ok, "local bound = " + fmt(bound) + ", max over vertices = " + fmt(worst) + ", counts = " +
                           std::to_string(v1) + "/" + std::to_string(v2) + "/" + std::to_string(v3)};
  });

  criterion(3, "certification endpoints", 1.0, [&] {
    const double f2 = certify::min_entropy_bound_chsh(2.0);
    const double ft = certify::min_entropy_bound_chsh(2.0 * std::sqrt(2.0));
    bool grid = true;
    const int n = 10000;
    const double h = (certify::kTsirelson - 2.0) / n;
    for (int i = 1; i < n && grid; ++i) {
      const double s = 2.0 + i * h;
      const double lo = certify::min_entropy_bound_chsh(s - h), mid = certify::min_entropy_bound_chsh(s),
                   hi = certify::min_entropy_bound_chsh(s + h);
      grid = mid >= lo && hi >= mid && lo + hi - 2.0 * mid >= -1e-12;
    }
    const bool ok = std::abs(f2) <= 1e-9 && std::abs(ft - 1.0) <= 1e-9 && grid;
    return Outcome{ok, "f(2) = " + fmt(f2) + ", f(2 sqrt2) = " + fmt(ft, 15) + ", grid " + (grid ? "ok" : "violated")};
  });

  criterion(4, "guessing probability", 1.0, [&] {
    const auto b = bell::quantum_behavior(quantum::phi_plus<double>(), bell::chsh_optimal_measurements());
    const auto g = certify::guessing_probability(b, 0, 0);
    const double c = (1.0 + 1.0 / std::sqrt(2.0)) / 4.0;
    // Independent value of -log2 c from the closed form.
    const double h_oracle = 2.0 - std::log2(1.0 + std::sqrt(0.5));
    const bool ok = std::abs(g.max_probability - c) <= 1e-9 && std::abs(g.min_entropy - 1.2284) < 5e-5 &&
                    std::abs(g.min_entropy - h_oracle) <= 1e-9;
    return Outcome{ok, "c = " + fmt(g.max_probability, 12) + ", H = " + fmt(g.min_entropy, 8)};
  });

  criterion(5, "QRNG worked budget", 1.0, [&] {
    const auto b = qrng::entropy_budget(0.010, 0.5, 8.0);
    const bool bias_ok = std::abs(b.bias - 0.0511) <= 0.0005;
    const bool fail_ok = b.failure_probability >= 5e-16 && b.failure_probability <= 7e-16;
    const bool h_ok = b.min_entropy >= 0.86;
    return Outcome{bias_ok && fail_ok && h_ok, "bias = " + fmt(b.bias, 7) + (bias_ok ? " ok" : " out") +
                                                   ", P_fail = " + fmt(b.failure_probability, 6) +
                                                   (fail_ok ? " ok" : " out") + ", H = " + fmt(b.min_entropy, 7) +
                                                   (h_ok ? " ok" : " < 0.86")};
  });

  criterion(6, "arcsine law", 30.0, [&] {
    const qrng::PulseModel pulse;  // balanced, unit visibility
    const auto v = qrng::simulate_interference(pulse, qrng::NoiseModel{}, 1'000'000, 6);
    const double d = arcsine_ks(v, pulse.power_short);
    return Outcome{d < 0.01, "KS = " + fmt(d, 6) + " (tol 0.01)"};
  });

  criterion(7, "variance-scaling fit", 60.0, [&] {
    std::vector<qrng::CalibrationPoint> exact;
    for (int i = 0; i < 12; ++i) {
      const double m = 0.5 + 0.75 * i;
      exact.push_back({m, 1.0 + 2.0 * m + 0.1 * m * m});
    }
    const auto fit = qrng::fit_variance_scaling(exact);
    const Eigen::Vector3d truth(1.0, 2.0, 0.1);
    const double rel = ((fit.coefficients - truth).array() / truth.array()).abs().maxCoeff();

    const double a = 1e-6, b = 2e-4, c = 1e-3;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.01);
    int covered = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      std::vector<qrng::CalibrationPoint> pts;
      for (int i = 0; i < 24; ++i) {
        const double m = 0.01 * std::pow(100.0, i / 23.0);
        pts.push_back({m, (a + b * m + c * m * m) * (1.0 + noise(rng))});
      }
      const auto f = qrng::fit_variance_scaling(pts, qrng::FitWeighting::relative, 0.95);
      covered += f.ci_low[2] <= c && c <= f.ci_high[2];
    }
    const double coverage = static_cast<double>(covered) / trials;
    return Outcome{rel <= 1e-9 && coverage >= 0.93,
                   "noiseless max rel error = " + fmt(rel, 3) + " (tol 1e-9), 95% CI coverage of C = " +
                       fmt(coverage, 4) + " over 1000 trials (min 0.93)"};
  });

  criterion(8, "extractor oracles", 300.0, [&] {
    const int n = 10, m = 2;
    const double bound = 0.5 * std::sqrt(std::exp2(m - 4));
    std::mt19937_64 rng(8);
    double worst = 0.0;
    int sources = 0;
    for (int t = 0; t < 200; ++t) {
      // Coset of a random 4-dimensional subspace.
      std::vector<std::uint32_t> basis(4), support;
      for (auto& v : basis) v = static_cast<std::uint32_t>(rng() % 1024);
      const auto shift = static_cast<std::uint32_t>(rng() % 1024);
      for (std::uint32_t c = 0; c < 16; ++c) {
        std::uint32_t v = shift;
        for (int k = 0; k < 4; ++k)
          if ((c >> k) & 1) v ^= basis[k];
        support.push_back(v);
      }
      std::sort(support.begin(), support.end());
      if (std::unique(support.begin(), support.end()) != support.end()) continue;
      worst = std::max(worst, oracles::toeplitz_seed_averaged_distance(n, m, support));
      ++sources;
    }
    std::vector<std::uint32_t> all(1024);
    for (std::uint32_t i = 0; i < 1024; ++i) all[i] = i;
    for (int t = 0; t < 200; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      worst = std::max(worst, oracles::toeplitz_seed_averaged_distance(
                                  n, m, std::vector<std::uint32_t>(all.begin(), all.begin() + 16)));
      ++sources;
    }
    const bool lhl = worst <= bound;
    const double bias = oracles::inner_product_worst_bias(3, 0.1);
    const bool ip = bias < 0.1;
    return Outcome{lhl && ip, "Toeplitz worst seed-averaged distance = " + fmt(worst, 6) + " over " +
                                  std::to_string(sources) + " flat sources (bound " + fmt(bound) +
                                  "), inner-product worst bias = " + fmt(bias, 6) + (ip ? " < 0.1" : " >= 0.1")};
  });

  criterion(9, "protocol soundness", 600.0, [&] {
    const bell::LocalVertices vertices(chsh_scenario);
    protocols::ExpansionConfig local_cfg;
    local_cfg.rounds = 10000;
    local_cfg.confidence = 0.99;
    int aborted = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      const protocols::DeviceBox box(bell::LocalModel(chsh_scenario, {1.0}, {vertices.strategy(t % 16)}));
      protocols::SeedSource seed(BitString::random(100000, 1000 + t));
      aborted += protocols::run_expansion(box, local_cfg, seed, 5000 + t).report.aborted;
    }
    const double rate = static_cast<double>(aborted) / trials;

    protocols::ExpansionConfig honest_cfg;  // N = 1e6, q = 1, confidence 0.99
    protocols::SeedSource seed(BitString::random(5'000'000, 9));
    const auto out = protocols::run_expansion(protocols::make_device({}), honest_cfg, seed, 9);
    const auto& r = out.report;
    const bool ok = rate >= 0.99 && !r.aborted && r.certified_entropy > 0;
    return Outcome{ok, "local abort rate = " + fmt(rate, 4) + " over 1000 trials (min 0.99); honest N = 1e6: R = " +
                           std::to_string(r.certified_entropy) + ", N_s = " + std::to_string(r.seed_bits) +
                           ", N_e = " + std::to_string(r.extractor_seed_bits) +
                           ", expansion ratio = " + fmt(r.expansion_ratio, 6)};
  });

  criterion(10, "determinism across thread counts", 300.0, [&] {
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(BELLRAND_CONFIGS))
      if (e.path().extension() == ".json") configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    const fs::path scratch = fs::temp_directory_path() / ("bellrand-acceptance-" + std::to_string(::getpid()));
    std::size_t matched = 0;
    std::string mismatch;
    for (const auto& cfg : configs) {
      const std::string command = command_of(cfg);
      auto run = [&](unsigned threads, const fs::path& out) {
        fs::remove_all(out);
        fs::create_directories(out);
        const std::string cmd = std::string("\"") + BELLRAND_CLI + "\" " + command + " --config \"" + cfg.string() +
                                "\" --threads " + std::to_string(threads) + " --out \"" + out.string() + "\" > \"" +
                                (out / "stdout.log").string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      };
      const int e1 = run(1, scratch / "t1"), e4 = run(4, scratch / "t4");
      const auto d1 = digests_in(scratch / "t1"), d4 = digests_in(scratch / "t4");
      if (e1 == e4 && (e1 == 0 || e1 == 2) && !d1.empty() && d1 == d4)
        ++matched;
      else if (mismatch.empty())
        mismatch = cfg.filename().string() + " (exit " + std::to_string(e1) + "/" + std::to_string(e4) + ")";
    }
    fs::remove_all(scratch);
    const bool ok = !configs.empty() && matched == configs.size();
    return Outcome{ok, std::to_string(matched) + "/" + std::to_string(configs.size()) +
                           " configs give identical digests with --threads 1 and 4" +
                           (mismatch.empty() ? "" : ", first mismatch: " + mismatch)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
