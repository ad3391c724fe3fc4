// Laser phase-diffusion QRNG: pulse interference, detection noise, binary
// digitization, predictability of the digitized bit and the resulting
// min-entropy budget, plus the variance-scaling calibration fit.
//
// Units: powers are arbitrary power units, converted to volts by the
// detector responsivity (V per power unit). All noise widths are in volts.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellrand/bitstring.hpp"
#include "bellrand/kv_document.hpp"

namespace bellrand::qrng {

enum class TailModel { gaussian, laplace };

TailModel parse_tail_model(const std::string& name);
std::string to_string(TailModel t);

struct PulseModel {
  double power_short = 0.25;
  double power_long = 0.25;
  double jitter_short = 0.0;  // relative std of the per-pulse short-path power
  double jitter_long = 0.0;
  double visibility = 1.0;
  double phase_offset = 0.0;  // constant shift added to every phase difference

  void validate() const;
};

struct NoiseModel {
  double sigma = 0.0;             // electronic noise width
  double threshold_jitter = 0.0;  // width of the threshold fluctuation
  double hangover = 0.0;          // fraction of the previous sample leaking into the current one
  double responsivity = 1.0;      // volts per power unit
  TailModel tail = TailModel::gaussian;

  void validate() const;
};

struct DigitizerConfig {
  double threshold;   // V0
  double half_range;  // Delta V, half the peak-to-peak interference swing
};

/// Threshold at the stationary mean voltage, half-range from the interference
/// term: responsivity * 2 V sqrt(p_S p_L).
DigitizerConfig default_digitizer(const PulseModel& pulse, const NoiseModel& noise);

/// Width of all non-phase voltage fluctuations seen by the comparator.
double total_noise_sigma(const PulseModel& pulse, const NoiseModel& noise);

/// Largest predictable hangover shift around the stationary mean.
double hangover_offset(const PulseModel& pulse, const NoiseModel& noise);

/// V_i = R (p_S + p_L + 2 V sqrt(p_S p_L) cos dphi_i) + h V_{i-1} + noise.
/// Pulse i draws from the counter RNG at (seed, i); the hangover recursion is
/// applied in a sequential pass afterwards, so output does not depend on threads.
std::vector<double> simulate_interference(const PulseModel& pulse, const NoiseModel& noise, std::size_t pulses,
                                          std::uint64_t seed, unsigned threads = 1);

/// d = 0 if V < V0 else 1.
BitString digitize(std::span<const double> voltages, const DigitizerConfig& cfg);

/// P(d = 1 | V_noise) = (2/pi) arcsin sqrt(1/2 + V_noise / (2 Delta V)).
double predictability(double v_noise, double delta_v);

/// One-sided tail P(X > kappa sigma) of the unit-variance noise law.
double tail_probability(double kappa, TailModel tail = TailModel::gaussian);

struct EntropyBudget {
  double sigma_noise;
  double delta_v;
  double kappa;
  double predictable_offset;
  double bias;          // P(d=1 | kappa sigma + offset) - 1/2
  double failure_probability;
  double min_entropy;   // -log2(1/2 + bias)
  TailModel tail;

  KvDocument document() const;
};

EntropyBudget entropy_budget(double sigma_noise, double delta_v, double kappa,
                             TailModel tail = TailModel::gaussian, double predictable_offset = 0.0);

// ---------------------------------------------------------------------------
// Calibration of var(I) = A + B <I> + C <I>^2

struct CalibrationPoint {
  double mean;
  double variance;
};

enum class FitWeighting {
  ordinary,  // unweighted least squares, homoscedastic errors
  relative,  // iteratively reweighted by 1 / fitted^2, for multiplicative noise
};

struct VarianceFit {
  Eigen::Vector3d coefficients;  // (A, B, C)
  Eigen::Vector3d standard_errors;
  Eigen::Vector3d ci_low;
  Eigen::Vector3d ci_high;
  double confidence;
  Eigen::VectorXd residuals;            // variance - fitted
  Eigen::VectorXd shot_noise_fraction;  // B <I> / var
  int degrees_of_freedom;
};

VarianceFit fit_variance_scaling(std::span<const CalibrationPoint> points,
                                 FitWeighting weighting = FitWeighting::ordinary, double confidence = 0.95);

/// "mean,variance" rows; a non-numeric first line is taken as a header.
std::vector<CalibrationPoint> read_calibration_csv(std::istream& is);

// ---------------------------------------------------------------------------

struct QrngOptions {
  double epsilon = 0x1.0p-64;  // extractor distance target
  unsigned threads = 1;
};

struct QrngResult {
  std::vector<double> voltages;
  BitString raw;
  EntropyBudget budget;
  DigitizerConfig digitizer;
  BitString extractor_seed;
  BitString extracted;
  std::vector<std::string> notes;
};

/// floor(N H) - 2 ceil(log2 1/eps), or 0.
std::size_t extracted_length(std::size_t raw_bits, double min_entropy_per_bit, double epsilon);

/// Simulate, digitize, budget and hash down to the certified length. The
/// Toeplitz seed comes from the extractor-seed stream of the same seed.
QrngResult qrng_pipeline(const PulseModel& pulse, const NoiseModel& noise, const DigitizerConfig& digitizer,
                         double kappa, std::size_t pulses, std::uint64_t seed, const QrngOptions& options = {});

}  // namespace bellrand::qrng
