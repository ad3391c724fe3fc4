#include "bellrand/qrng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "bellrand/common.hpp"
#include "bellrand/extractors.hpp"
#include "bellrand/parallel.hpp"
#include "bellrand/rng.hpp"

namespace bellrand::qrng {

TailModel parse_tail_model(const std::string& name) {
  if (name == "gaussian") return TailModel::gaussian;
  if (name == "laplace") return TailModel::laplace;
  throw InvalidArgument("unknown tail model '" + name + "' (gaussian | laplace)");
}

std::string to_string(TailModel t) { return t == TailModel::gaussian ? "gaussian" : "laplace"; }

void PulseModel::validate() const {
  if (!(power_short >= 0.0 && power_long >= 0.0)) throw InvalidArgument("PulseModel: powers must be >= 0");
  if (!(jitter_short >= 0.0 && jitter_long >= 0.0)) throw InvalidArgument("PulseModel: jitter must be >= 0");
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw InvalidArgument("PulseModel: visibility must lie in [0, 1]");
  if (!std::isfinite(phase_offset)) throw InvalidArgument("PulseModel: phase offset must be finite");
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0 && threshold_jitter >= 0.0)) throw InvalidArgument("NoiseModel: widths must be >= 0");
  if (!(hangover >= 0.0 && hangover < 1.0)) throw InvalidArgument("NoiseModel: hangover must lie in [0, 1)");
  if (!(responsivity > 0.0)) throw InvalidArgument("NoiseModel: responsivity must be > 0");
}

namespace {

double stationary_mean(const PulseModel& pulse, const NoiseModel& noise) {
  return noise.responsivity * (pulse.power_short + pulse.power_long) / (1.0 - noise.hangover);
}

double interference_half_range(const PulseModel& pulse, const NoiseModel& noise) {
  return noise.responsivity * 2.0 * pulse.visibility * std::sqrt(pulse.power_short * pulse.power_long);
}

// Zero-mean, unit-variance draw from the configured noise law.
double unit_noise(CounterRng& rng, TailModel tail) {
  if (tail == TailModel::gaussian) return std::normal_distribution<double>(0.0, 1.0)(rng);
  // Laplace with unit variance: scale 1/sqrt2.
  const double u = rng.uniform() - 0.5;
  const double mag = -std::log(1.0 - 2.0 * std::abs(u)) / std::numbers::sqrt2;
  return u < 0 ? -mag : mag;
}

}  // namespace

DigitizerConfig default_digitizer(const PulseModel& pulse, const NoiseModel& noise) {
  pulse.validate();
  noise.validate();
  return {stationary_mean(pulse, noise), interference_half_range(pulse, noise)};
}

double total_noise_sigma(const PulseModel& pulse, const NoiseModel& noise) {
  const double js = noise.responsivity * pulse.power_short * pulse.jitter_short;
  const double jl = noise.responsivity * pulse.power_long * pulse.jitter_long;
  return std::sqrt(noise.sigma * noise.sigma + noise.threshold_jitter * noise.threshold_jitter + js * js + jl * jl);
}

double hangover_offset(const PulseModel& pulse, const NoiseModel& noise) {
  const double h = noise.hangover;
  return h * interference_half_range(pulse, noise) / (1.0 - h);
}

std::vector<double> simulate_interference(const PulseModel& pulse, const NoiseModel& noise, std::size_t pulses,
                                          std::uint64_t seed, unsigned threads) {
  pulse.validate();
  noise.validate();
  if (pulses == 0) throw InvalidArgument("simulate_interference: need N >= 1");
  std::vector<double> v(pulses);
  const double two_pi = 2.0 * std::numbers::pi;
  parallel_for(pulses, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i, Stream::pulses);
      const double phase = std::fmod(two_pi * rng.uniform() + pulse.phase_offset, two_pi);
      const double gs = pulse.jitter_short > 0.0 ? unit_noise(rng, TailModel::gaussian) : 0.0;
      const double gl = pulse.jitter_long > 0.0 ? unit_noise(rng, TailModel::gaussian) : 0.0;
      const double ps = pulse.power_short * std::max(0.0, 1.0 + pulse.jitter_short * gs);
      const double pl = pulse.power_long * std::max(0.0, 1.0 + pulse.jitter_long * gl);
      const double power = ps + pl + 2.0 * pulse.visibility * std::sqrt(ps * pl) * std::cos(phase);
      double volts = noise.responsivity * power;
      if (noise.sigma > 0.0) volts += noise.sigma * unit_noise(rng, noise.tail);
      // Threshold fluctuation, folded into the sample: only V - V0 matters.
      if (noise.threshold_jitter > 0.0) volts += noise.threshold_jitter * unit_noise(rng, noise.tail);
      v[i] = volts;
    }
  });
  if (noise.hangover > 0.0) {
    double previous = stationary_mean(pulse, noise);
    for (double& x : v) {
      x += noise.hangover * previous;
      previous = x;
    }
  }
  return v;
}

BitString digitize(std::span<const double> voltages, const DigitizerConfig& cfg) {
  BitString bits(voltages.size());
  for (std::size_t i = 0; i < voltages.size(); ++i) bits.set(i, !(voltages[i] < cfg.threshold));
  return bits;
}

double predictability(double v_noise, double delta_v) {
  if (!(delta_v > 0.0)) throw InvalidArgument("predictability: Delta V must be > 0");
  if (!(std::abs(v_noise) <= delta_v))
    throw InvalidArgument("predictability: |V_noise| > Delta V saturates the digitizer");
  const double arg = std::clamp(0.5 + v_noise / (2.0 * delta_v), 0.0, 1.0);
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(arg));
}

double tail_probability(double kappa, TailModel tail) {
  if (!(kappa >= 0.0)) throw InvalidArgument("tail_probability: kappa must be >= 0");
  if (tail == TailModel::gaussian) return 0.5 * std::erfc(kappa / std::numbers::sqrt2);
  return 0.5 * std::exp(-std::numbers::sqrt2 * kappa);
}

KvDocument EntropyBudget::document() const {
  KvDocument doc;
  doc.set("sigma_noise", sigma_noise)
      .set("delta_v", delta_v)
      .set("kappa", kappa)
      .set("predictable_offset", predictable_offset)
      .set("tail_model", to_string(tail))
      .set("p_one_bound", 0.5 + bias)
      .set("bias", bias)
      .set("failure_probability", failure_probability)
      .set("min_entropy_per_bit", min_entropy);
  return doc;
}

EntropyBudget entropy_budget(double sigma_noise, double delta_v, double kappa, TailModel tail,
                             double predictable_offset) {
  if (!(sigma_noise >= 0.0)) throw InvalidArgument("entropy_budget: sigma must be >= 0");
  if (!(delta_v > 0.0)) throw InvalidArgument("entropy_budget: Delta V must be > 0 (no interference swing)");
  if (!(kappa >= 0.0)) throw InvalidArgument("entropy_budget: kappa must be >= 0");
  if (!(predictable_offset >= 0.0)) throw InvalidArgument("entropy_budget: offset must be >= 0");
  const double excursion = kappa * sigma_noise + predictable_offset;
  if (excursion > delta_v) throw InvalidArgument("entropy_budget: kappa sigma exceeds Delta V");
  EntropyBudget b{};
  b.sigma_noise = sigma_noise;
  b.delta_v = delta_v;
  b.kappa = kappa;
  b.predictable_offset = predictable_offset;
  b.tail = tail;
  b.bias = predictability(excursion, delta_v) - 0.5;
  b.failure_probability = sigma_noise == 0.0 ? 0.0 : tail_probability(kappa, tail);
  b.min_entropy = -std::log2(0.5 + b.bias);
  return b;
}

// ---------------------------------------------------------------------------

VarianceFit fit_variance_scaling(std::span<const CalibrationPoint> points, FitWeighting weighting,
                                 double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidArgument("fit_variance_scaling: confidence must lie in (0, 1)");
  std::vector<double> abscissae;
  for (const auto& p : points) {
    if (!std::isfinite(p.mean) || !std::isfinite(p.variance))
      throw InvalidArgument("fit_variance_scaling: non-finite point");
    abscissae.push_back(p.mean);
  }
  std::sort(abscissae.begin(), abscissae.end());
  if (std::unique(abscissae.begin(), abscissae.end()) - abscissae.begin() < 3)
    throw InvalidArgument("fit_variance_scaling: rank-deficient design, need >= 3 distinct <I> values");

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = points[static_cast<std::size_t>(i)].mean;
    x.row(i) << 1.0, m, m * m;
    y(i) = points[static_cast<std::size_t>(i)].variance;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  Eigen::Vector3d beta;
  const int passes = weighting == FitWeighting::ordinary ? 1 : 3;
  for (int pass = 0; pass < passes; ++pass) {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    beta = (sw.asDiagonal() * x).colPivHouseholderQr().solve(sw.asDiagonal() * y);
    if (weighting == FitWeighting::relative) {
      const Eigen::VectorXd fitted = x * beta;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = fitted(i) > 0.0 ? fitted(i) : std::abs(y(i));
        w(i) = scale > 0.0 ? 1.0 / (scale * scale) : 1.0;
      }
    }
  }
  // Final weights are those the last solve used.
  if (weighting == FitWeighting::relative) {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    beta = (sw.asDiagonal() * x).colPivHouseholderQr().solve(sw.asDiagonal() * y);
  }

  VarianceFit fit;
  fit.coefficients = beta;
  fit.confidence = confidence;
  fit.residuals = y - x * beta;
  fit.degrees_of_freedom = static_cast<int>(n) - 3;
  fit.shot_noise_fraction = (beta(1) * x.col(1)).cwiseQuotient(y);

  const Eigen::Matrix3d info = x.transpose() * w.asDiagonal() * x;
  if (fit.degrees_of_freedom > 0) {
    const double s2 = fit.residuals.cwiseProduct(fit.residuals).dot(w) / fit.degrees_of_freedom;
    const Eigen::Matrix3d cov = s2 * info.inverse();
    fit.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    const boost::math::students_t dist(fit.degrees_of_freedom);
    const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
    fit.ci_low = beta - t * fit.standard_errors;
    fit.ci_high = beta + t * fit.standard_errors;
  } else {
    // Exactly determined: no residual degrees of freedom to size the intervals.
    const double inf = std::numeric_limits<double>::infinity();
    fit.standard_errors.setConstant(inf);
    fit.ci_low.setConstant(-inf);
    fit.ci_high.setConstant(inf);
  }
  return fit;
}

std::vector<CalibrationPoint> read_calibration_csv(std::istream& is) {
  std::vector<CalibrationPoint> points;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    CalibrationPoint p{};
    if (!(row >> p.mean >> p.variance)) {
      if (first) {
        first = false;
        continue;
      }
      throw IoError("read_calibration_csv: malformed row: " + line);
    }
    first = false;
    points.push_back(p);
  }
  return points;
}

// ---------------------------------------------------------------------------

std::size_t extracted_length(std::size_t raw_bits, double min_entropy_per_bit, double epsilon) {
  return extract::output_length(static_cast<double>(raw_bits) * min_entropy_per_bit, epsilon);
}

QrngResult qrng_pipeline(const PulseModel& pulse, const NoiseModel& noise, const DigitizerConfig& digitizer,
                         double kappa, std::size_t pulses, std::uint64_t seed, const QrngOptions& options) {
  if (pulses == 0) throw InvalidArgument("qrng_pipeline: need N >= 1");
  QrngResult r;
  r.digitizer = digitizer;
  r.budget = entropy_budget(total_noise_sigma(pulse, noise), digitizer.half_range, kappa, noise.tail,
                            hangover_offset(pulse, noise));
  r.voltages = simulate_interference(pulse, noise, pulses, seed, options.threads);
  r.raw = digitize(r.voltages, digitizer);
  r.notes.push_back("phase difference assumed fully diffused (uniform on [0, 2pi))");
  if (noise.hangover > 0.0) r.notes.push_back("hangover treated as a known offset; pulses evaluated sequentially");

  const std::size_t m = extracted_length(pulses, r.budget.min_entropy, options.epsilon);
  if (m == 0) {
    r.notes.push_back("certified min-entropy below the security margin; no output extracted");
    return r;
  }
  r.extractor_seed = BitString::random(extract::ToeplitzSeed::length(pulses, m), seed, Stream::extractor_seed);
  r.extracted = extract::toeplitz_extract(r.raw, extract::ToeplitzSeed(pulses, m, r.extractor_seed));
  return r;
}

}  // namespace bellrand::qrng
