#include "bellrand/behaviors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bellrand/parallel.hpp"
#include "bellrand/rng.hpp"

namespace bellrand::bell {

namespace {

// base^exp, or nullopt when it exceeds `cap`.
std::optional<std::size_t> checked_pow(std::size_t base, int exp, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > cap / base) return std::nullopt;
    r *= base;
  }
  return r;
}

std::size_t encode(std::span<const int> digits, int radix) {
  std::size_t idx = 0;
  for (int d : digits) {
    if (d < 0 || d >= radix) throw InvalidArgument("index digit out of range");
    idx = idx * static_cast<std::size_t>(radix) + static_cast<std::size_t>(d);
  }
  return idx;
}

std::vector<int> decode(std::size_t idx, int radix, int digits) {
  std::vector<int> out(static_cast<std::size_t>(digits));
  for (int k = digits - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = static_cast<int>(idx % static_cast<std::size_t>(radix));
    idx /= static_cast<std::size_t>(radix);
  }
  return out;
}

}  // namespace

Scenario::Scenario(int parties, int inputs, int outputs)
    : parties_(parties), inputs_(inputs), outputs_(outputs) {
  if (parties < 1 || inputs < 1 || outputs < 2)
    throw InvalidArgument("Scenario: need n >= 1, m >= 1, d >= 2");
  const auto settings = checked_pow(static_cast<std::size_t>(inputs), parties, kMaxTableCells);
  const auto outcomes = checked_pow(static_cast<std::size_t>(outputs), parties, kMaxTableCells);
  if (!settings || !outcomes || *settings > kMaxTableCells / *outcomes)
    throw SizeError("Scenario: (m d)^n exceeds 1e8 cells");
  setting_count_ = *settings;
  outcome_count_ = *outcomes;
}

std::size_t Scenario::setting_index(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != parties_) throw DimensionError("setting tuple length != n");
  return encode(x, inputs_);
}

std::size_t Scenario::outcome_index(std::span<const int> a) const {
  if (static_cast<int>(a.size()) != parties_) throw DimensionError("outcome tuple length != n");
  return encode(a, outputs_);
}

std::vector<int> Scenario::settings_of(std::size_t index) const {
  return decode(index, inputs_, parties_);
}

std::vector<int> Scenario::outcomes_of(std::size_t index) const {
  return decode(index, outputs_, parties_);
}

std::string to_string(const Scenario& s) {
  return "(" + std::to_string(s.parties()) + "," + std::to_string(s.inputs()) + "," +
         std::to_string(s.outputs()) + ")";
}

Behavior::Behavior(Scenario scenario, Eigen::VectorXd table)
    : scenario_(scenario), table_(std::move(table)) {
  if (static_cast<std::size_t>(table_.size()) != scenario_.cells())
    throw DimensionError("Behavior: table size does not match scenario");
  const auto nout = static_cast<Eigen::Index>(scenario_.outcome_count());
  for (std::size_t x = 0; x < scenario_.setting_count(); ++x) {
    const auto block = table_.segment(static_cast<Eigen::Index>(x) * nout, nout);
    if (!block.allFinite()) throw InvalidArgument("Behavior: non-finite entry");
    if (block.minCoeff() < -kTolerance) throw InvalidArgument("Behavior: negative probability");
    if (std::abs(block.sum() - 1.0) > kTolerance)
      throw InvalidArgument("Behavior: conditional distribution does not sum to 1");
  }
}

double Behavior::probability(std::span<const int> outcomes, std::span<const int> settings) const {
  return (*this)(scenario_.setting_index(settings), scenario_.outcome_index(outcomes));
}

Eigen::VectorXd Behavior::conditional(std::size_t setting) const {
  const auto nout = static_cast<Eigen::Index>(scenario_.outcome_count());
  return table_.segment(static_cast<Eigen::Index>(setting) * nout, nout);
}

Behavior Behavior::mixture(double lambda, const Behavior& a, const Behavior& b) {
  if (!(a.scenario_ == b.scenario_)) throw InvalidArgument("Behavior::mixture: scenarios differ");
  if (lambda < 0.0 || lambda > 1.0) throw InvalidArgument("Behavior::mixture: weight outside [0,1]");
  return Behavior(a.scenario_, lambda * a.table_ + (1.0 - lambda) * b.table_);
}

namespace {

void check_strategy(const DeterministicStrategy& st, const Scenario& s) {
  if (static_cast<int>(st.outputs.size()) != s.parties())
    throw InvalidArgument("DeterministicStrategy: wrong number of parties");
  for (const auto& table : st.outputs) {
    if (static_cast<int>(table.size()) != s.inputs())
      throw InvalidArgument("DeterministicStrategy: table must cover every input");
    for (int a : table)
      if (a < 0 || a >= s.outputs())
        throw InvalidArgument("DeterministicStrategy: output out of range");
  }
}

// Outcome index produced by a strategy on a setting index.
std::size_t strategy_outcome(const DeterministicStrategy& st, const Scenario& s,
                             std::size_t setting) {
  const auto x = s.settings_of(setting);
  std::size_t idx = 0;
  for (int k = 0; k < s.parties(); ++k)
    idx = idx * static_cast<std::size_t>(s.outputs()) +
          static_cast<std::size_t>(st.outputs[static_cast<std::size_t>(k)][static_cast<std::size_t>(x[static_cast<std::size_t>(k)])]);
  return idx;
}

}  // namespace

Behavior DeterministicStrategy::behavior(const Scenario& s) const {
  check_strategy(*this, s);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.cells()));
  for (std::size_t x = 0; x < s.setting_count(); ++x)
    t(static_cast<Eigen::Index>(x * s.outcome_count() + strategy_outcome(*this, s, x))) = 1.0;
  return Behavior(s, std::move(t));
}

LocalModel::LocalModel(Scenario scenario, std::vector<double> weights,
                       std::vector<DeterministicStrategy> strategies)
    : scenario_(scenario), weights_(std::move(weights)), strategies_(std::move(strategies)) {
  if (weights_.empty() || weights_.size() != strategies_.size())
    throw InvalidArgument("LocalModel: need one weight per strategy");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidArgument("LocalModel: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kTolerance) throw InvalidArgument("LocalModel: weights must sum to 1");
  for (const auto& st : strategies_) check_strategy(st, scenario_);
}

Behavior LocalModel::behavior() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scenario_.cells()));
  for (std::size_t l = 0; l < strategies_.size(); ++l)
    for (std::size_t x = 0; x < scenario_.setting_count(); ++x)
      t(static_cast<Eigen::Index>(x * scenario_.outcome_count() +
                                  strategy_outcome(strategies_[l], scenario_, x))) += weights_[l];
  return Behavior(scenario_, std::move(t));
}

BellFunctional::BellFunctional(Scenario s, Eigen::VectorXd alpha, std::optional<double> bound)
    : scenario(s), coefficients(std::move(alpha)), classical_bound(bound) {
  if (static_cast<std::size_t>(coefficients.size()) != scenario.cells())
    throw DimensionError("BellFunctional: coefficient tensor does not match scenario");
  if (!coefficients.allFinite()) throw InvalidArgument("BellFunctional: non-finite coefficient");
}

BellFunctional chsh() {
  const Scenario s(2, 2, 2);
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(s.cells()));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double sign = (x == 1 && y == 1) ? -1.0 : 1.0;
          const double corr = (1 - 2 * a) * (1 - 2 * b);
          alpha((2 * x + y) * 4 + 2 * a + b) = sign * corr;
        }
  return BellFunctional(s, std::move(alpha), 2.0);
}

// ---------------------------------------------------------------------------

Behavior quantum_behavior(const quantum::DensityStated& state, const MeasurementSet& measurements) {
  using quantum::ComplexMatrixd;
  const int n = static_cast<int>(measurements.size());
  if (n < 1) throw InvalidArgument("quantum_behavior: no parties");
  const int m = static_cast<int>(measurements.front().size());
  if (m < 1) throw InvalidArgument("quantum_behavior: no inputs");
  const int d = static_cast<int>(measurements.front().front().size());
  Eigen::Index total_dim = 1;
  for (const auto& party : measurements) {
    if (static_cast<int>(party.size()) != m)
      throw DimensionError("quantum_behavior: parties differ in number of inputs");
    for (const auto& povm : party) {
      if (static_cast<int>(povm.size()) != d)
        throw DimensionError("quantum_behavior: POVMs differ in number of outcomes");
      if (povm.dim() != party.front().dim())
        throw DimensionError("quantum_behavior: a party's POVMs differ in dimension");
    }
    total_dim *= party.front().dim();
  }
  if (total_dim != state.dim())
    throw DimensionError("quantum_behavior: state dimension != product of party dimensions");

  const Scenario s(n, m, d);
  Eigen::VectorXd t(static_cast<Eigen::Index>(s.cells()));
  const ComplexMatrixd rho_t = state.matrix().transpose();
  for (std::size_t xi = 0; xi < s.setting_count(); ++xi) {
    const auto x = s.settings_of(xi);
    for (std::size_t ai = 0; ai < s.outcome_count(); ++ai) {
      const auto a = s.outcomes_of(ai);
      ComplexMatrixd op = measurements[0][static_cast<std::size_t>(x[0])][static_cast<std::size_t>(a[0])];
      for (int k = 1; k < n; ++k) {
        const auto& mk = measurements[static_cast<std::size_t>(k)][static_cast<std::size_t>(x[static_cast<std::size_t>(k)])]
                                     [static_cast<std::size_t>(a[static_cast<std::size_t>(k)])];
        op = quantum::tensor_product(op, mk);
      }
      const double p = rho_t.cwiseProduct(op).sum().real();
      t(static_cast<Eigen::Index>(xi * s.outcome_count() + ai)) = std::clamp(p, 0.0, 1.0);
    }
  }
  return Behavior(s, std::move(t));
}

MeasurementSet chsh_optimal_measurements() {
  using namespace quantum;
  const ComplexMatrixd z = pauli::z<double>();
  const ComplexMatrixd x = pauli::x<double>();
  const double r = 1.0 / std::sqrt(2.0);
  return {{Povmd::from_binary_observable(z), Povmd::from_binary_observable(x)},
          {Povmd::from_binary_observable(r * (z + x)), Povmd::from_binary_observable(r * (z - x))}};
}

Behavior tsirelson_behavior() {
  return quantum_behavior(quantum::phi_plus<double>(), chsh_optimal_measurements());
}

Behavior pr_box() {
  const Scenario s(2, 2, 2);
  Eigen::VectorXd t(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t((2 * x + y) * 4 + 2 * a + b) = ((a ^ b) == (x & y)) ? 0.5 : 0.0;
  return Behavior(s, std::move(t));
}

Behavior uniform_behavior(const Scenario& s) {
  return Behavior(s, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(s.cells()),
                                               1.0 / static_cast<double>(s.outcome_count())));
}

NoSignalingReport check_no_signaling(const Behavior& b, double tol) {
  const Scenario& s = b.scenario();
  NoSignalingReport report;
  const int n = s.parties();
  for (int k = 0; k < n; ++k) {
    // For each (x_{-k}, a_{-k}), sum over a_k and require independence of x_k.
    for (std::size_t xi = 0; xi < s.setting_count(); ++xi) {
      auto x = s.settings_of(xi);
      if (x[static_cast<std::size_t>(k)] != 0) continue;  // visit each x_{-k} once
      for (std::size_t ai = 0; ai < s.outcome_count(); ++ai) {
        auto a = s.outcomes_of(ai);
        if (a[static_cast<std::size_t>(k)] != 0) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int xk = 0; xk < s.inputs(); ++xk) {
          x[static_cast<std::size_t>(k)] = xk;
          double marginal = 0.0;
          for (int ak = 0; ak < s.outputs(); ++ak) {
            a[static_cast<std::size_t>(k)] = ak;
            marginal += b.probability(a, x);
          }
          a[static_cast<std::size_t>(k)] = 0;
          lo = std::min(lo, marginal);
          hi = std::max(hi, marginal);
        }
        x[static_cast<std::size_t>(k)] = 0;
        if (hi - lo > report.worst_violation) {
          report.worst_violation = hi - lo;
          report.party = k;
          report.other_settings.clear();
          report.other_outcomes.clear();
          for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            report.other_settings.push_back(x[static_cast<std::size_t>(j)]);
            report.other_outcomes.push_back(a[static_cast<std::size_t>(j)]);
          }
        }
      }
    }
  }
  report.pass = report.worst_violation <= tol;
  return report;
}

// ---------------------------------------------------------------------------

LocalVertices::LocalVertices(Scenario s) : scenario_(s) {
  const auto per_party = checked_pow(static_cast<std::size_t>(s.outputs()), s.inputs(), kMaxVertices);
  const auto total = per_party ? checked_pow(*per_party, s.parties(), kMaxVertices) : std::nullopt;
  if (!total) throw SizeError("enumerate_local_vertices: (d^m)^n exceeds 1e6");
  count_ = *total;
}

DeterministicStrategy LocalVertices::strategy(std::size_t index) const {
  if (index >= count_) throw InvalidArgument("LocalVertices: index out of range");
  const int digits = scenario_.parties() * scenario_.inputs();
  const auto flat = decode(index, scenario_.outputs(), digits);
  DeterministicStrategy st;
  st.outputs.resize(static_cast<std::size_t>(scenario_.parties()));
  for (int k = 0; k < scenario_.parties(); ++k)
    st.outputs[static_cast<std::size_t>(k)].assign(
        flat.begin() + k * scenario_.inputs(), flat.begin() + (k + 1) * scenario_.inputs());
  return st;
}

LocalVertices enumerate_local_vertices(const Scenario& s) { return LocalVertices(s); }

double evaluate_functional(const BellFunctional& f, const Behavior& b) {
  if (!(f.scenario == b.scenario())) throw InvalidArgument("evaluate_functional: scenario mismatch");
  return f.coefficients.dot(b.table());
}

double evaluate_functional(const BellFunctional& f, const DeterministicStrategy& st) {
  check_strategy(st, f.scenario);
  double sum = 0.0;
  for (std::size_t x = 0; x < f.scenario.setting_count(); ++x)
    sum += f.coefficient(x, strategy_outcome(st, f.scenario, x));
  return sum;
}

double local_bound(const BellFunctional& f) {
  const LocalVertices vertices(f.scenario);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i)
    best = std::max(best, evaluate_functional(f, vertices.strategy(i)));
  return best;
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_settings(const Scenario& s) {
  return std::vector<double>(s.setting_count(), 1.0 / static_cast<double>(s.setting_count()));
}

namespace {

std::vector<double> cumulative(std::span<const double> p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

std::size_t sample_index(const std::vector<double>& cdf, double u) {
  // u in [0, 1); scale by the total so rounding in the cdf cannot skip the tail.
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

Records simulate_rounds(const Behavior& b, std::span<const double> settings_distribution,
                        std::size_t rounds, std::uint64_t seed, unsigned threads) {
  const Scenario& s = b.scenario();
  if (rounds == 0) throw InvalidArgument("simulate_rounds: need N >= 1");
  if (settings_distribution.size() != s.setting_count())
    throw InvalidArgument("simulate_rounds: settings distribution has wrong size");
  double total = 0.0;
  for (double p : settings_distribution) {
    if (!(p >= 0.0)) throw InvalidArgument("simulate_rounds: negative setting probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance)
    throw InvalidArgument("simulate_rounds: settings distribution not normalized");

  const auto setting_cdf = cumulative(settings_distribution);
  std::vector<std::vector<double>> outcome_cdf(s.setting_count());
  for (std::size_t x = 0; x < s.setting_count(); ++x) {
    const Eigen::VectorXd c = b.conditional(x);
    outcome_cdf[x] = cumulative(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
  }

  Records rec{s, std::vector<std::uint32_t>(rounds), std::vector<std::uint32_t>(rounds)};
  parallel_for(rounds, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i, Stream::outcomes);
      const std::size_t x = sample_index(setting_cdf, rng.uniform());
      rec.settings[i] = static_cast<std::uint32_t>(x);
      rec.outcomes[i] = static_cast<std::uint32_t>(sample_index(outcome_cdf[x], rng.uniform()));
    }
  });
  return rec;
}

double hoeffding_deviation(const BellFunctional& f, std::span<const std::size_t> counts,
                           double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidArgument("hoeffding_deviation: confidence must lie in (0, 1)");
  const Scenario& s = f.scenario;
  double sum = 0.0;
  for (std::size_t x = 0; x < s.setting_count(); ++x) {
    const auto nout = static_cast<Eigen::Index>(s.outcome_count());
    const auto alpha = f.coefficients.segment(static_cast<Eigen::Index>(x) * nout, nout);
    const double range = alpha.maxCoeff() - alpha.minCoeff();
    if (range == 0.0) continue;
    if (counts[x] == 0) throw InvalidArgument("settings coverage: a weighted setting was never observed");
    sum += range * range / static_cast<double>(counts[x]);
  }
  return std::sqrt(std::log(1.0 / (1.0 - confidence)) * sum / 2.0);
}

FunctionalEstimate estimate_functional(const Records& records, const BellFunctional& f,
                                       double confidence) {
  const Scenario& s = f.scenario;
  if (!(records.scenario == s)) throw InvalidArgument("estimate_functional: scenario mismatch");
  if (records.size() == 0) throw InvalidArgument("estimate_functional: no records");
  std::vector<std::size_t> setting_counts(s.setting_count(), 0);
  std::vector<std::size_t> cell_counts(s.cells(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    ++setting_counts[records.settings[i]];
    ++cell_counts[records.settings[i] * s.outcome_count() + records.outcomes[i]];
  }
  const double deviation = hoeffding_deviation(f, setting_counts, confidence);
  double value = 0.0;
  for (std::size_t x = 0; x < s.setting_count(); ++x) {
    if (setting_counts[x] == 0) continue;  // only reachable for all-zero coefficient rows
    for (std::size_t a = 0; a < s.outcome_count(); ++a)
      value += f.coefficient(x, a) * static_cast<double>(cell_counts[x * s.outcome_count() + a]) /
               static_cast<double>(setting_counts[x]);
  }
  return {value, value - deviation, deviation, confidence};
}

FunctionalEstimate estimate_functional(const Behavior& exact, const BellFunctional& f,
                                       double confidence) {
  const double value = evaluate_functional(f, exact);
  return {value, value, 0.0, confidence};
}

}  // namespace bellrand::bell
