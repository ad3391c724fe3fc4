// Device-independent layer: (n, m, d) scenarios, behaviors p(a|x), local
// deterministic vertices, Bell functionals and finite-statistics estimation.
//
// Table layout: a behavior over n parties stores p(a|x) at
//   setting_index(x) * outcome_count() + outcome_index(a)
// where both indices are mixed-radix with party 0 as the most significant
// digit. All tables (behaviors, functional coefficients) share this layout.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellrand/quantum.hpp"

namespace bellrand::bell {

inline constexpr std::size_t kMaxTableCells = 100'000'000;
inline constexpr std::size_t kMaxVertices = 1'000'000;

class Scenario {
 public:
  Scenario(int parties, int inputs, int outputs);

  int parties() const noexcept { return parties_; }
  int inputs() const noexcept { return inputs_; }
  int outputs() const noexcept { return outputs_; }

  std::size_t setting_count() const noexcept { return setting_count_; }  // m^n
  std::size_t outcome_count() const noexcept { return outcome_count_; }  // d^n
  std::size_t cells() const noexcept { return setting_count_ * outcome_count_; }

  std::size_t setting_index(std::span<const int> x) const;
  std::size_t outcome_index(std::span<const int> a) const;
  std::vector<int> settings_of(std::size_t index) const;
  std::vector<int> outcomes_of(std::size_t index) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  int parties_;
  int inputs_;
  int outputs_;
  std::size_t setting_count_;
  std::size_t outcome_count_;
};

std::string to_string(const Scenario& s);

/// Conditional probability table p(a|x) for every setting tuple x.
class Behavior {
 public:
  Behavior(Scenario scenario, Eigen::VectorXd table);

  const Scenario& scenario() const noexcept { return scenario_; }
  const Eigen::VectorXd& table() const noexcept { return table_; }

  double operator()(std::size_t setting, std::size_t outcome) const {
    return table_(static_cast<Eigen::Index>(setting * scenario_.outcome_count() + outcome));
  }
  double probability(std::span<const int> outcomes, std::span<const int> settings) const;

  /// Distribution over joint outcomes for one setting tuple.
  Eigen::VectorXd conditional(std::size_t setting) const;

  static Behavior mixture(double lambda, const Behavior& a, const Behavior& b);

 private:
  Scenario scenario_;
  Eigen::VectorXd table_;
};

/// Per party, a lookup table input -> output.
struct DeterministicStrategy {
  std::vector<std::vector<int>> outputs;  // outputs[party][input]

  Behavior behavior(const Scenario& s) const;
};

/// Convex mixture of deterministic strategies (local hidden-variable model).
class LocalModel {
 public:
  LocalModel(Scenario scenario, std::vector<double> weights,
             std::vector<DeterministicStrategy> strategies);

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<DeterministicStrategy>& strategies() const noexcept { return strategies_; }

  Behavior behavior() const;

 private:
  Scenario scenario_;
  std::vector<double> weights_;
  std::vector<DeterministicStrategy> strategies_;
};

/// Linear form  sum_{x,a} alpha(x, a) p(a|x)  with an optional classical bound.
struct BellFunctional {
  Scenario scenario;
  Eigen::VectorXd coefficients;
  std::optional<double> classical_bound;

  BellFunctional(Scenario s, Eigen::VectorXd alpha,
                 std::optional<double> bound = std::nullopt);

  double coefficient(std::size_t setting, std::size_t outcome) const {
    return coefficients(static_cast<Eigen::Index>(setting * scenario.outcome_count() + outcome));
  }
};

/// <a0 b0> + <a0 b1> + <a1 b0> - <a1 b1> with outputs a -> 1 - 2a.
BellFunctional chsh();

// ---------------------------------------------------------------------------
// Behaviors

using MeasurementSet = std::vector<std::vector<quantum::Povmd>>;  // [party][input]

/// p(a|x) = Tr(rho (x)_k M^{x_k}_{a_k}).
Behavior quantum_behavior(const quantum::DensityStated& state,
                          const MeasurementSet& measurements);

/// A0 = Z, A1 = X, B0 = (Z + X)/sqrt2, B1 = (Z - X)/sqrt2 as two-outcome POVMs.
MeasurementSet chsh_optimal_measurements();

/// (|00> + |11>)/sqrt2 measured with chsh_optimal_measurements().
Behavior tsirelson_behavior();

/// p(a,b|x,y) = 1/2 when a xor b = x*y.
Behavior pr_box();

Behavior uniform_behavior(const Scenario& s);

struct NoSignalingReport {
  bool pass = true;
  double worst_violation = 0.0;
  int party = -1;                  // party whose input leaks
  std::vector<int> other_settings;  // settings of the remaining parties
  std::vector<int> other_outcomes;  // outcomes of the remaining parties
};

NoSignalingReport check_no_signaling(const Behavior& b, double tol);

// ---------------------------------------------------------------------------
// Local polytope vertices

/// Lexicographic enumeration of deterministic strategies, (party, input)
/// tables with party 0 / input 0 as the most significant digit.
class LocalVertices {
 public:
  explicit LocalVertices(Scenario s);

  std::size_t size() const noexcept { return count_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  DeterministicStrategy strategy(std::size_t index) const;
  Behavior vertex(std::size_t index) const { return strategy(index).behavior(scenario_); }

  class iterator {
   public:
    using value_type = Behavior;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const LocalVertices* owner, std::size_t i) : owner_(owner), i_(i) {}
    Behavior operator*() const { return owner_->vertex(i_); }
    iterator& operator++() { ++i_; return *this; }
    iterator operator++(int) { auto t = *this; ++i_; return t; }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const LocalVertices* owner_ = nullptr;
    std::size_t i_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }

 private:
  Scenario scenario_;
  std::size_t count_;
};

LocalVertices enumerate_local_vertices(const Scenario& s);

double evaluate_functional(const BellFunctional& f, const Behavior& b);

/// Value of the functional on a deterministic strategy, without building its table.
double evaluate_functional(const BellFunctional& f, const DeterministicStrategy& s);

/// Maximum of the functional over the local polytope (attained at a vertex).
double local_bound(const BellFunctional& f);

// ---------------------------------------------------------------------------
// Finite statistics

/// One record per round: setting index and joint outcome index.
struct Records {
  Scenario scenario;
  std::vector<std::uint32_t> settings;
  std::vector<std::uint32_t> outcomes;

  std::size_t size() const noexcept { return settings.size(); }
};

/// Uniform distribution over all setting tuples.
std::vector<double> uniform_settings(const Scenario& s);

/// i.i.d. rounds from p(a|x) pi(x). Round i is a pure function of (seed, i).
Records simulate_rounds(const Behavior& b, std::span<const double> settings_distribution,
                        std::size_t rounds, std::uint64_t seed, unsigned threads = 1);

struct FunctionalEstimate {
  double value;        // plug-in estimate from conditional frequencies
  double lower_bound;  // value - deviation
  double deviation;    // Hoeffding deviation at the requested confidence
  double confidence;
};

/// Hoeffding deviation sqrt(ln(1/(1-confidence)) * sum_x range_x^2 / N_x / 2)
/// for the plug-in estimator, given per-setting sample counts.
double hoeffding_deviation(const BellFunctional& f, std::span<const std::size_t> counts,
                           double confidence);

FunctionalEstimate estimate_functional(const Records& records, const BellFunctional& f,
                                       double confidence);

/// Infinite-sample limit: the exact table stands in for the frequencies.
FunctionalEstimate estimate_functional(const Behavior& exact, const BellFunctional& f,
                                       double confidence);

// ---------------------------------------------------------------------------
// Text table format:  "scenario n m d"  then  "x_1..x_n a_1..a_n p"  per cell.

void write_behavior(std::ostream& os, const Behavior& b);
Behavior read_behavior(std::istream& is);

}  // namespace bellrand::bell
