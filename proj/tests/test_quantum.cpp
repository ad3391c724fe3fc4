#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "bellrand/quantum.hpp"
#include "random_quantum.hpp"

using namespace bellrand;
using namespace bellrand::quantum;

namespace {

ComplexVectord ket(std::initializer_list<std::complex<double>> amps) {
  ComplexVectord v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (auto a : amps) v(i++) = a;
  return v;
}

const double r2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("density state validation") {
  CHECK_NOTHROW(DensityStated::maximally_mixed(3));
  ComplexMatrixd bad = ComplexMatrixd::Identity(2, 2);
  CHECK_THROWS_AS(DensityStated{bad}, InvalidArgument);  // trace 2
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityStated{bad}, InvalidArgument);  // negative eigenvalue
  ComplexMatrixd nonherm = ComplexMatrixd::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityStated{nonherm}, InvalidArgument);
  CHECK_THROWS_AS(DensityStated{ComplexMatrixd::Ones(2, 3)}, DimensionError);
}

TEST_CASE("born probabilities: basis examples") {
  const auto comp = Povmd::computational(2);
  const auto p0 = born_probabilities(DensityStated::basis(2, 0), comp);
  CHECK(p0(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p0(1) == doctest::Approx(0.0).epsilon(1e-12));
  const auto plus = DensityStated::pure(ket({r2, r2}));
  const auto pp = born_probabilities(plus, comp);
  CHECK(pp(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pp(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("born probabilities: qudit amplitudes give |alpha_i|^2") {
  const ComplexVectord alpha = ket({{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.5 * r2, 0.5 * r2}});
  const auto p = born_probabilities(DensityStated::pure(alpha), Povmd::computational(4));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(p(i) - std::norm(alpha(i))) < 1e-12);
}

TEST_CASE("born probabilities mismatched dims") {
  CHECK_THROWS_AS(born_probabilities(DensityStated::maximally_mixed(2), Povmd::computational(3)), DimensionError);
}

TEST_CASE("post-measurement state examples") {
  const auto plus = DensityStated::pure(ket({r2, r2}));
  const auto kraus = KrausSetd::from_projective(Povmd::computational(2));
  const auto post = post_measurement_state(plus, kraus, 0);
  CHECK((post.matrix() - basis_projector<double>(2, 0)).cwiseAbs().maxCoeff() < 1e-12);

  const KrausSetd identity({ComplexMatrixd::Identity(2, 2)});
  const auto same = post_measurement_state(plus, identity, 0);
  CHECK((same.matrix() - plus.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  // Impossible branch.
  CHECK_THROWS_AS(post_measurement_state(DensityStated::basis(2, 0), kraus, 1), ImpossibleOutcome);
  CHECK_THROWS_AS(post_measurement_state(plus, kraus, 2), InvalidArgument);
}

TEST_CASE("post-measurement rank-2 projector on a qutrit matches direct arithmetic") {
  std::mt19937_64 rng(3);
  const auto rho = testing::random_state(rng, 3);
  const ComplexMatrixd u = testing::random_unitary(rng, 3);
  const ComplexMatrixd e = u.col(0) * u.col(0).adjoint() + u.col(1) * u.col(1).adjoint();
  const ComplexMatrixd rest = ComplexMatrixd::Identity(3, 3) - e;
  const KrausSetd kraus({e, rest});
  const auto post = post_measurement_state(rho, kraus, 0);
  const ComplexMatrixd direct = e * rho.matrix() * e;
  const ComplexMatrixd expected = direct / direct.trace();
  CHECK((post.matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("uncertainty relation examples") {
  const auto x = pauli::x<double>(), y = pauli::y<double>();
  const auto same = uncertainty_check(DensityStated::maximally_mixed(2), x, x);
  CHECK(same.rhs == doctest::Approx(0.0));

  const auto zero = uncertainty_check(DensityStated::basis(2, 0), x, y);
  CHECK(zero.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zero.rhs == doctest::Approx(1.0).epsilon(1e-12));

  const auto mixed = uncertainty_check(DensityStated::maximally_mixed(2), x, y);
  CHECK(mixed.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mixed.rhs) < 1e-12);

  ComplexMatrixd nonherm = x;
  nonherm(0, 1) = 2.0;
  CHECK_THROWS_AS(uncertainty_check(DensityStated::maximally_mixed(2), nonherm, y), InvalidArgument);
}

TEST_CASE("tensor product examples") {
  const ComplexMatrixd i2 = ComplexMatrixd::Identity(2, 2);
  CHECK((tensor_product(i2, i2) - ComplexMatrixd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  const auto ab = tensor_product(DensityStated::basis(2, 0), DensityStated::basis(2, 1));
  CHECK((ab.matrix() - basis_projector<double>(4, 1)).cwiseAbs().maxCoeff() == 0.0);

  ComplexVectord k00 = ComplexVectord::Zero(2), k11 = ComplexVectord::Zero(2);
  k00(0) = 1.0;
  k11(1) = 1.0;
  const ComplexVectord bell = (tensor_product(k00, k00) + tensor_product(k11, k11)) * r2;
  const auto rho = DensityStated::pure(bell);
  CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-12);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rho.matrix() - phi_plus<double>().matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("binary observables and projectivity") {
  const auto z = Povmd::from_binary_observable(pauli::z<double>());
  CHECK(z.is_projective());
  CHECK((z[0] - basis_projector<double>(2, 0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(Povmd::from_binary_observable(2.0 * pauli::z<double>()), InvalidArgument);
  std::mt19937_64 rng(8);
  CHECK_FALSE(testing::random_povm(rng, 2, 3).is_projective());
  CHECK_THROWS_AS(KrausSetd::from_projective(testing::random_povm(rng, 2, 3)), InvalidArgument);
  CHECK_THROWS_AS(Povmd({ComplexMatrixd::Identity(2, 2) / 2.0}), InvalidArgument);
}

TEST_CASE("Kraus set induces its POVM") {
  ComplexMatrixd m0 = ComplexMatrixd::Zero(2, 2), m1 = ComplexMatrixd::Zero(2, 2);
  m0(0, 0) = 1.0;
  m0(1, 1) = std::sqrt(0.3);
  m1(1, 1) = std::sqrt(0.7);
  const KrausSetd k({m0, m1});
  const auto f = k.povm();
  CHECK(f[1](1, 1).real() == doctest::Approx(0.7));
  CHECK_THROWS_AS(KrausSetd({m0}), InvalidArgument);
}

// --- properties -----------------------------------------------------------

TEST_CASE("property: Born probabilities sum to one") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index dim = 2 + trial % 3;
    const auto rho = testing::random_state(rng, dim);
    const auto povm = testing::random_povm(rng, dim, 2 + trial % 4);
    const auto p = born_probabilities(rho, povm);
    REQUIRE(std::abs(p.sum() - 1.0) < 1e-9);
    REQUIRE(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("property: repeated projective measurement is idempotent") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index dim = 2 + trial % 3;
    const auto rho = testing::random_state(rng, dim);
    const auto povm = testing::random_projective(rng, dim);
    const auto kraus = KrausSetd::from_projective(povm);
    const auto p = born_probabilities(rho, povm);
    for (std::size_t k = 0; k < povm.size(); ++k) {
      if (p(static_cast<Eigen::Index>(k)) < 1e-6) continue;
      const auto again = born_probabilities(post_measurement_state(rho, kraus, k), povm);
      REQUIRE(std::abs(again(static_cast<Eigen::Index>(k)) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("property: Robertson lhs >= rhs") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Index dim = 2 + trial % 3;
    const auto rho = testing::random_state(rng, dim);
    const auto u = uncertainty_check(rho, testing::random_hermitian(rng, dim), testing::random_hermitian(rng, dim));
    REQUIRE(u.lhs >= u.rhs - 1e-9 * std::max(1.0, u.lhs));
  }
}

TEST_CASE("property: Born rule is linear in the state") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index dim = 2 + trial % 3;
    const auto a = testing::random_state(rng, dim), b = testing::random_state(rng, dim);
    const auto povm = testing::random_povm(rng, dim, 3);
    const double lambda = uni(rng);
    const auto mixed = born_probabilities(DensityStated::mixture(lambda, a, b), povm);
    const Eigen::VectorXd expected =
        lambda * born_probabilities(a, povm) + (1.0 - lambda) * born_probabilities(b, povm);
    REQUIRE((mixed - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("single precision instantiation") {
  const auto rho = DensityState<float>::maximally_mixed(2);
  const auto p = born_probabilities(rho, Povm<float>::computational(2));
  CHECK(p(0) == doctest::Approx(0.5f));
}

}  // TEST_SUITE
