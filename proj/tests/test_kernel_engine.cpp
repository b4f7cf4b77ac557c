#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "mpskernel/kernel_engine.hpp"
#include "test_support.hpp"

using namespace mpsk;
using support::integer_lattice;
using support::random_point;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("new_engine normalizer and degenerate inputs") {
  const auto plane = integer_lattice({1, 1});
  const auto engine = new_engine(plane, uniform_mps(plane));
  CHECK(engine.norm2 == doctest::Approx(10.0));

  // A product of ones is the canonical weighting in disguise.
  const auto product = new_engine(plane, product_weights(plane, {{1, 1, 1}, {1, 1, 1}}));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(rng, 2);
    const auto xp = random_point(rng, 2);
    CHECK(eval_kernel(product, x, xp) == doctest::Approx(eval_kernel(engine, x, xp)));
  }

  CHECK_THROWS_AS(new_engine(plane, product_weights(plane, {{0, 0, 0}, {0, 0, 0}})),
                  std::runtime_error);
  CHECK_THROWS_AS(new_engine(plane, uniform_mps(integer_lattice({1}))), std::invalid_argument);
}

TEST_CASE("local_features") {
  const auto axis = axis_integer(1);
  const auto at_zero = local_features(axis, 0.0);
  for (int i = 0; i < 3; ++i) CHECK(at_zero(i) == std::complex<double>(1.0, 0.0));

  const auto at_pi = local_features(axis, M_PI);
  CHECK(at_pi(0).real() == doctest::Approx(-1.0));
  CHECK(at_pi(1).real() == doctest::Approx(1.0));
  CHECK(at_pi(2).real() == doctest::Approx(-1.0));
  CHECK(std::abs(at_pi(0).imag()) < 1e-12);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  const auto spectra = axis_from_spectra({{0.0, 0.3, 1.7}});
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = local_features(spectra, box(rng));
    const int m = spectra.max_offset();
    CHECK(psi(m) == std::complex<double>(1.0, 0.0));
    for (int k = 1; k <= m; ++k)
      CHECK(std::abs(psi(m - k) - std::conj(psi(m + k))) < 1e-14);
  }
}

TEST_CASE("eval_kernel closed forms") {
  const auto line = integer_lattice({1});
  const auto engine = new_engine(line, uniform_mps(line));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> box(-6.0, 6.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double x = box(rng);
    const double xp = box(rng);
    CHECK(eval_kernel(engine, vec1(x), vec1(xp)) ==
          doctest::Approx(0.5 * (1.0 + std::cos(x - xp))).epsilon(1e-12));
  }
  CHECK(eval_kernel(engine, vec1(0.0), vec1(M_PI)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval_kernel(engine, vec1(0.3), vec1(0.3)) == doctest::Approx(1.0));

  const auto plane = integer_lattice({1, 1});
  const auto engine2 = new_engine(plane, uniform_mps(plane));
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(rng, 2);
    const auto xp = random_point(rng, 2);
    const double d1 = x(0) - xp(0);
    const double d2 = x(1) - xp(1);
    const double closed =
        (1.0 + std::cos(d1) + std::cos(d2) + std::cos(d1 + d2) + std::cos(d1 - d2)) / 5.0;
    CHECK(eval_kernel(engine2, x, xp) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(dense_kernel(plane, uniform_mps(plane), x, xp) ==
          doctest::Approx(closed).epsilon(1e-12));
  }

  CHECK_THROWS_AS(eval_kernel(engine2, vec1(0.0), vec1(0.0)), std::invalid_argument);
}

TEST_CASE("contraction agrees with the dense oracle over random weightings") {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> pick_m(1, 2);
  std::uniform_int_distribution<int> pick_bond(1, 4);
  for (int d = 1; d <= 5; ++d) {
    for (int rep = 0; rep < 3; ++rep) {
      FrequencyLattice lattice;
      for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(pick_m(rng)));
      const auto weights = random_mps(lattice, pick_bond(rng), rng());
      const auto engine = new_engine(lattice, weights);
      for (int pair = 0; pair < 5; ++pair) {
        const auto x = random_point(rng, d);
        const auto xp = random_point(rng, d);
        const double exact = eval_kernel(engine, x, xp);
        CHECK(std::abs(exact - dense_kernel(lattice, weights, x, xp)) <= 1e-9);
        CHECK(std::abs(eval_kernel(engine, x, x) - 1.0) <= 1e-9);
        CHECK(std::abs(eval_kernel(engine, xp, x) - exact) <= 1e-12);
        const auto delta = random_point(rng, d);
        CHECK(std::abs(eval_kernel(engine, x + delta, xp + delta) - exact) <= 1e-9);
      }
    }
  }
}

TEST_CASE("entangled-tensor ordering reproduces the chain contraction") {
  std::mt19937_64 rng(55);
  for (int d : {1, 3, 8}) {
    FrequencyLattice lattice;
    for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(1));
    const auto engine = new_engine(lattice, random_mps(lattice, 4, rng()));
    for (int pair = 0; pair < 10; ++pair) {
      const auto x = random_point(rng, d);
      const auto xp = random_point(rng, d);
      CHECK(std::abs(eval_kernel_etk(engine, x, xp) - eval_kernel(engine, x, xp)) <= 1e-9);
    }
    const auto x = random_point(rng, d);
    CHECK(eval_kernel_etk(engine, x, x) == doctest::Approx(1.0).epsilon(1e-9));
  }

  const auto line = integer_lattice({1});
  const auto engine = new_engine(line, uniform_mps(line));
  CHECK(eval_kernel_etk(engine, vec1(0.2), vec1(1.4)) ==
        doctest::Approx(0.5 * (1.0 + std::cos(1.2))).epsilon(1e-12));
}

TEST_CASE("gram matrices") {
  const auto plane = integer_lattice({1, 1});
  const auto engine = new_engine(plane, random_mps(plane, 2, 66));

  Eigen::MatrixXd one(1, 2);
  one << 0.4, -0.2;
  CHECK(gram(engine, one, one)(0, 0) == doctest::Approx(1.0));

  std::mt19937_64 rng(8);
  Eigen::MatrixXd points(30, 2);
  for (int i = 0; i < 30; ++i) points.row(i) = random_point(rng, 2).transpose();
  const Eigen::MatrixXd g = gram(engine, points, points);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  for (int i = 0; i < 30; ++i) CHECK(g(i, i) == doctest::Approx(1.0));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(g);
  CHECK(eigs.eigenvalues().minCoeff() >= -1e-8);

  // Thread fan-out must not change a single bit.
  const Eigen::MatrixXd g4 = gram(engine, points, points, 4);
  CHECK(g == g4);
}

TEST_CASE("dense features match the engine") {
  const auto line = integer_lattice({1});
  const auto uniform = uniform_mps(line);
  const auto phi0 = dense_feature_phi2(line, uniform, vec1(0.0));
  REQUIRE(phi0.size() == 3);
  CHECK(phi0(0).real() == doctest::Approx(0.5));
  CHECK(phi0(1).real() == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(phi0(2).real() == doctest::Approx(0.5));
  CHECK(std::abs(phi0.dot(phi0) - std::complex<double>(1.0, 0.0)) < 1e-12);

  std::mt19937_64 rng(404);
  for (int d = 1; d <= 4; ++d) {
    FrequencyLattice lattice;
    for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(1));
    const auto weights = random_mps(lattice, 2, rng());
    const auto engine = new_engine(lattice, weights);
    const auto same = random_point(rng, d);
    CHECK(dense_kernel(lattice, weights, same, same) == doctest::Approx(1.0).epsilon(1e-12));
    for (int pair = 0; pair < 5; ++pair) {
      const auto x = random_point(rng, d);
      const auto xp = random_point(rng, d);
      const auto fx = dense_feature_phi2(lattice, weights, x);
      const auto fxp = dense_feature_phi2(lattice, weights, xp);
      const std::complex<double> inner = fx.dot(fxp);
      CHECK(std::abs(inner.imag()) < 1e-10);
      CHECK(std::abs(inner.real() - eval_kernel(engine, x, xp)) <= 1e-10);
      CHECK(std::abs(inner.real() - dense_kernel(lattice, weights, x, xp)) <= 1e-10);
    }
  }

  FrequencyLattice big;
  for (int j = 0; j < 3; ++j) big.axes.push_back(axis_integer(2));
  CHECK_THROWS_AS(dense_feature_phi2(big, uniform_mps(big), random_point(rng, 3), 10),
                  std::runtime_error);
}

TEST_CASE("dense kernel is splitting-invariant for symmetric weightings") {
  const auto mirror_splitting = [](const MultiIndex& idx) {
    for (int v : idx) {
      if (v > 0) return false;
      if (v < 0) return true;
    }
    return true;
  };
  std::mt19937_64 rng(611);
  for (int d = 1; d <= 3; ++d) {
    FrequencyLattice lattice;
    for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(1));
    const auto weights = symmetrize(random_mps(lattice, 2, rng()));
    for (int pair = 0; pair < 10; ++pair) {
      const auto x = random_point(rng, d);
      const auto xp = random_point(rng, d);
      const double a = dense_kernel(lattice, weights, x, xp);
      const double b = dense_kernel(lattice, weights, x, xp, mirror_splitting);
      CHECK(std::abs(a - b) <= 1e-12);
    }
  }
}

TEST_CASE("asymmetric chains are caught by the imaginary residue guard") {
  const auto line = integer_lattice({1});
  KernelEngine broken;
  broken.lattice = line;
  broken.b_mps = product_weights(line, {{2.0, 1.0, 0.25}});  // deliberately not symmetric
  broken.norm2 = squared_sum(broken.b_mps);
  CHECK_THROWS_AS(eval_kernel(broken, vec1(0.3), vec1(1.9)), std::runtime_error);
  CHECK_THROWS_AS(eval_kernel_etk(broken, vec1(0.3), vec1(1.9)), std::runtime_error);
}

TEST_CASE("non-integer frequency lattices go through every evaluation path") {
  FrequencyLattice lattice;
  lattice.axes.push_back(axis_from_spectra({{0.0, 0.7}}));
  lattice.axes.push_back(axis_from_spectra({{0.0, 1.3}, {0.0, 0.4}}));
  const auto weights = random_mps(lattice, 2, 515);
  const auto engine = new_engine(lattice, weights);
  std::mt19937_64 rng(516);
  for (int pair = 0; pair < 10; ++pair) {
    const auto x = random_point(rng, 2, 4.0);
    const auto xp = random_point(rng, 2, 4.0);
    const double exact = eval_kernel(engine, x, xp);
    CHECK(std::abs(exact - dense_kernel(lattice, weights, x, xp)) <= 1e-9);
    CHECK(std::abs(exact - eval_kernel_etk(engine, x, xp)) <= 1e-9);
    CHECK(std::abs(eval_kernel(engine, x, x) - 1.0) <= 1e-9);
  }
}
