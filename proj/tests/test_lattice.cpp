#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fbic/lattice.hpp"
#include "fbic/spectral.hpp"

using namespace fbic;

TEST_CASE("defect lattice bond layout") {
  SUBCASE("201-site ring") {
    const LatticeSpec lattice = build_defect_lattice(201, 0.7, 2.0);
    CHECK(lattice.n_sites() == 201);
    CHECK(lattice.defect_center() == 100);
    int weak = 0;
    for (int b = 0; b < lattice.n_sites(); ++b) {
      const double k = lattice.hoppings()[b];
      if (k == doctest::Approx(1.4)) {
        ++weak;
      } else {
        CHECK(k == 2.0);
      }
    }
    CHECK(weak == 2);
    CHECK(lattice.bond(-1) == doctest::Approx(1.4));
    CHECK(lattice.bond(0) == doctest::Approx(1.4));
    CHECK(lattice.bond(1) == 2.0);
    CHECK(lattice.bulk_hopping() == 2.0);
  }
  SUBCASE("smallest admissible ring") {
    const LatticeSpec lattice = build_defect_lattice(5, 0.5, 1.0);
    const Eigen::VectorXd expected{{1.0, 0.5, 0.5, 1.0, 1.0}};
    CHECK(lattice.hoppings() == expected);
    CHECK(lattice.defect_center() == 2);
  }
  SUBCASE("rho equal to kappa is homogeneous") {
    const LatticeSpec lattice = build_defect_lattice(201, 1.0, 0.3);
    CHECK((lattice.hoppings().array() == 0.3).all());
  }
}

TEST_CASE("site indexing is symmetric about the defect") {
  const LatticeSpec lattice = build_defect_lattice(11, 0.7, 1.0);
  CHECK(lattice.min_site() == -5);
  CHECK(lattice.max_site() == 5);
  for (int n = -5; n <= 5; ++n) {
    CHECK(lattice.to_site(lattice.to_index(n)) == n);
  }
  CHECK(lattice.to_index(0) == 5);
}

TEST_CASE("builder and constructor reject bad input") {
  CHECK_THROWS_AS(build_defect_lattice(200, 0.7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_defect_lattice(3, 0.7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_defect_lattice(201, 1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_defect_lattice(201, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_defect_lattice(201, 0.7, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec(Eigen::VectorXd{{1.0, -0.1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(
      LatticeSpec(Eigen::VectorXd{{1.0, std::numeric_limits<double>::quiet_NaN(), 1.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec(Eigen::VectorXd{{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(DriveSpec(std::numeric_limits<double>::infinity(), 0.3),
                  std::invalid_argument);
  CHECK_THROWS_AS(DriveSpec(2.0, 0.0), std::invalid_argument);
}

TEST_CASE("participation ratio limits") {
  Eigen::VectorXcd single = Eigen::VectorXcd::Zero(201);
  single[37] = {0.0, 2.0};
  CHECK(participation_ratio(single) == doctest::Approx(1.0));

  const Eigen::VectorXcd uniform = Eigen::VectorXcd::Constant(201, {0.3, -0.1});
  CHECK(participation_ratio(uniform) == doctest::Approx(201.0));

  // Independent of normalization and global phase.
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(31);
  const double r = participation_ratio(v);
  CHECK(participation_ratio((v * std::complex<double>(0.0, -7.5)).eval()) ==
        doctest::Approx(r).epsilon(1e-13));

  CHECK_THROWS_AS(participation_ratio(Eigen::VectorXcd::Zero(4).eval()), std::invalid_argument);
}

TEST_CASE("homogeneous ring energies are the circulant eigenvalues") {
  const LatticeSpec lattice = build_defect_lattice(201, 1.0, 1.0);
  const auto modes = undriven_spectrum(lattice);
  std::vector<double> expected;
  for (int m = 0; m < 201; ++m) {
    expected.push_back(2.0 * std::cos(2.0 * std::numbers::pi * m / 201));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(modes.size() == 201);
  for (int k = 0; k < 201; ++k) {
    CHECK(modes[k].energy == doctest::Approx(expected[k]).epsilon(1e-12));
  }
}

TEST_CASE("five-site ring against a hand-built dense oracle") {
  const double kappa = 0.8;
  const LatticeSpec lattice = build_defect_lattice(5, 0.6, kappa);

  // Written out by hand: bonds 1 and 2 are weak, the ring closes 4 -> 0.
  Eigen::Matrix<double, 5, 5> h = Eigen::Matrix<double, 5, 5>::Zero();
  const double rho = 0.6 * kappa;
  h(0, 1) = h(1, 0) = kappa;
  h(1, 2) = h(2, 1) = rho;
  h(2, 3) = h(3, 2) = rho;
  h(3, 4) = h(4, 3) = kappa;
  h(4, 0) = h(0, 4) = kappa;
  Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> general(h);
  std::vector<double> expected;
  for (int k = 0; k < 5; ++k) {
    expected.push_back(general.eigenvalues()[k].real());
  }
  std::sort(expected.begin(), expected.end());

  const auto modes = undriven_spectrum(lattice);
  for (int k = 0; k < 5; ++k) {
    CHECK(modes[k].energy == doctest::Approx(expected[k]).epsilon(1e-12));
    const Eigen::VectorXcd residual =
        h.cast<Complex>() * modes[k].mode.values - modes[k].energy * modes[k].mode.values;
    CHECK(residual.norm() < 1e-12);
  }

  // The homogeneous five-site ring: {2 kappa cos(2 pi m / 5)}.
  const auto plain = undriven_spectrum(build_defect_lattice(5, 1.0, kappa));
  std::vector<double> circulant;
  for (int m = 0; m < 5; ++m) {
    circulant.push_back(2.0 * kappa * std::cos(2.0 * std::numbers::pi * m / 5));
  }
  std::sort(circulant.begin(), circulant.end());
  for (int k = 0; k < 5; ++k) {
    CHECK(plain[k].energy == doctest::Approx(circulant[k]).epsilon(1e-12));
  }
}

TEST_CASE("undriven defect ring has only extended modes") {
  const double kappa = 1.0;
  const LatticeSpec lattice = build_defect_lattice(201, 0.7, kappa);
  const auto modes = undriven_spectrum(lattice);
  ClassifyOptions options;
  std::vector<double> r;
  for (const auto& m : modes) {
    CHECK(std::abs(m.energy) <= 2.0 * kappa + 1e-12);
    const TailContrast tail = tail_contrast(m.mode.values, lattice, options.tail_margin);
    CHECK(tail.d > options.resonance_threshold);
    r.push_back(participation_ratio(m.mode));
  }
  std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
  CHECK(std::abs(r[r.size() / 2] - 134.0) < 5.0);
}
