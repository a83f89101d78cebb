#include <doctest.h>

#include <cmath>
#include <random>

#include "fbic/effective.hpp"
#include "fbic/lattice.hpp"

using namespace fbic;

namespace {

// Power series sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!), adequate for |x| <= 10.
double bessel_series(int n, double x) {
  double term = std::pow(x / 2.0, n) / std::tgamma(n + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -(x / 2.0) * (x / 2.0) / (k * (k + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) {
      break;
    }
  }
  return sum;
}

double bessel_std(int n, double x) {
  const double sign = (n < 0 && n % 2 != 0) ? -1.0 : 1.0;
  const double flip = (x < 0.0 && n % 2 != 0) ? -1.0 : 1.0;
  return sign * flip * std::cyl_bessel_j(static_cast<double>(std::abs(n)), std::abs(x));
}

// Direct double sum for Q with std::cyl_bessel_j, truncation L.
double q_oracle(double gamma, int l_max) {
  double q = 0.0;
  for (int l = -l_max; l <= l_max; ++l) {
    for (int j = -l_max; j <= l_max; ++j) {
      if (l == 0 || j == 0) {
        continue;
      }
      q -= bessel_std(l, gamma) * bessel_std(j, gamma) * bessel_std(j - l, gamma) /
           (static_cast<double>(l) * j);
    }
  }
  return q;
}

} // namespace

TEST_CASE("Bessel values against the power series and std") {
  for (int n = 0; n <= 12; ++n) {
    for (double x : {0.0, 1e-7, 0.3, 1.0, 2.0, 2.404826, 5.0, 9.5}) {
      CHECK(bessel_j(n, x) == doctest::Approx(bessel_series(n, x)).epsilon(1e-12).scale(1.0));
    }
  }
  for (int n = 0; n <= 60; n += 3) {
    for (double x : {0.5, 2.38, 12.0, 33.3, 49.9}) {
      CHECK(std::abs(bessel_j(n, x) - bessel_std(n, x)) < 1e-13);
    }
  }
}

TEST_CASE("Bessel symmetries and fixed values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0, 2.404826)) < 1e-6);
  CHECK(std::abs(bessel_j(0, kDynamicLocalization)) < 1e-15);
  CHECK(bessel_j(1, 2.404826) == doctest::Approx(0.519147).epsilon(1e-5));
  for (int n = 1; n <= 9; ++n) {
    CHECK(bessel_j(-n, 1.7) == doctest::Approx((n % 2 ? -1.0 : 1.0) * bessel_j(n, 1.7)));
    CHECK(bessel_j(n, -1.7) == doctest::Approx((n % 2 ? -1.0 : 1.0) * bessel_j(n, 1.7)));
  }
  const Eigen::VectorXd table = bessel_j_table(20, 2.38);
  for (int n = 0; n <= 20; ++n) {
    CHECK(table[n] == doctest::Approx(bessel_j(n, 2.38)).epsilon(1e-13));
  }
  // Neumann addition: J0^2 + 2 sum J_n^2 = 1.
  CHECK(table[0] * table[0] + 2.0 * table.tail(20).squaredNorm() ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Bessel domain errors") {
  CHECK_THROWS_AS(bessel_j(kBesselMaxOrder + 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(0, 60.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(0, std::nan("")), std::invalid_argument);
}

TEST_CASE("Q factor") {
  CHECK(q_factor(0.0) == 0.0);
  // The double sum is negative across the scan window. The lower bound -0.305 only holds
  // from the dynamic localization point upward; at the left edge the sum reaches -0.437.
  for (int k = 0; k <= 80; ++k) {
    const double g = 2.0 + 0.01 * k;
    const double q = q_factor(g);
    CHECK(q < 0.0);
    if (g >= 2.405) {
      CHECK(q > -0.305);
    }
  }
  CHECK(q_factor(2.0) == doctest::Approx(-0.43701).epsilon(1e-4));
  CHECK(q_factor(2.8) == doctest::Approx(-0.16332).epsilon(1e-4));
  CHECK(std::abs(q_factor(2.405, 40) - q_factor(2.405, 80)) < 1e-12);
  for (double g : {0.7, 2.0, 2.38, 2.9}) {
    CHECK(q_factor(g, 25) == doctest::Approx(q_oracle(g, 25)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(q_factor(2.0, 0), std::invalid_argument);
}

TEST_CASE("Q does not depend on the summation order") {
  for (double g : {2.0, 2.405, 2.8}) {
    const Eigen::VectorXd t = bessel_j_table(80, g);
    auto j = [&](int n) { return (n < 0 && -n % 2 == 1) ? -t[-n] : t[std::abs(n)]; };
    double reversed = 0.0;
    for (int m = -40; m <= 40; ++m) {
      for (int l = -40; l <= 40; ++l) {
        if (l != 0 && m != 0) {
          reversed += j(l) * j(m) * j(m - l) / (static_cast<double>(l) * m);
        }
      }
    }
    CHECK(std::abs(q_factor(g) + reversed) < 1e-15);
  }
}

TEST_CASE("effective hoppings") {
  SUBCASE("no defect") {
    const EffectiveLattice e = effective_hoppings(2.2, 0.3, 1.0);
    CHECK(e.alpha == doctest::Approx(e.kappa_e));
    CHECK(e.beta == doctest::Approx(e.kappa_e));
    CHECK(e.kappa_e == doctest::Approx(0.3 * bessel_j(0, 2.2)));
  }
  SUBCASE("closed form") {
    const double kappa = 0.3;
    const double rho = 0.21;
    const double g = 2.35;
    const double q = q_factor(g);
    const EffectiveLattice e = effective_hoppings(g, kappa, 0.7);
    CHECK(e.q_value == q);
    CHECK(e.alpha ==
          doctest::Approx(kappa * bessel_j(0, g) - kappa * q * (rho * rho - kappa * kappa)));
    CHECK(e.beta ==
          doctest::Approx(rho * bessel_j(0, g) + rho * q * (rho * rho - kappa * kappa)));
    CHECK_FALSE(e.outside_validity);
  }
  SUBCASE("at dynamic localization only the defect terms survive") {
    const EffectiveLattice e = effective_hoppings(kDynamicLocalization, 0.3, 0.7);
    CHECK(std::abs(e.kappa_e) < 1e-15);
    CHECK(e.alpha < 0.0);
    CHECK(e.beta > 0.0);
  }
  SUBCASE("alpha nearly vanishes at the first root") {
    const EffectiveLattice e = effective_hoppings(2.38, 0.3, 0.7);
    CHECK(std::abs(e.alpha) < 2e-3 * 0.3);
  }
  CHECK(effective_hoppings(1.0, 0.3, 0.7).outside_validity);
}

TEST_CASE("bond corrections by hand") {
  SUBCASE("uniform profile") {
    const Eigen::VectorXd delta = effective_delta(Eigen::VectorXd::Constant(9, 0.4), 2.1);
    REQUIRE(delta.size() == 7);
    CHECK((delta.array() - 0.4 * bessel_j(0, 2.1)).abs().maxCoeff() < 1e-15);
  }
  SUBCASE("random seven-bond profile") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.1, 1.0);
    Eigen::VectorXd k(7);
    for (auto& v : k) {
      v = dist(rng);
    }
    const double g = 2.27;
    const double j0 = bessel_j(0, g);
    const double q = q_factor(g);
    const Eigen::VectorXd delta = effective_delta(k, g);
    REQUIRE(delta.size() == 5);
    for (int n = 1; n <= 5; ++n) {
      const double bracket = k[n] * k[n + 1] * k[n + 1] - 2.0 * k[n] * k[n] * k[n] +
                             k[n] * k[n - 1] * k[n - 1];
      CHECK(delta[n - 1] == doctest::Approx(k[n] * j0 - q * bracket).epsilon(1e-14));
    }
  }
  SUBCASE("defect ring reproduces the kappa_e, alpha, beta pattern") {
    const LatticeSpec lattice = build_defect_lattice(21, 0.7, 0.3);
    const EffectiveLattice e = effective_hoppings(2.3, 0.3, 0.7);
    const Eigen::VectorXd delta = effective_delta(lattice, 2.3);
    REQUIRE(delta.size() == 21);
    auto at = [&](int bond) { return delta[lattice.to_index(bond)]; };
    CHECK(at(-2) == doctest::Approx(e.alpha));
    CHECK(at(-1) == doctest::Approx(e.beta));
    CHECK(at(0) == doctest::Approx(e.beta));
    CHECK(at(1) == doctest::Approx(e.alpha));
    for (int b : {-8, -5, -3, 2, 4, 9}) {
      CHECK(at(b) == doctest::Approx(e.kappa_e));
    }
  }
  CHECK_THROWS_AS(effective_delta(Eigen::VectorXd::Constant(2, 1.0), 2.0),
                  std::invalid_argument);
}

TEST_CASE("selective destruction roots") {
  const SdtRoots roots = find_sdt_roots(0.3, 0.7);
  REQUIRE(roots.gamma1);
  REQUIRE(roots.gamma2);
  CHECK(std::abs(*roots.gamma1 - 2.3800) < 0.01);
  CHECK(std::abs(*roots.gamma2 - 2.42875) < 0.01);
  CHECK(std::abs(effective_hoppings(*roots.gamma1, 0.3, 0.7).alpha) < 1e-9);
  CHECK(std::abs(effective_hoppings(*roots.gamma2, 0.3, 0.7).beta) < 1e-9);

  // First-order estimate around the zero of J0.
  const double q = q_factor(kDynamicLocalization);
  const double shift = q * (0.49 * 0.09 - 0.09) / bessel_j(1, kDynamicLocalization);
  CHECK(*roots.gamma1 == doctest::Approx(kDynamicLocalization - shift).epsilon(2e-3));
  CHECK(*roots.gamma2 == doctest::Approx(kDynamicLocalization + shift).epsilon(2e-3));

  const SdtRoots weak = find_sdt_roots(0.15, 0.7);
  CHECK(std::abs(*weak.gamma1 - kDynamicLocalization) <
        std::abs(*roots.gamma1 - kDynamicLocalization));
  CHECK(std::abs(*weak.gamma2 - kDynamicLocalization) <
        std::abs(*roots.gamma2 - kDynamicLocalization));

  const SdtRoots close = find_sdt_roots(0.3, 0.999);
  CHECK(*close.gamma1 == doctest::Approx(kDynamicLocalization).epsilon(1e-3));
  CHECK(*close.gamma2 == doctest::Approx(kDynamicLocalization).epsilon(1e-3));

  const SdtRoots none = find_sdt_roots(0.3, 0.7, {2.0, 2.2});
  CHECK_FALSE(none.gamma1);
  CHECK_FALSE(none.gamma2);
  CHECK_FALSE(none.diagnostics.empty());

  CHECK_THROWS_AS(find_sdt_roots(0.3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(find_sdt_roots(0.3, 0.7, {2.5, 2.4}), std::invalid_argument);
}

TEST_CASE("isolated trimer") {
  const auto modes = trimer_modes(1.0);
  CHECK(modes[0].energy == doctest::Approx(-std::sqrt(2.0)));
  CHECK(std::abs(modes[1].energy) < 1e-15);
  CHECK(modes[2].energy == doctest::Approx(std::sqrt(2.0)));
  const Eigen::Vector3d zero = modes[1].amplitudes;
  CHECK(std::abs(zero[1]) < 1e-15);
  CHECK(std::abs(zero[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(zero[0] == doctest::Approx(-zero[2]));
  for (double beta : {0.3, 1.0, 4.2}) {
    const auto m = trimer_modes(beta);
    Eigen::Matrix3d v;
    for (int i = 0; i < 3; ++i) {
      v.col(i) = m[i].amplitudes;
    }
    CHECK((v.transpose() * v - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
}
