#pragma once

#include <array>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fbic/lattice.hpp"

namespace fbic {

/// First zero of J0.
inline constexpr double kDynamicLocalization = 2.404825557695773;

inline constexpr int kBesselMaxOrder = 200;
inline constexpr double kBesselMaxArgument = 50.0;

/// Bessel function of the first kind of integer order, |order| <= 200,
/// |x| <= 50. Miller backward recurrence normalized by
/// J0 + 2 sum J_2k = 1.
double bessel_j(int order, double x);

/// J_0(x) .. J_max_order(x) from a single backward recurrence.
Eigen::VectorXd bessel_j_table(int max_order, double x);

inline constexpr int kDefaultTruncation = 40;

/// Q(gamma) = -sum_{l,j != 0} J_l J_j J_{j-l} / (l j), with l, j running
/// over [-truncation, truncation]. Dimensionless (omega = 1).
double q_factor(double gamma, int truncation = kDefaultTruncation);

/// High-frequency effective lattice of the defect ring.
struct EffectiveLattice {
  double gamma = 0.0;
  double q_value = 0.0;
  double kappa_e = 0.0; ///< bulk bonds
  double alpha = 0.0;   ///< bonds -2 and +1 (sites -2<->-1, 1<->2)
  double beta = 0.0;    ///< bonds -1 and 0 (sites -1<->0, 0<->1)
  /// |J0(gamma)| > 0.15: outside the neighbourhood of dynamic localization
  /// where the effective hoppings were derived.
  bool outside_validity = false;
};

inline constexpr double kEffectiveValidity = 0.15;

EffectiveLattice effective_hoppings(double gamma, double kappa_over_omega,
                                    double rho_over_kappa,
                                    int truncation = kDefaultTruncation);

/// Delta_n = k_n J0 - Q [k_n k_{n+1}^2 - 2 k_n^3 + k_n k_{n-1}^2] for the
/// interior bonds 1 .. size-2 of an open profile.
Eigen::VectorXd effective_delta(const Eigen::VectorXd& profile, double gamma,
                                int truncation = kDefaultTruncation);

/// Delta_n for every bond of a periodic ring (neighbours wrap).
Eigen::VectorXd effective_delta(const LatticeSpec& lattice, double gamma,
                                int truncation = kDefaultTruncation);

struct SdtRoots {
  std::optional<double> gamma1; ///< alpha(gamma1) = 0
  std::optional<double> gamma2; ///< beta(gamma2) = 0
  std::string diagnostics;
};

/// Bisection on alpha and beta over `bracket` down to width 1e-9. A missing
/// sign change leaves the root empty and is explained in `diagnostics`.
SdtRoots find_sdt_roots(double kappa_over_omega, double rho_over_kappa,
                        std::pair<double, double> bracket = {2.0, 2.8},
                        int truncation = kDefaultTruncation);

struct TrimerMode {
  double energy;
  Eigen::Vector3d amplitudes; ///< on sites -1, 0, +1
};

/// Eigenpairs of the isolated three-site chain with both bonds equal to beta.
std::array<TrimerMode, 3> trimer_modes(double beta = 1.0);

} // namespace fbic
