#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fbic {

using Complex = std::complex<double>;

/// Units: the drive frequency is fixed to 1, so every rate is measured in
/// units of the drive frequency and one period lasts 2*pi.
inline constexpr double kPeriod = 2.0 * std::numbers::pi;

enum class Boundary { periodic };

/// One-dimensional tight-binding ring.
///
/// Bond b couples internal sites b and b+1 (mod N). The physical site n = 0
/// (the defect) lives at internal index (N-1)/2; all public reporting uses
/// physical indices n in [-(N-1)/2, (N-1)/2].
class LatticeSpec {
public:
  /// Arbitrary hopping profile. Rates must be finite and non-negative; a
  /// vanishing rate is allowed only to express the zero-hopping limit.
  LatticeSpec(Eigen::VectorXd hoppings, double rho_over_kappa = 1.0);

  int n_sites() const { return static_cast<int>(hoppings_.size()); }
  const Eigen::VectorXd& hoppings() const { return hoppings_; }
  int defect_center() const { return (n_sites() - 1) / 2; }
  Boundary boundary() const { return Boundary::periodic; }

  /// Bulk hopping: the rate on the bond opposite the defect.
  double bulk_hopping() const;
  double rho_over_kappa() const { return rho_over_kappa_; }

  int to_index(int site) const { return site + defect_center(); }
  int to_site(int index) const { return index - defect_center(); }
  int min_site() const { return to_site(0); }
  int max_site() const { return to_site(n_sites() - 1); }

  /// Physical index of the bond joining sites n and n+1.
  double bond(int site) const;

  /// Real symmetric hopping matrix of the undriven ring.
  Eigen::MatrixXd hopping_matrix() const;

  bool operator==(const LatticeSpec& other) const = default;

private:
  Eigen::VectorXd hoppings_;
  double rho_over_kappa_ = 1.0;
};

/// Sinusoidal drive with Phi(tau) = gamma * sin(tau).
struct DriveSpec {
  double gamma = 0.0;
  double kappa_over_omega = 0.3;

  DriveSpec() = default;
  DriveSpec(double gamma, double kappa_over_omega);

  double phase(double tau) const { return gamma * std::sin(tau); }
  static constexpr double period() { return kPeriod; }
};

/// Site amplitudes c_n valid at normalized time `time`.
struct SiteAmplitudes {
  Eigen::VectorXcd values;
  double time = 0.0;

  Eigen::Index size() const { return values.size(); }
  double norm_squared() const { return values.squaredNorm(); }
  Eigen::VectorXd probabilities() const { return values.cwiseAbs2(); }
};

/// Defect ring: every bond carries kappa except the two bonds touching the
/// central site, which carry rho = rho_over_kappa * kappa.
LatticeSpec build_defect_lattice(int n_sites, double rho_over_kappa,
                                 double kappa_over_omega);

/// (sum |c|^2)^2 / sum |c|^4; 1 for a single site, N for a uniform state.
template <typename Derived>
double participation_ratio(const Eigen::MatrixBase<Derived>& amplitudes) {
  const auto p = amplitudes.cwiseAbs2().eval();
  const double sum = p.sum();
  if (!(sum > 0.0)) {
    throw std::invalid_argument("participation_ratio: zero-norm state");
  }
  return sum * sum / p.squaredNorm();
}

inline double participation_ratio(const SiteAmplitudes& state) {
  return participation_ratio(state.values);
}

struct StaticMode {
  double energy;
  SiteAmplitudes mode;
};

/// Eigenpairs of the undriven ring, ascending in energy.
std::vector<StaticMode> undriven_spectrum(const LatticeSpec& lattice);

} // namespace fbic
