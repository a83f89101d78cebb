#include "fbic/lattice.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace fbic {

LatticeSpec::LatticeSpec(Eigen::VectorXd hoppings, double rho_over_kappa)
    : hoppings_(std::move(hoppings)), rho_over_kappa_(rho_over_kappa) {
  if (hoppings_.size() < 2) {
    throw std::invalid_argument("LatticeSpec: need at least two bonds");
  }
  for (Eigen::Index b = 0; b < hoppings_.size(); ++b) {
    if (!std::isfinite(hoppings_[b]) || hoppings_[b] < 0.0) {
      throw std::invalid_argument("LatticeSpec: bond " + std::to_string(b) +
                                  " has invalid rate " +
                                  std::to_string(hoppings_[b]));
    }
  }
}

double LatticeSpec::bulk_hopping() const {
  // Bond furthest from the defect: between max_site and the seam.
  return hoppings_[n_sites() - 1];
}

double LatticeSpec::bond(int site) const {
  const int n = n_sites();
  const int index = ((to_index(site) % n) + n) % n;
  return hoppings_[index];
}

Eigen::MatrixXd LatticeSpec::hopping_matrix() const {
  const int n = n_sites();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    const int next = (b + 1) % n;
    h(b, next) += hoppings_[b];
    h(next, b) += hoppings_[b];
  }
  return h;
}

DriveSpec::DriveSpec(double gamma_, double kappa_over_omega_)
    : gamma(gamma_), kappa_over_omega(kappa_over_omega_) {
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument("DriveSpec: gamma must be >= 0");
  }
  if (!std::isfinite(kappa_over_omega) || kappa_over_omega <= 0.0) {
    throw std::invalid_argument("DriveSpec: kappa_over_omega must be > 0");
  }
}

LatticeSpec build_defect_lattice(int n_sites, double rho_over_kappa,
                                 double kappa_over_omega) {
  if (n_sites < 5 || n_sites % 2 == 0) {
    throw std::invalid_argument(
        "build_defect_lattice: n_sites must be odd and >= 5");
  }
  if (!(rho_over_kappa > 0.0) || !(kappa_over_omega > 0.0) ||
      !std::isfinite(kappa_over_omega)) {
    throw std::invalid_argument(
        "build_defect_lattice: ratios must be positive");
  }
  if (rho_over_kappa > 1.0) {
    throw std::invalid_argument(
        "build_defect_lattice: rho_over_kappa > 1 is not supported");
  }
  Eigen::VectorXd bonds = Eigen::VectorXd::Constant(n_sites, kappa_over_omega);
  const int center = (n_sites - 1) / 2;
  const double rho = rho_over_kappa * kappa_over_omega;
  bonds[center - 1] = rho; // bond -1 : sites -1 <-> 0
  bonds[center] = rho;     // bond  0 : sites  0 <-> 1
  return LatticeSpec(std::move(bonds), rho_over_kappa);
}

std::vector<StaticMode> undriven_spectrum(const LatticeSpec& lattice) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lattice.hopping_matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("undriven_spectrum: eigensolver failed");
  }
  std::vector<StaticMode> out;
  out.reserve(lattice.n_sites());
  for (int k = 0; k < lattice.n_sites(); ++k) {
    SiteAmplitudes mode{solver.eigenvectors().col(k).cast<Complex>(), 0.0};
    out.push_back({solver.eigenvalues()[k], std::move(mode)});
  }
  return out;
}

} // namespace fbic
