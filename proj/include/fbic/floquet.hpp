#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbic/lattice.hpp"

namespace fbic {

/// Raised when a numerical accuracy gate (norm, unitarity, eigen residual)
/// is violated. `gate()` names the failing check.
class GateError : public std::runtime_error {
public:
  GateError(std::string gate, const std::string& what)
      : std::runtime_error(gate + ": " + what), gate_(std::move(gate)) {}
  const std::string& gate() const { return gate_; }

private:
  std::string gate_;
};

inline constexpr double kNormGate = 1e-8;
inline constexpr double kUnitarityGate = 1e-8;

/// 4096 * max(1, ceil(kappa/omega)) fixed RK4 steps per period.
int default_steps_per_period(double kappa_over_omega);

/// Fold a quasienergy (units of omega) into (-1/2, 1/2].
double fold_quasienergy(double epsilon);

/// Advance a block of states (one column per state) through the
/// gauge-transformed equations of motion
///   i dc_n/dt = k_n c_{n+1} e^{i Phi} + k_{n-1} c_{n-1} e^{-i Phi}
/// with classical fixed-step RK4 on a periodic ring.
class CycleIntegrator {
public:
  CycleIntegrator(const LatticeSpec& lattice, const DriveSpec& drive,
                  int steps_per_period);

  double step_size() const { return dt_; }
  int steps_per_period() const { return steps_; }

  /// Advance `block` by `n_steps` steps, starting at step index `first_step`.
  void advance(Eigen::MatrixXcd& block, int first_step, int n_steps) const;

private:
  void apply_hamiltonian(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out,
                         double tau) const;

  Eigen::VectorXd forward_;  // k_n, multiplies c_{n+1}
  Eigen::VectorXd backward_; // k_{n-1}, multiplies c_{n-1}
  DriveSpec drive_;
  int steps_;
  double dt_;
};

/// Trajectory of `initial` over one period, sampled at `samples` + 1 uniform
/// times including tau = 0 and tau = T. `steps_per_period` must be a
/// multiple of `samples`.
std::vector<SiteAmplitudes> integrate_cycle(const LatticeSpec& lattice,
                                            const DriveSpec& drive,
                                            const SiteAmplitudes& initial,
                                            int steps_per_period,
                                            int samples = 1);

struct Propagator {
  Eigen::MatrixXcd matrix; ///< S(n, m) = c_n(T) for c(0) = e_m
  double unitarity_residual = 0.0; ///< max |S^dagger S - I|
};

/// One-period propagator. Columns are integrated independently on `jobs`
/// worker threads; the result does not depend on `jobs`.
Propagator build_propagator(const LatticeSpec& lattice, const DriveSpec& drive,
                            int steps_per_period, int jobs = 1);

struct FloquetSpectrum {
  Eigen::VectorXd quasienergies; ///< ascending, in (-1/2, 1/2]
  Eigen::MatrixXcd modes;        ///< unit-norm Floquet modes at tau = 0, one per column
  Eigen::VectorXd residuals;     ///< |S v - lambda v| per mode
  Eigen::VectorXd participation; ///< R(0) per mode

  int size() const { return static_cast<int>(quasienergies.size()); }
  SiteAmplitudes mode(int k) const { return {modes.col(k), 0.0}; }
};

inline constexpr double kDegeneracyWindow = 1e-7;
inline constexpr double kTieWindow = 1e-9;

/// Quasienergies eps = -arg(lambda)/T and Floquet modes from the Schur form
/// of S. Nearly degenerate modes (|d eps| < 1e-7) are rotated within their
/// subspace to maximize sum |c|^4.
FloquetSpectrum floquet_decompose(const Propagator& prop);

struct CycleSample {
  double time;
  Eigen::VectorXd occupation;
  double participation;
};

/// Occupation map and R(tau) of a Floquet mode over one period.
/// Throws GateError("periodicity") when |u(T)|^2 differs from |u(0)|^2 by
/// more than 1e-4.
std::vector<CycleSample> sample_mode_cycle(const LatticeSpec& lattice,
                                           const DriveSpec& drive,
                                           const SiteAmplitudes& mode,
                                           int samples, int steps_per_period);

/// 2 kappa J0(gamma) cos p, before folding.
double homogeneous_dispersion(double p, double gamma, double kappa_over_omega);

/// Theta(p, tau) = Phi(tau) + 2 kappa int_0^tau cos(p - Phi(t)) dt.
double scattered_state_phase(double p, const DriveSpec& drive, double tau);

} // namespace fbic
