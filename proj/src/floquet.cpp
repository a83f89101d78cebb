#include "fbic/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fbic/effective.hpp"
#include "fbic/localize.hpp"
#include "fbic/parallel.hpp"

namespace fbic {

namespace {

constexpr Complex kI{0.0, 1.0};

// Columns are integrated in fixed-width chunks so the arithmetic applied to
// each column is identical for every thread count.
constexpr int kColumnChunk = 16;

} // namespace

int default_steps_per_period(double kappa_over_omega) {
  return 4096 * std::max(1, static_cast<int>(std::ceil(kappa_over_omega)));
}

double fold_quasienergy(double epsilon) {
  double folded = epsilon - std::floor(epsilon);
  if (folded > 0.5) {
    folded -= 1.0;
  }
  return folded;
}

CycleIntegrator::CycleIntegrator(const LatticeSpec& lattice,
                                 const DriveSpec& drive, int steps_per_period)
    : drive_(drive), steps_(steps_per_period) {
  if (steps_per_period < 1) {
    throw std::invalid_argument("CycleIntegrator: steps_per_period must be positive");
  }
  const Eigen::VectorXd& k = lattice.hoppings();
  const Eigen::Index n = k.size();
  forward_ = k;
  backward_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    backward_[i] = k[(i + n - 1) % n];
  }
  dt_ = kPeriod / steps_;
}

void CycleIntegrator::apply_hamiltonian(const Eigen::MatrixXcd& in,
                                        Eigen::MatrixXcd& out,
                                        double tau) const {
  // out = -i H(tau) in
  const double phi = drive_.phase(tau);
  const Complex up = -kI * std::polar(1.0, phi);
  const Complex down = -kI * std::polar(1.0, -phi);
  const Eigen::VectorXcd fa = up * forward_.cast<Complex>();
  const Eigen::VectorXcd fb = down * backward_.cast<Complex>();
  const Eigen::Index n = in.rows();
  for (Eigen::Index j = 0; j < in.cols(); ++j) {
    auto c = in.col(j);
    auto o = out.col(j);
    o.segment(1, n - 2) = fa.segment(1, n - 2).cwiseProduct(c.segment(2, n - 2)) +
                          fb.segment(1, n - 2).cwiseProduct(c.segment(0, n - 2));
    o[0] = fa[0] * c[1] + fb[0] * c[n - 1];
    o[n - 1] = fa[n - 1] * c[0] + fb[n - 1] * c[n - 2];
  }
}

void CycleIntegrator::advance(Eigen::MatrixXcd& block, int first_step,
                              int n_steps) const {
  Eigen::MatrixXcd k(block.rows(), block.cols());
  Eigen::MatrixXcd stage(block.rows(), block.cols());
  Eigen::MatrixXcd acc(block.rows(), block.cols());
  const double h = dt_;
  for (int s = first_step; s < first_step + n_steps; ++s) {
    const double t0 = s * h;
    const double t_mid = (s + 0.5) * h;
    const double t1 = (s + 1) * h;

    apply_hamiltonian(block, k, t0);
    acc = block + (h / 6.0) * k;
    stage = block + (0.5 * h) * k;

    apply_hamiltonian(stage, k, t_mid);
    acc += (h / 3.0) * k;
    stage = block + (0.5 * h) * k;

    apply_hamiltonian(stage, k, t_mid);
    acc += (h / 3.0) * k;
    stage = block + h * k;

    apply_hamiltonian(stage, k, t1);
    block = acc + (h / 6.0) * k;
  }
}

std::vector<SiteAmplitudes> integrate_cycle(const LatticeSpec& lattice,
                                            const DriveSpec& drive,
                                            const SiteAmplitudes& initial,
                                            int steps_per_period, int samples) {
  if (initial.size() != lattice.n_sites()) {
    throw std::invalid_argument("integrate_cycle: state size does not match lattice");
  }
  if (std::abs(initial.norm_squared() - 1.0) > 1e-10) {
    throw std::invalid_argument("integrate_cycle: initial state must have unit norm");
  }
  if (steps_per_period < 256) {
    throw std::invalid_argument("integrate_cycle: steps_per_period must be >= 256");
  }
  if (samples < 1 || steps_per_period % samples != 0) {
    throw std::invalid_argument(
        "integrate_cycle: samples must divide steps_per_period");
  }
  const CycleIntegrator integrator(lattice, drive, steps_per_period);
  const int stride = steps_per_period / samples;

  std::vector<SiteAmplitudes> trajectory;
  trajectory.reserve(samples + 1);
  Eigen::MatrixXcd state = initial.values;
  trajectory.push_back({state.col(0), 0.0});
  for (int k = 0; k < samples; ++k) {
    integrator.advance(state, k * stride, stride);
    const double drift = std::abs(state.col(0).squaredNorm() - 1.0);
    if (drift > kNormGate) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " at tau=" << (k + 1) * stride * integrator.step_size()
          << " with step " << integrator.step_size()
          << "; increase steps_per_period";
      throw GateError("norm", msg.str());
    }
    trajectory.push_back({state.col(0), (k + 1) * stride * integrator.step_size()});
  }
  trajectory.back().time = kPeriod;
  return trajectory;
}

Propagator build_propagator(const LatticeSpec& lattice, const DriveSpec& drive,
                            int steps_per_period, int jobs) {
  if (steps_per_period < 256) {
    throw std::invalid_argument("build_propagator: steps_per_period must be >= 256");
  }
  const int n = lattice.n_sites();
  const CycleIntegrator integrator(lattice, drive, steps_per_period);
  Propagator prop;
  prop.matrix.resize(n, n);
  const int chunks = (n + kColumnChunk - 1) / kColumnChunk;
  parallel_for(chunks, jobs, [&](int chunk) {
    const int first = chunk * kColumnChunk;
    const int width = std::min(kColumnChunk, n - first);
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, kColumnChunk);
    for (int c = 0; c < width; ++c) {
      block(first + c, c) = 1.0;
    }
    integrator.advance(block, 0, steps_per_period);
    for (int c = 0; c < width; ++c) {
      const double drift = std::abs(block.col(c).squaredNorm() - 1.0);
      if (drift > kNormGate) {
        std::ostringstream msg;
        msg << "column " << first + c << ": norm drift " << drift << " with step "
            << integrator.step_size() << "; increase steps_per_period";
        throw GateError("norm", msg.str());
      }
    }
    prop.matrix.middleCols(first, width) = block.leftCols(width);
  });
  prop.unitarity_residual =
      (prop.matrix.adjoint() * prop.matrix - Eigen::MatrixXcd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  return prop;
}

namespace {

double quasienergy_of(Complex lambda) {
  return fold_quasienergy(-std::arg(lambda) / kPeriod);
}

// Rotate so the largest-magnitude component is real and positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index peak = 0;
  v.cwiseAbs2().maxCoeff(&peak);
  const double mag = std::abs(v[peak]);
  if (mag > 0.0) {
    v *= std::conj(v[peak]) / mag;
  }
}

// Consecutive runs (in sorted order) whose neighbours differ by < window.
std::vector<std::vector<int>> near_degenerate_groups(const std::vector<int>& order,
                                                     const Eigen::VectorXd& eps,
                                                     double window) {
  std::vector<std::vector<int>> groups;
  for (int idx : order) {
    if (!groups.empty() && eps[idx] - eps[groups.back().back()] < window) {
      groups.back().push_back(idx);
    } else {
      groups.push_back({idx});
    }
  }
  // Quasienergies near -1/2 and +1/2 are neighbours on the circle.
  if (groups.size() > 1 &&
      eps[groups.front().front()] + 1.0 - eps[groups.back().back()] < window) {
    groups.back().insert(groups.back().end(), groups.front().begin(),
                         groups.front().end());
    groups.erase(groups.begin());
  }
  return groups;
}

std::vector<int> ascending_order(const Eigen::VectorXd& eps) {
  std::vector<int> order(eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eps[a] < eps[b]; });
  return order;
}

} // namespace

FloquetSpectrum floquet_decompose(const Propagator& prop) {
  if (!(prop.unitarity_residual < kUnitarityGate)) {
    std::ostringstream msg;
    msg << "propagator unitarity residual " << prop.unitarity_residual
        << " exceeds " << kUnitarityGate;
    throw GateError("unitarity", msg.str());
  }
  const Eigen::MatrixXcd& s = prop.matrix;
  const Eigen::Index n = s.rows();

  // S is normal, so its Schur form is diagonal up to the integration error and
  // the Schur vectors form an orthonormal eigenbasis.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(s);
  if (schur.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Schur iteration did not converge; unitarity residual "
        << prop.unitarity_residual;
    throw GateError("eigensolver", msg.str());
  }
  Eigen::MatrixXcd vectors = schur.matrixU();
  Eigen::VectorXd eps(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = schur.matrixT()(k, k);
    if (std::abs(std::abs(lambda) - 1.0) > kUnitarityGate) {
      std::ostringstream msg;
      msg << "eigenvalue " << k << " has modulus " << std::abs(lambda);
      throw GateError("unit_circle", msg.str());
    }
    eps[k] = quasienergy_of(lambda);
  }

  // Unmix localized states from nearly degenerate continuum states.
  for (const auto& group : near_degenerate_groups(ascending_order(eps), eps,
                                                  kDegeneracyWindow)) {
    if (group.size() < 2) {
      continue;
    }
    Eigen::MatrixXcd block(n, static_cast<Eigen::Index>(group.size()));
    for (std::size_t c = 0; c < group.size(); ++c) {
      block.col(c) = vectors.col(group[c]);
    }
    maximize_localization(block);
    for (std::size_t c = 0; c < group.size(); ++c) {
      vectors.col(group[c]) = block.col(c);
      const Complex rayleigh = block.col(c).dot(s * block.col(c));
      eps[group[c]] = quasienergy_of(rayleigh);
    }
  }

  Eigen::VectorXd participation(n);
  Eigen::VectorXd residuals(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    vectors.col(k).normalize();
    fix_phase(vectors.col(k));
    participation[k] = participation_ratio(vectors.col(k));
    const Complex lambda = std::polar(1.0, -eps[k] * kPeriod);
    residuals[k] = (s * vectors.col(k) - lambda * vectors.col(k)).norm();
  }

  // Ascending quasienergy; within ties (< 1e-9) the more extended mode first.
  std::vector<int> order = ascending_order(eps);
  for (std::size_t first = 0; first < order.size();) {
    std::size_t last = first + 1;
    while (last < order.size() && eps[order[last]] - eps[order[last - 1]] < kTieWindow) {
      ++last;
    }
    std::stable_sort(order.begin() + first, order.begin() + last, [&](int a, int b) {
      return participation[a] > participation[b];
    });
    first = last;
  }

  FloquetSpectrum out;
  out.quasienergies.resize(n);
  out.modes.resize(n, n);
  out.residuals.resize(n);
  out.participation.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int src = order[k];
    out.quasienergies[k] = eps[src];
    out.modes.col(k) = vectors.col(src);
    out.residuals[k] = residuals[src];
    out.participation[k] = participation[src];
  }
  return out;
}

std::vector<CycleSample> sample_mode_cycle(const LatticeSpec& lattice,
                                           const DriveSpec& drive,
                                           const SiteAmplitudes& mode,
                                           int samples, int steps_per_period) {
  SiteAmplitudes start = mode;
  start.values.normalize();
  const auto trajectory =
      integrate_cycle(lattice, drive, start, steps_per_period, samples);
  std::vector<CycleSample> out;
  out.reserve(trajectory.size());
  for (const auto& state : trajectory) {
    out.push_back({state.time, state.probabilities(), participation_ratio(state)});
  }
  const double mismatch =
      (out.back().occupation - out.front().occupation).cwiseAbs().maxCoeff();
  if (mismatch > 1e-4) {
    std::ostringstream msg;
    msg << "occupation at tau=T differs from tau=0 by " << mismatch
        << "; mode does not belong to this propagator";
    throw GateError("periodicity", msg.str());
  }
  return out;
}

double homogeneous_dispersion(double p, double gamma, double kappa_over_omega) {
  return 2.0 * kappa_over_omega * bessel_j(0, gamma) * std::cos(p);
}

double scattered_state_phase(double p, const DriveSpec& drive, double tau) {
  // Composite 8-point Gauss-Legendre; panels of width <= 0.05.
  static constexpr double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                      0.7966664774136267, 0.9602898564975363};
  static constexpr double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};
  if (tau == 0.0) {
    return 0.0;
  }
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(tau) / 0.05)));
  const double width = tau / panels;
  double integral = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    double panel = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double dx = 0.5 * width * nodes[q];
      panel += weights[q] * (std::cos(p - drive.phase(mid - dx)) +
                             std::cos(p - drive.phase(mid + dx)));
    }
    integral += 0.5 * width * panel;
  }
  return drive.phase(tau) + 2.0 * drive.kappa_over_omega * integral;
}

} // namespace fbic
