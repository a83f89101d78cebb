#include "fbic/wavepacket.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fbic {

namespace {

double seam_probability(const LatticeSpec& lattice, const Eigen::VectorXd& occupation) {
  double total = 0.0;
  for (int i = 0; i < lattice.n_sites(); ++i) {
    if (std::abs(lattice.to_site(i)) > lattice.max_site() - kSeamWidth) {
      total += occupation[i];
    }
  }
  return total;
}

double mean_distance(const LatticeSpec& lattice, const Eigen::VectorXd& occupation,
                     int cut_site) {
  double total = 0.0;
  for (int i = 0; i < lattice.n_sites(); ++i) {
    total += std::abs(lattice.to_site(i) - cut_site) * occupation[i];
  }
  return total / occupation.sum();
}

} // namespace

double centroid(const LatticeSpec& lattice, const Eigen::VectorXd& occupation) {
  double total = 0.0;
  for (int i = 0; i < lattice.n_sites(); ++i) {
    total += lattice.to_site(i) * occupation[i];
  }
  return total / occupation.sum();
}

SiteAmplitudes gaussian_packet(const LatticeSpec& lattice, int n0, double w0, double p) {
  if (!(w0 > 0.0)) {
    throw std::invalid_argument("gaussian_packet: width must be positive");
  }
  const double reach = 4.0 * w0;
  const double limit = lattice.max_site() - kSeamWidth;
  if (n0 - reach < -limit || n0 + reach > limit) {
    std::ostringstream msg;
    msg << "gaussian_packet: support [" << n0 - reach << ", " << n0 + reach
        << "] overlaps the seam region beyond |n| = " << limit;
    throw std::invalid_argument(msg.str());
  }
  SiteAmplitudes out{Eigen::VectorXcd(lattice.n_sites()), 0.0};
  for (int i = 0; i < lattice.n_sites(); ++i) {
    const double n = lattice.to_site(i);
    const double envelope = std::exp(-(n - n0) * (n - n0) / (w0 * w0));
    out.values[i] = envelope * std::polar(1.0, -p * n);
  }
  out.values.normalize();
  return out;
}

PacketRun evolve_packet(const LatticeSpec& lattice, const DriveSpec& drive,
                        const SiteAmplitudes& packet, const PacketOptions& options) {
  if (options.n_periods < 1 || options.snapshots_per_period < 1) {
    throw std::invalid_argument("evolve_packet: need at least one period and snapshot");
  }
  const int steps = options.steps_per_period > 0
                        ? options.steps_per_period
                        : default_steps_per_period(drive.kappa_over_omega);
  if (steps % options.snapshots_per_period != 0) {
    throw std::invalid_argument(
        "evolve_packet: snapshots_per_period must divide steps_per_period");
  }
  const CycleIntegrator integrator(lattice, drive, steps);
  const int stride = steps / options.snapshots_per_period;
  const double initial_norm = packet.norm_squared();

  PacketRun run;
  Eigen::MatrixXcd state = packet.values;
  auto record = [&](double time) {
    Eigen::VectorXd occupation = state.col(0).cwiseAbs2();
    run.max_norm_error =
        std::max(run.max_norm_error, std::abs(occupation.sum() - initial_norm));
    if (run.max_norm_error > kNormGate) {
      std::ostringstream msg;
      msg << "norm drift " << run.max_norm_error << " at t=" << time;
      throw GateError("norm", msg.str());
    }
    const double seam = seam_probability(lattice, occupation);
    if (seam > kSeamTolerance) {
      std::ostringstream msg;
      msg << "probability " << seam << " reached the seam region at t=" << time;
      throw GateError("wraparound", msg.str());
    }
    run.mean_distance.push_back(mean_distance(lattice, occupation, 0));
    run.snapshots.push_back(std::move(occupation));
    run.times.push_back(time);
  };

  record(0.0);
  const double start_distance = run.mean_distance.front();
  double closest = start_distance;
  for (int period = 0; period < options.n_periods; ++period) {
    for (int k = 0; k < options.snapshots_per_period; ++k) {
      integrator.advance(state, k * stride, stride);
      record(period * kPeriod + (k + 1) * stride * integrator.step_size());
    }
    const double distance = run.mean_distance.back();
    closest = std::min(closest, distance);
    if (options.stop_when_scattered && closest < start_distance - 1.0 &&
        distance > start_distance) {
      run.measure_time = (period + 1) * kPeriod;
      break;
    }
  }

  const double at = run.measure_time.value_or(run.times.back());
  const Scattering s = reflection_transmission(run, lattice, 0, at);
  run.r_coeff = s.r;
  run.t_coeff = s.t;
  run.leak = s.leak;
  return run;
}

Scattering reflection_transmission(const PacketRun& run, const LatticeSpec& lattice,
                                   int cut_site, double measure_time,
                                   int core_halfwidth) {
  if (run.snapshots.empty()) {
    throw std::invalid_argument("reflection_transmission: empty run");
  }
  std::size_t at = 0;
  for (std::size_t k = 1; k < run.times.size(); ++k) {
    if (std::abs(run.times[k] - measure_time) < std::abs(run.times[at] - measure_time)) {
      at = k;
    }
  }
  const Eigen::VectorXd& occupation = run.snapshots[at];
  const double total = occupation.sum();
  Scattering out;
  for (int i = 0; i < lattice.n_sites(); ++i) {
    const int n = lattice.to_site(i);
    if (n < cut_site - core_halfwidth) {
      out.r += occupation[i];
    } else if (n > cut_site + core_halfwidth) {
      out.t += occupation[i];
    }
  }
  out.r /= total;
  out.t /= total;
  out.leak = 1.0 - out.r - out.t;

  // The packet has interacted once its distance from the cut has started to
  // grow again.
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < at; ++k) {
    closest = std::min(closest, mean_distance(lattice, run.snapshots[k], cut_site));
  }
  out.before_interaction =
      !(mean_distance(lattice, occupation, cut_site) > closest + 1e-9);
  return out;
}

} // namespace fbic
