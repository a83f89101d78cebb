#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fbic/floquet.hpp"
#include "fbic/lattice.hpp"

namespace fbic {

/// Sites within this distance of the seam (the site pair max_site | min_site)
/// are monitored for wrap-around contamination.
inline constexpr int kSeamWidth = 10;
inline constexpr double kSeamTolerance = 1e-4;
inline constexpr int kCoreHalfwidth = 5;

/// <n|psi> ~ exp(-(n - n0)^2 / w0^2 - i p n), unit norm, n physical.
/// The support |n - n0| <= 4 w0 must stay clear of the seam region.
SiteAmplitudes gaussian_packet(const LatticeSpec& lattice, int n0, double w0,
                               double p);

struct PacketOptions {
  int n_periods = 10;
  int snapshots_per_period = 1;
  int steps_per_period = 0; ///< 0: default_steps_per_period(kappa/omega)
  /// Stop at the first stroboscopic time at which the mean distance from the
  /// defect, <|n|>, exceeds its initial value after the packet has approached.
  bool stop_when_scattered = false;
};

struct Scattering {
  double r = 0.0;
  double t = 0.0;
  double leak = 0.0;
  /// Set when the packet had not yet turned away from the cut at measure_time.
  bool before_interaction = false;
};

struct PacketRun {
  std::vector<Eigen::VectorXd> snapshots; ///< |<n|psi(t)>|^2, internal order
  std::vector<double> times;
  std::vector<double> mean_distance; ///< <|n|> per snapshot
  std::optional<double> measure_time; ///< set when the stopping rule fired
  double r_coeff = 0.0;
  double t_coeff = 0.0;
  double leak = 0.0;
  double max_norm_error = 0.0;
};

/// Integrate the packet period by period through the driven ring. Throws
/// GateError("wraparound") naming the first contaminated time when more
/// than 1e-4 probability reaches the seam region. When the stopping rule
/// fires (or at the final time otherwise) the run's r/t/leak are filled in
/// with the cut at the defect.
PacketRun evolve_packet(const LatticeSpec& lattice, const DriveSpec& drive,
                        const SiteAmplitudes& packet, const PacketOptions& options);

/// r: probability at n < cut - core_halfwidth, t: at n > cut + core_halfwidth,
/// leak: the rest, from the snapshot closest to measure_time.
Scattering reflection_transmission(const PacketRun& run, const LatticeSpec& lattice,
                                   int cut_site, double measure_time,
                                   int core_halfwidth = kCoreHalfwidth);

/// Mean position sum n |c_n|^2 (physical indices) of an occupation map.
double centroid(const LatticeSpec& lattice, const Eigen::VectorXd& occupation);

} // namespace fbic
