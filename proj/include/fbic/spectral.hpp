#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fbic/floquet.hpp"
#include "fbic/lattice.hpp"

namespace fbic {

/// Sites |n| <= 2 carry the defect-modified bonds (alpha, beta) of the
/// effective lattice; the tail region must stay outside them.
inline constexpr int kCoreSites = 2;

enum class ModeLabel { scattered, boc, resonance, bic };

std::string_view to_string(ModeLabel label);

struct ClassifyOptions {
  int tail_margin = 50;             ///< tail region is |n| >= tail_margin
  double bic_threshold = 1e-6;      ///< D below this and in band: BIC
  double resonance_threshold = 0.1; ///< D below this and in band: resonance
  double boc_slope = -0.1;          ///< max fitted log-slope per site for a BOC tail
  int slope_window = 20;            ///< sites in the tail-slope fit
};

struct TailContrast {
  double h1 = 0.0; ///< max |c_n|^2 over all sites
  double h2 = 0.0; ///< max |c_n|^2 over |n| >= tail_margin
  double d = 0.0;  ///< h2 / h1
};

/// Tail-to-peak contrast of a state at tau = 0. Invariant under global phase
/// and scale.
template <typename Derived>
TailContrast tail_contrast(const Eigen::MatrixBase<Derived>& amplitudes,
                           const LatticeSpec& lattice, int tail_margin) {
  if (tail_margin < 1 || tail_margin > lattice.max_site()) {
    throw std::invalid_argument("tail_contrast: tail region outside the lattice");
  }
  TailContrast out;
  for (int i = 0; i < lattice.n_sites(); ++i) {
    const double p = std::norm(amplitudes[i]);
    out.h1 = std::max(out.h1, p);
    if (std::abs(lattice.to_site(i)) >= tail_margin) {
      out.h2 = std::max(out.h2, p);
    }
  }
  if (!(out.h1 > 0.0)) {
    throw std::invalid_argument("tail_contrast: zero state");
  }
  out.d = out.h2 / out.h1;
  return out;
}

/// Half-width of the scattered band, 2 kappa |J0(gamma)|, plus two band-edge
/// level spacings of the finite ring.
double band_edge(const DriveSpec& drive, int n_sites);

/// True when eps (mod 1) falls inside the folded scattered band.
bool in_band(double quasienergy, const DriveSpec& drive, int n_sites);

/// Least-squares slope of log max(|c_n|^2, |c_-n|^2) against |n| over the
/// `window` sites just inside the tail boundary.
double tail_slope(const Eigen::VectorXcd& amplitudes, const LatticeSpec& lattice,
                  int tail_margin, int window);

struct ModeReport {
  int mode_index = -1;
  double quasienergy = 0.0;
  double r0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double d = 0.0;
  bool in_band = false;
  ModeLabel label = ModeLabel::scattered;
};

/// Label rules, first match wins:
///   BOC        out of band and (tail slope < boc_slope or D < bic_threshold)
///   BIC        in band and D < bic_threshold
///   resonance  in band and D < resonance_threshold
///   scattered  otherwise
ModeReport classify_mode(const SiteAmplitudes& mode, double quasienergy,
                         const LatticeSpec& lattice, const DriveSpec& drive,
                         const ClassifyOptions& options = {});

ModeReport classify_mode(const FloquetSpectrum& spectrum, int mode_index,
                         const LatticeSpec& lattice, const DriveSpec& drive,
                         const ClassifyOptions& options = {});

std::vector<ModeReport> classify_spectrum(const FloquetSpectrum& spectrum,
                                          const LatticeSpec& lattice,
                                          const DriveSpec& drive,
                                          const ClassifyOptions& options = {});

int count_boc(const std::vector<ModeReport>& reports);
int count_boc(const FloquetSpectrum& spectrum, const DriveSpec& drive,
              const LatticeSpec& lattice, const ClassifyOptions& options = {});

/// Smallest D among in-band modes, or 1 when no mode is in band.
double min_inband_d(const std::vector<ModeReport>& reports);

/// Index of the mode whose quasienergy lies closest to -eps (mod 1). The mode
/// itself is a candidate, so a level near 0 or 1/2 is usually its own partner.
int chiral_partner(const std::vector<ModeReport>& reports, int index);

/// Smallest over in-band modes of max(D_m, D_partner). A BIC away from
/// eps = 0 comes as a +-eps doublet and both members must be bound.
double min_inband_pair_d(const std::vector<ModeReport>& reports);

struct ScanOptions {
  int steps_per_period = 0; ///< 0: default_steps_per_period(kappa/omega)
  int jobs = 1;
  ClassifyOptions classify;
  double candidate_threshold = 1e-2; ///< grid local minima of min-in-band D below this
};

struct ScanPoint {
  double gamma = 0.0;
  Eigen::VectorXd quasienergies;
  Eigen::VectorXd r0;
  std::vector<ModeReport> reports;
  double min_d = 1.0;
  std::optional<std::string> error;
};

struct BicCandidate {
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  double gamma_grid = 0.0; ///< grid point of the local minimum
  double d = 0.0;
};

struct GammaScan {
  double kappa_over_omega = 0.0;
  std::vector<double> gamma_grid;
  std::vector<ScanPoint> points;
  std::vector<BicCandidate> candidates;
};

/// Evaluate the spectrum and labels on a uniform gamma grid (parallel over
/// grid points) and bracket every interior local minimum of min-in-band D
/// that lies below options.candidate_threshold. Failures are recorded per
/// point; the scan continues.
GammaScan gamma_scan(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> gamma_range, int n_points,
                     const ScanOptions& options = {});

/// Candidate brackets from precomputed (gamma, min D) samples.
std::vector<BicCandidate> find_candidates(const std::vector<double>& gamma,
                                          const std::vector<double>& min_d,
                                          double threshold);

struct BicResult {
  double gamma_star = 0.0;
  ModeReport report;         ///< minimizing mode (label BIC or resonance)
  SiteAmplitudes mode;       ///< its amplitudes at tau = 0
  std::vector<ModeReport> bic_modes; ///< every BIC-labelled mode at gamma_star
  int evaluations = 0;
  bool is_bic = false;
};

/// Golden-section minimization of min_inband_pair_d over the bracket until
/// the bracket is narrower than 1e-7 or it drops below target_d.
BicResult bic_refine(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> bracket, double target_d = 1e-6,
                     const ScanOptions& options = {});

/// bic_refine started from the candidate's grid minimum. A grid point that already
/// meets target_d is accepted as is, and the search shrinks towards the grid
/// minimum rather than a second dip elsewhere in the bracket.
BicResult refine_candidate(const LatticeSpec& lattice, double kappa_over_omega,
                           const BicCandidate& candidate, double target_d = 1e-6,
                           const ScanOptions& options = {});

struct BicSearch {
  GammaScan scan;
  std::vector<BicResult> refined; ///< one per candidate bracket
  /// Confirmed BICs; distinct gamma values.
  std::vector<BicResult> bics;
  int distinct_gamma_count() const { return static_cast<int>(bics.size()); }
  /// Total BIC-labelled modes summed over the confirmed gamma values.
  int mode_count() const;
};

BicSearch bic_search(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> gamma_range, int n_points,
                     double target_d = 1e-6, const ScanOptions& options = {});

} // namespace fbic
