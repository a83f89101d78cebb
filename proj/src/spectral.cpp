#include "fbic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fbic/effective.hpp"
#include "fbic/parallel.hpp"

namespace fbic {

std::string_view to_string(ModeLabel label) {
  switch (label) {
  case ModeLabel::scattered:
    return "scattered";
  case ModeLabel::boc:
    return "BOC";
  case ModeLabel::resonance:
    return "resonance";
  case ModeLabel::bic:
    return "BIC";
  }
  return "unknown";
}

double band_edge(const DriveSpec& drive, int n_sites) {
  const double half_width = 2.0 * drive.kappa_over_omega * std::abs(bessel_j(0, drive.gamma));
  // Spacing between the two outermost levels of a homogeneous ring.
  const double edge_spacing =
      half_width * (1.0 - std::cos(2.0 * std::numbers::pi / n_sites));
  return half_width + 2.0 * edge_spacing;
}

bool in_band(double quasienergy, const DriveSpec& drive, int n_sites) {
  const double edge = band_edge(drive, n_sites);
  if (edge >= 0.5) {
    return true;
  }
  const double eps = fold_quasienergy(quasienergy);
  return std::abs(eps) <= edge || std::abs(eps - 1.0) <= edge ||
         std::abs(eps + 1.0) <= edge;
}

double tail_slope(const Eigen::VectorXcd& amplitudes, const LatticeSpec& lattice,
                  int tail_margin, int window) {
  const int first = std::max(1, tail_margin - window);
  const int last = std::min(tail_margin - 1, lattice.max_site());
  if (last - first < 1) {
    return 0.0;
  }
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  int count = 0;
  for (int d = first; d <= last; ++d) {
    const double p = std::max(std::norm(amplitudes[lattice.to_index(d)]),
                              std::norm(amplitudes[lattice.to_index(-d)]));
    const double y = std::log(std::max(p, std::numeric_limits<double>::min()));
    sx += d;
    sy += y;
    sxx += static_cast<double>(d) * d;
    sxy += d * y;
    ++count;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

ModeReport classify_mode(const SiteAmplitudes& mode, double quasienergy,
                         const LatticeSpec& lattice, const DriveSpec& drive,
                         const ClassifyOptions& options) {
  if (options.tail_margin >= lattice.max_site()) {
    throw std::invalid_argument("classify_mode: tail_margin must be below (N-1)/2");
  }
  if (options.tail_margin <= kCoreSites) {
    throw std::invalid_argument("classify_mode: tail region overlaps the defect core");
  }
  const TailContrast tail = tail_contrast(mode.values, lattice, options.tail_margin);
  ModeReport report;
  report.quasienergy = quasienergy;
  report.r0 = participation_ratio(mode.values);
  report.h1 = tail.h1;
  report.h2 = tail.h2;
  report.d = tail.d;
  report.in_band = in_band(quasienergy, drive, lattice.n_sites());

  if (!report.in_band &&
      (report.d < options.bic_threshold ||
       tail_slope(mode.values, lattice, options.tail_margin, options.slope_window) <
           options.boc_slope)) {
    report.label = ModeLabel::boc;
  } else if (report.in_band && report.d < options.bic_threshold) {
    report.label = ModeLabel::bic;
  } else if (report.in_band && report.d < options.resonance_threshold) {
    report.label = ModeLabel::resonance;
  } else {
    report.label = ModeLabel::scattered;
  }
  return report;
}

ModeReport classify_mode(const FloquetSpectrum& spectrum, int mode_index,
                         const LatticeSpec& lattice, const DriveSpec& drive,
                         const ClassifyOptions& options) {
  ModeReport report = classify_mode(spectrum.mode(mode_index),
                                    spectrum.quasienergies[mode_index], lattice,
                                    drive, options);
  report.mode_index = mode_index;
  return report;
}

std::vector<ModeReport> classify_spectrum(const FloquetSpectrum& spectrum,
                                          const LatticeSpec& lattice,
                                          const DriveSpec& drive,
                                          const ClassifyOptions& options) {
  std::vector<ModeReport> out;
  out.reserve(spectrum.size());
  for (int k = 0; k < spectrum.size(); ++k) {
    out.push_back(classify_mode(spectrum, k, lattice, drive, options));
  }
  return out;
}

int count_boc(const std::vector<ModeReport>& reports) {
  return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const auto& r) {
    return r.label == ModeLabel::boc;
  }));
}

int count_boc(const FloquetSpectrum& spectrum, const DriveSpec& drive,
              const LatticeSpec& lattice, const ClassifyOptions& options) {
  return count_boc(classify_spectrum(spectrum, lattice, drive, options));
}

double min_inband_d(const std::vector<ModeReport>& reports) {
  double best = 1.0;
  for (const auto& r : reports) {
    if (r.in_band) {
      best = std::min(best, r.d);
    }
  }
  return best;
}

int chiral_partner(const std::vector<ModeReport>& reports, int index) {
  const double eps = reports[index].quasienergy;
  // The mode itself competes at distance 2|eps|, so modes near 0 or 1/2 pair
  // with themselves unless another level sits even closer to -eps.
  int best = index;
  double best_gap = std::abs(fold_quasienergy(2.0 * eps));
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const double gap = std::abs(fold_quasienergy(reports[k].quasienergy + eps));
    if (static_cast<int>(k) != index && gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double min_inband_pair_d(const std::vector<ModeReport>& reports) {
  double best = 1.0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (reports[k].in_band) {
      const int partner = chiral_partner(reports, static_cast<int>(k));
      best = std::min(best, std::max(reports[k].d, reports[partner].d));
    }
  }
  return best;
}

namespace {

struct Evaluation {
  ScanPoint point;
  FloquetSpectrum spectrum;
};

Evaluation evaluate(const LatticeSpec& lattice, double kappa_over_omega, double gamma,
                    const ScanOptions& options, int jobs) {
  const DriveSpec drive(gamma, kappa_over_omega);
  const int steps = options.steps_per_period > 0
                        ? options.steps_per_period
                        : default_steps_per_period(kappa_over_omega);
  Evaluation out;
  out.spectrum = floquet_decompose(build_propagator(lattice, drive, steps, jobs));
  out.point.gamma = gamma;
  out.point.quasienergies = out.spectrum.quasienergies;
  out.point.r0 = out.spectrum.participation;
  out.point.reports = classify_spectrum(out.spectrum, lattice, drive, options.classify);
  out.point.min_d = min_inband_d(out.point.reports);
  return out;
}

} // namespace

std::vector<BicCandidate> find_candidates(const std::vector<double>& gamma,
                                          const std::vector<double>& min_d,
                                          double threshold) {
  std::vector<BicCandidate> out;
  for (std::size_t i = 1; i + 1 < gamma.size(); ++i) {
    if (min_d[i] < threshold && min_d[i] < min_d[i - 1] && min_d[i] < min_d[i + 1]) {
      out.push_back({gamma[i - 1], gamma[i + 1], gamma[i], min_d[i]});
    }
  }
  return out;
}

GammaScan gamma_scan(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> gamma_range, int n_points,
                     const ScanOptions& options) {
  const auto [lo, hi] = gamma_range;
  if (!(lo < hi) || n_points < 2) {
    throw std::invalid_argument("gamma_scan: need lo < hi and at least two points");
  }
  GammaScan scan;
  scan.kappa_over_omega = kappa_over_omega;
  scan.gamma_grid.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    scan.gamma_grid[i] = lo + (hi - lo) * i / (n_points - 1);
  }
  scan.points.resize(n_points);
  parallel_for(n_points, options.jobs, [&](int i) {
    try {
      scan.points[i] =
          evaluate(lattice, kappa_over_omega, scan.gamma_grid[i], options, 1).point;
    } catch (const std::exception& e) {
      scan.points[i].gamma = scan.gamma_grid[i];
      scan.points[i].min_d = std::numeric_limits<double>::infinity();
      scan.points[i].error = e.what();
    }
  });
  std::vector<double> min_d(n_points);
  for (int i = 0; i < n_points; ++i) {
    min_d[i] = scan.points[i].min_d;
  }
  scan.candidates = find_candidates(scan.gamma_grid, min_d, options.candidate_threshold);
  return scan;
}

namespace {

// Golden-section search on the triplet a < x < b, keeping the best point seen.
BicResult refine_triplet(const LatticeSpec& lattice, double kappa_over_omega, double a,
                         double x, double b, double target_d, const ScanOptions& options) {
  constexpr double width_tol = 1e-7;
  const double shrink = (3.0 - std::sqrt(5.0)) / 2.0;

  BicResult best;
  double best_d = std::numeric_limits<double>::infinity();
  Evaluation best_eval;
  int evaluations = 0;
  auto objective = [&](double gamma) {
    Evaluation e = evaluate(lattice, kappa_over_omega, gamma, options, options.jobs);
    ++evaluations;
    const double d = min_inband_pair_d(e.point.reports);
    if (d < best_d) {
      best_d = d;
      best_eval = std::move(e);
    }
    return d;
  };

  double fx = objective(x);
  while (b - a >= width_tol && best_d >= target_d) {
    const bool right = b - x > x - a;
    const double u = right ? x + shrink * (b - x) : x - shrink * (x - a);
    const double fu = objective(u);
    if (fu < fx) {
      (right ? a : b) = x;
      x = u;
      fx = fu;
    } else {
      (right ? b : a) = u;
    }
  }

  const ScanPoint& point = best_eval.point;
  best.gamma_star = point.gamma;
  best.evaluations = evaluations;
  int arg = -1;
  for (std::size_t k = 0; k < point.reports.size(); ++k) {
    if (point.reports[k].in_band && (arg < 0 || point.reports[k].d < point.reports[arg].d)) {
      arg = static_cast<int>(k);
    }
    if (point.reports[k].label == ModeLabel::bic) {
      best.bic_modes.push_back(point.reports[k]);
    }
  }
  if (arg >= 0) {
    best.report = point.reports[arg];
    best.mode = best_eval.spectrum.mode(arg);
  }
  best.is_bic = arg >= 0 && best_d < target_d;
  if (arg >= 0 && !best.is_bic) {
    best.report.label = ModeLabel::resonance;
  }
  return best;
}

} // namespace

BicResult bic_refine(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> bracket, double target_d,
                     const ScanOptions& options) {
  const auto [a, b] = bracket;
  if (!(a < b)) {
    throw std::invalid_argument("bic_refine: empty bracket");
  }
  const double x = a + (3.0 - std::sqrt(5.0)) / 2.0 * (b - a);
  return refine_triplet(lattice, kappa_over_omega, a, x, b, target_d, options);
}

BicResult refine_candidate(const LatticeSpec& lattice, double kappa_over_omega,
                           const BicCandidate& candidate, double target_d,
                           const ScanOptions& options) {
  if (!(candidate.gamma_lo < candidate.gamma_grid && candidate.gamma_grid < candidate.gamma_hi)) {
    throw std::invalid_argument("refine_candidate: grid point outside its bracket");
  }
  return refine_triplet(lattice, kappa_over_omega, candidate.gamma_lo, candidate.gamma_grid,
                        candidate.gamma_hi, target_d, options);
}

int BicSearch::mode_count() const {
  int total = 0;
  for (const auto& b : bics) {
    total += static_cast<int>(b.bic_modes.size());
  }
  return total;
}

BicSearch bic_search(const LatticeSpec& lattice, double kappa_over_omega,
                     std::pair<double, double> gamma_range, int n_points,
                     double target_d, const ScanOptions& options) {
  BicSearch out;
  out.scan = gamma_scan(lattice, kappa_over_omega, gamma_range, n_points, options);
  for (const auto& candidate : out.scan.candidates) {
    BicResult refined = refine_candidate(lattice, kappa_over_omega, candidate, target_d, options);
    if (refined.is_bic) {
      const bool duplicate = std::any_of(out.bics.begin(), out.bics.end(), [&](const auto& b) {
        return std::abs(b.gamma_star - refined.gamma_star) < 1e-4;
      });
      if (!duplicate) {
        out.bics.push_back(refined);
      }
    }
    out.refined.push_back(std::move(refined));
  }
  return out;
}

} // namespace fbic
