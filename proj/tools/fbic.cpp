// fbic: Floquet spectra, BIC search and wave-packet runs for the driven
// defect ring. See README.md for the command reference.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "run_config.hpp"

namespace {

using fbic::cli::Command;
using fbic::cli::RunConfig;

// Values given on the command line; unset ones fall back to the config file
// and then to the built-in defaults.
struct Overrides {
  std::optional<int> n_sites;
  std::optional<double> rho_over_kappa;
  std::optional<double> kappa_over_omega;
  std::optional<double> gamma;
  std::optional<double> gamma_lo;
  std::optional<double> gamma_hi;
  std::optional<int> gamma_points;
  std::optional<int> steps_per_period;
  std::optional<int> truncation;
  std::optional<int> tail_margin;
  std::optional<double> target_d;
  std::optional<double> candidate_threshold;
  std::optional<int> packet_n0;
  std::optional<double> packet_w0;
  std::optional<double> packet_momentum;
  std::optional<int> packet_periods;
  std::optional<int> snapshots_per_period;
  std::optional<bool> stop_when_scattered;
  std::optional<int> cycle_mode;
  std::optional<int> cycle_samples;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::string> config_file;

  void apply(RunConfig& c) const {
    auto set = [](auto& field, const auto& value) {
      if (value) {
        field = *value;
      }
    };
    set(c.n_sites, n_sites);
    set(c.rho_over_kappa, rho_over_kappa);
    set(c.kappa_over_omega, kappa_over_omega);
    set(c.gamma, gamma);
    set(c.gamma_lo, gamma_lo);
    set(c.gamma_hi, gamma_hi);
    set(c.gamma_points, gamma_points);
    set(c.steps_per_period, steps_per_period);
    set(c.truncation, truncation);
    set(c.tail_margin, tail_margin);
    set(c.target_d, target_d);
    set(c.candidate_threshold, candidate_threshold);
    set(c.packet_n0, packet_n0);
    set(c.packet_w0, packet_w0);
    set(c.packet_momentum, packet_momentum);
    set(c.packet_periods, packet_periods);
    set(c.snapshots_per_period, snapshots_per_period);
    set(c.stop_when_scattered, stop_when_scattered);
    set(c.cycle_mode, cycle_mode);
    set(c.cycle_samples, cycle_samples);
    set(c.out_dir, out_dir);
    set(c.jobs, jobs);
  }
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_file,
                 "JSON run config or manifest; flags override its values");
  app.add_option("--n-sites", o.n_sites, "ring size N, odd (default 201)");
  app.add_option("--rho-over-kappa", o.rho_over_kappa, "defect bond ratio (default 0.7)");
  app.add_option("--kappa-over-omega", o.kappa_over_omega, "hopping over frequency (default 0.3)");
  app.add_option("--steps-per-period", o.steps_per_period, "RK4 steps per period, 0 = automatic");
  app.add_option("--tail-margin", o.tail_margin, "tail region |n| >= this (default 50)");
  app.add_option("--target-d", o.target_d, "BIC threshold on D (default 1e-6)");
  app.add_option("--out-dir", o.out_dir, "output directory (default .)");
  app.add_option("-j,--jobs", o.jobs, "worker threads (default 1)");
}

void add_gamma(CLI::App& app, Overrides& o) {
  app.add_option("--gamma", o.gamma, "drive amplitude (default 2.38)");
}

void add_gamma_range(CLI::App& app, Overrides& o) {
  app.add_option("--gamma-lo", o.gamma_lo, "range start (default 2.0)");
  app.add_option("--gamma-hi", o.gamma_hi, "range end (default 2.8)");
  app.add_option("--gamma-points", o.gamma_points, "grid points (default 81)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet bound states in the continuum of an ac-driven defect lattice"};
  app.set_version_flag("--version", std::string(FBIC_VERSION));
  app.require_subcommand(1);
  Overrides o;

  auto* spectrum = app.add_subcommand("spectrum", "quasienergies, modes and labels at one gamma");
  add_common(*spectrum, o);
  add_gamma(*spectrum, o);
  spectrum->add_option("--cycle-mode", o.cycle_mode, "also write the cycle map of this mode");
  spectrum->add_option("--cycle-samples", o.cycle_samples, "samples per period (default 64)");

  auto* classify = app.add_subcommand("classify", "mode labels and label counts at one gamma");
  add_common(*classify, o);
  add_gamma(*classify, o);

  auto* scan = app.add_subcommand("scan", "spectrum and labels over a gamma grid");
  add_common(*scan, o);
  add_gamma_range(*scan, o);
  scan->add_option("--candidate-threshold", o.candidate_threshold,
                   "bracket grid minima of D below this (default 1e-2)");

  auto* search = app.add_subcommand("bic-search", "scan, then refine each candidate");
  add_common(*search, o);
  add_gamma_range(*search, o);
  search->add_option("--candidate-threshold", o.candidate_threshold,
                     "bracket grid minima of D below this (default 1e-2)");

  auto* effective = app.add_subcommand("effective", "effective hoppings and their zeros");
  add_common(*effective, o);
  add_gamma_range(*effective, o);
  effective->add_option("--truncation", o.truncation, "Bessel sum truncation (default 40)");

  auto* packet = app.add_subcommand("wavepacket", "Gaussian packet scattering off the defect");
  add_common(*packet, o);
  add_gamma(*packet, o);
  packet->add_option("--n0", o.packet_n0, "initial center (default -20)");
  packet->add_option("--w0", o.packet_w0, "initial width (default 4)");
  packet->add_option("--momentum", o.packet_momentum, "momentum p (default pi/2)");
  packet->add_option("--periods", o.packet_periods, "maximum periods (default 2000)");
  packet->add_option("--snapshots-per-period", o.snapshots_per_period, "default 1");
  packet->add_option("--stop-when-scattered", o.stop_when_scattered,
                     "stop once the packet has left the defect (default true)");

  auto* dispersion = app.add_subcommand("dispersion", "homogeneous ring against 2 kappa J0 cos p");
  add_common(*dispersion, o);
  add_gamma(*dispersion, o);

  CLI11_PARSE(app, argc, argv);

  RunConfig config;
  if (o.config_file) {
    std::ifstream in(*o.config_file);
    if (!in) {
      std::cerr << "invalid config: config: cannot read " << *o.config_file << '\n';
      return 2;
    }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const std::exception& e) {
      std::cerr << "invalid config: config: " << e.what() << '\n';
      return 2;
    }
    const auto errors = fbic::cli::apply_json(config, doc);
    for (const auto& e : errors) {
      std::cerr << "invalid config: " << e << '\n';
    }
    if (!errors.empty()) {
      return 2;
    }
  }
  o.apply(config);
  config.command = *fbic::cli::parse_command(app.get_subcommands().front()->get_name());
  return fbic::cli::run(config, std::cout, std::cerr).exit_code;
}
