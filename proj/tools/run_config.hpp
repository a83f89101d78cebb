#pragma once

#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fbic::cli {

enum class Command { spectrum, scan, bic_search, effective, wavepacket, dispersion, classify };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view name);

/// Every field has a default; a config holding only the command reproduces
/// the kappa/omega = 0.3 panel (N = 201, rho/kappa = 0.7, gamma in [2, 2.8]).
struct RunConfig {
  Command command = Command::scan;

  int n_sites = 201;
  double rho_over_kappa = 0.7;
  double kappa_over_omega = 0.3;

  double gamma = 2.38;
  double gamma_lo = 2.0;
  double gamma_hi = 2.8;
  int gamma_points = 81;

  int steps_per_period = 0; ///< 0 picks 4096 max(1, ceil(kappa/omega))
  int truncation = 40;
  int tail_margin = 50;
  double target_d = 1e-6;
  double candidate_threshold = 1e-2;

  int packet_n0 = -20;
  double packet_w0 = 4.0;
  double packet_momentum = std::numbers::pi / 2;
  int packet_periods = 2000;
  int snapshots_per_period = 1;
  bool stop_when_scattered = true;

  int cycle_mode = -1; ///< spectrum: also dump the cycle map of this mode
  int cycle_samples = 64;

  std::string out_dir = ".";
  int jobs = 1;
};

/// Field-level problems, one "field: message" line each. Empty when valid.
std::vector<std::string> validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

/// Overlay the keys present in `doc` onto `config`. A manifest (a document
/// with a "config" object) is unwrapped first. Unknown keys and type
/// mismatches are reported as field-level errors.
std::vector<std::string> apply_json(RunConfig& config, const nlohmann::json& doc);

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files; ///< emitted outputs, manifest last
};

/// Exit codes: 0 success, 1 unexpected error, 2 invalid config, 3 numerical
/// gate failure. Diagnostics go to `err`.
RunResult run(const RunConfig& config, std::ostream& log, std::ostream& err);

} // namespace fbic::cli
