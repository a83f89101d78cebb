#include "run_config.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "fbic/effective.hpp"
#include "fbic/floquet.hpp"
#include "fbic/io.hpp"
#include "fbic/lattice.hpp"
#include "fbic/spectral.hpp"
#include "fbic/wavepacket.hpp"

namespace fbic::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommands{{
    {Command::spectrum, "spectrum"},
    {Command::scan, "scan"},
    {Command::bic_search, "bic-search"},
    {Command::effective, "effective"},
    {Command::wavepacket, "wavepacket"},
    {Command::dispersion, "dispersion"},
    {Command::classify, "classify"},
}};

template <typename T>
std::string show(const T& value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

} // namespace

std::string_view to_string(Command command) {
  for (const auto& [c, name] : kCommands) {
    if (c == command) {
      return name;
    }
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [c, n] : kCommands) {
    if (n == name) {
      return c;
    }
  }
  return std::nullopt;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, std::string_view field, const std::string& message) {
    if (!ok) {
      errors.push_back(std::string(field) + ": " + message);
    }
  };
  auto finite = [](double x) { return std::isfinite(x); };

  check(c.n_sites >= 5 && c.n_sites % 2 == 1, "n_sites",
        "must be odd and >= 5 (got " + show(c.n_sites) + ")");
  check(finite(c.rho_over_kappa) && c.rho_over_kappa > 0.0 && c.rho_over_kappa <= 1.0,
        "rho_over_kappa", "must lie in (0, 1] (got " + show(c.rho_over_kappa) + ")");
  check(finite(c.kappa_over_omega) && c.kappa_over_omega > 0.0, "kappa_over_omega",
        "must be positive (got " + show(c.kappa_over_omega) + ")");
  check(finite(c.gamma) && c.gamma >= 0.0, "gamma",
        "must be finite and >= 0 (got " + show(c.gamma) + ")");
  check(finite(c.gamma_lo) && c.gamma_lo >= 0.0, "gamma_lo",
        "must be finite and >= 0 (got " + show(c.gamma_lo) + ")");
  check(finite(c.gamma_hi) && c.gamma_hi > c.gamma_lo, "gamma_hi",
        "must exceed gamma_lo (got " + show(c.gamma_hi) + ")");
  check(c.gamma_points >= 2, "gamma_points", "need at least 2 (got " + show(c.gamma_points) + ")");
  check(c.steps_per_period == 0 || c.steps_per_period >= 256, "steps_per_period",
        "must be 0 (automatic) or >= 256 (got " + show(c.steps_per_period) + ")");
  check(c.truncation >= 1 && c.truncation <= 200, "truncation",
        "must lie in [1, 200] (got " + show(c.truncation) + ")");
  check(c.tail_margin > kCoreSites && c.tail_margin < (c.n_sites - 1) / 2, "tail_margin",
        "must lie in (" + show(kCoreSites) + ", (n_sites-1)/2) (got " +
            show(c.tail_margin) + ")");
  check(finite(c.target_d) && c.target_d > 0.0 && c.target_d < 1.0, "target_d",
        "must lie in (0, 1) (got " + show(c.target_d) + ")");
  check(finite(c.candidate_threshold) && c.candidate_threshold > 0.0, "candidate_threshold",
        "must be positive (got " + show(c.candidate_threshold) + ")");
  check(finite(c.packet_w0) && c.packet_w0 > 0.0, "packet_w0",
        "must be positive (got " + show(c.packet_w0) + ")");
  check(finite(c.packet_momentum), "packet_momentum", "must be finite");
  check(c.packet_periods >= 1, "packet_periods", "need at least 1 (got " + show(c.packet_periods) + ")");
  check(c.snapshots_per_period >= 1, "snapshots_per_period",
        "need at least 1 (got " + show(c.snapshots_per_period) + ")");
  check(c.cycle_mode >= -1 && c.cycle_mode < c.n_sites, "cycle_mode",
        "must be -1 or a mode index below n_sites (got " + show(c.cycle_mode) + ")");
  check(c.cycle_samples >= 1, "cycle_samples", "need at least 1 (got " + show(c.cycle_samples) + ")");
  check(!c.out_dir.empty(), "out_dir", "must not be empty");
  check(c.jobs >= 1, "jobs", "need at least 1 (got " + show(c.jobs) + ")");
  return errors;
}

namespace {

// One accessor pair per serialized field, shared by to_json and apply_json.
struct Field {
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <typename T>
Field member(T RunConfig::*ptr) {
  return {[ptr](const RunConfig& c) { return json(c.*ptr); },
          [ptr](RunConfig& c, const json& v) { c.*ptr = v.get<T>(); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"command",
       {[](const RunConfig& c) { return json(std::string(to_string(c.command))); },
        [](RunConfig& c, const json& v) {
          const auto parsed = parse_command(v.get<std::string>());
          if (!parsed) {
            throw std::invalid_argument("unknown command '" + v.get<std::string>() + "'");
          }
          c.command = *parsed;
        }}},
      {"n_sites", member(&RunConfig::n_sites)},
      {"rho_over_kappa", member(&RunConfig::rho_over_kappa)},
      {"kappa_over_omega", member(&RunConfig::kappa_over_omega)},
      {"gamma", member(&RunConfig::gamma)},
      {"gamma_lo", member(&RunConfig::gamma_lo)},
      {"gamma_hi", member(&RunConfig::gamma_hi)},
      {"gamma_points", member(&RunConfig::gamma_points)},
      {"steps_per_period", member(&RunConfig::steps_per_period)},
      {"truncation", member(&RunConfig::truncation)},
      {"tail_margin", member(&RunConfig::tail_margin)},
      {"target_d", member(&RunConfig::target_d)},
      {"candidate_threshold", member(&RunConfig::candidate_threshold)},
      {"packet_n0", member(&RunConfig::packet_n0)},
      {"packet_w0", member(&RunConfig::packet_w0)},
      {"packet_momentum", member(&RunConfig::packet_momentum)},
      {"packet_periods", member(&RunConfig::packet_periods)},
      {"snapshots_per_period", member(&RunConfig::snapshots_per_period)},
      {"stop_when_scattered", member(&RunConfig::stop_when_scattered)},
      {"cycle_mode", member(&RunConfig::cycle_mode)},
      {"cycle_samples", member(&RunConfig::cycle_samples)},
      {"out_dir", member(&RunConfig::out_dir)},
      {"jobs", member(&RunConfig::jobs)},
  };
  return table;
}

bool type_matches(const json& target, const json& value) {
  if (target.is_boolean()) {
    return value.is_boolean();
  }
  if (target.is_number_integer()) {
    return value.is_number_integer();
  }
  if (target.is_number()) {
    return value.is_number();
  }
  return value.is_string();
}

} // namespace

json to_json(const RunConfig& config) {
  json doc = json::object();
  for (const auto& [name, field] : fields()) {
    doc[name] = field.get(config);
  }
  return doc;
}

std::vector<std::string> apply_json(RunConfig& config, const json& doc) {
  std::vector<std::string> errors;
  const json& body = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
  if (!body.is_object()) {
    return {"config: expected a JSON object"};
  }
  for (const auto& [key, value] : body.items()) {
    const auto it = fields().find(key);
    if (it == fields().end()) {
      errors.push_back(key + ": unknown field");
      continue;
    }
    const json current = it->second.get(config);
    if (!type_matches(current, value)) {
      errors.push_back(key + ": expected " + std::string(current.type_name()) + ", got " +
                       value.dump());
      continue;
    }
    try {
      it->second.set(config, value);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  }
  return errors;
}

namespace {

class Outputs {
public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  template <typename Writer>
  void csv(const std::string& name, Writer&& write) {
    std::ostringstream body;
    write(body);
    emit(name, body.str());
  }

  void json_file(const std::string& name, const json& doc) { emit(name, doc.dump(2) + "\n"); }

  const std::vector<std::filesystem::path>& files() const { return files_; }
  const json& checksums() const { return checksums_; }

private:
  void emit(const std::string& name, const std::string& bytes) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << bytes;
    files_.push_back(path);
    checksums_[name] = checksum(bytes);
  }

  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  json checksums_ = json::object();
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

ScanOptions scan_options(const RunConfig& c) {
  ScanOptions options;
  options.steps_per_period = c.steps_per_period;
  options.jobs = c.jobs;
  options.classify.tail_margin = c.tail_margin;
  options.classify.bic_threshold = c.target_d;
  options.candidate_threshold = c.candidate_threshold;
  return options;
}

int steps_for(const RunConfig& c) {
  return c.steps_per_period > 0 ? c.steps_per_period
                                : default_steps_per_period(c.kappa_over_omega);
}

LatticeSpec defect_lattice(const RunConfig& c) {
  return build_defect_lattice(c.n_sites, c.rho_over_kappa, c.kappa_over_omega);
}

json label_counts(const std::vector<ModeReport>& reports) {
  json counts = {{"scattered", 0}, {"BOC", 0}, {"resonance", 0}, {"BIC", 0}};
  for (const auto& r : reports) {
    counts[std::string(to_string(r.label))] = counts[std::string(to_string(r.label))].get<int>() + 1;
  }
  return counts;
}

void run_spectrum(const RunConfig& c, Outputs& out, bool full) {
  const LatticeSpec lattice = defect_lattice(c);
  const DriveSpec drive(c.gamma, c.kappa_over_omega);
  const int steps = steps_for(c);
  const FloquetSpectrum spectrum =
      floquet_decompose(build_propagator(lattice, drive, steps, c.jobs));
  ClassifyOptions options;
  options.tail_margin = c.tail_margin;
  options.bic_threshold = c.target_d;
  const auto reports = classify_spectrum(spectrum, lattice, drive, options);

  if (full) {
    out.csv("spectrum.csv", [&](std::ostream& s) { write_spectrum_csv(s, spectrum); });
    out.csv("modes.csv", [&](std::ostream& s) { write_modes_csv(s, spectrum, lattice); });
  }
  out.csv("reports.csv", [&](std::ostream& s) { write_reports_csv(s, reports); });
  if (!full) {
    json summary = {{"lattice", lattice_to_json(lattice)},
                    {"drive", drive_to_json(drive)},
                    {"counts", label_counts(reports)},
                    {"band_edge", band_edge(drive, lattice.n_sites())}};
    out.json_file("classify.json", summary);
  }
  if (full && c.cycle_mode >= 0) {
    if (steps % c.cycle_samples != 0) {
      throw std::invalid_argument("cycle_samples: must divide steps_per_period (" +
                                  std::to_string(steps) + ")");
    }
    const auto samples =
        sample_mode_cycle(lattice, drive, spectrum.mode(c.cycle_mode), c.cycle_samples, steps);
    out.csv("cycle.csv",
            [&](std::ostream& s) { write_cycle_csv(s, c.cycle_mode, samples, lattice); });
  }
}

json failed_points(const GammaScan& scan) {
  json failures = json::array();
  for (const auto& p : scan.points) {
    if (p.error) {
      failures.push_back({{"gamma", p.gamma}, {"error", *p.error}});
    }
  }
  return failures;
}

void run_scan(const RunConfig& c, Outputs& out) {
  const GammaScan scan = gamma_scan(defect_lattice(c), c.kappa_over_omega,
                                    {c.gamma_lo, c.gamma_hi}, c.gamma_points, scan_options(c));
  out.csv("scan.csv", [&](std::ostream& s) { write_scan_csv(s, scan); });
  out.json_file("bic.json", {{"kappa_over_omega", c.kappa_over_omega},
                             {"candidates", candidates_to_json(scan)},
                             {"failed_points", failed_points(scan)}});
}

void run_bic_search(const RunConfig& c, Outputs& out) {
  const BicSearch search = bic_search(defect_lattice(c), c.kappa_over_omega,
                                      {c.gamma_lo, c.gamma_hi}, c.gamma_points, c.target_d,
                                      scan_options(c));
  out.csv("scan.csv", [&](std::ostream& s) { write_scan_csv(s, search.scan); });
  json doc = bic_search_to_json(search);
  doc["failed_points"] = failed_points(search.scan);
  out.json_file("bic.json", doc);
}

void run_effective(const RunConfig& c, Outputs& out) {
  std::vector<EffectiveLattice> rows;
  for (int i = 0; i < c.gamma_points; ++i) {
    const double g = c.gamma_lo + (c.gamma_hi - c.gamma_lo) * i / (c.gamma_points - 1);
    rows.push_back(effective_hoppings(g, c.kappa_over_omega, c.rho_over_kappa, c.truncation));
  }
  out.csv("effective.csv", [&](std::ostream& s) { write_effective_csv(s, rows); });
  out.json_file("roots.json", roots_to_json(find_sdt_roots(c.kappa_over_omega, c.rho_over_kappa,
                                                           {c.gamma_lo, c.gamma_hi},
                                                           c.truncation)));
}

void run_wavepacket(const RunConfig& c, Outputs& out) {
  const LatticeSpec lattice = defect_lattice(c);
  const DriveSpec drive(c.gamma, c.kappa_over_omega);
  PacketOptions options;
  options.n_periods = c.packet_periods;
  options.snapshots_per_period = c.snapshots_per_period;
  options.steps_per_period = c.steps_per_period;
  options.stop_when_scattered = c.stop_when_scattered;
  const PacketRun run = evolve_packet(
      lattice, drive, gaussian_packet(lattice, c.packet_n0, c.packet_w0, c.packet_momentum),
      options);
  out.csv("packet.csv", [&](std::ostream& s) { write_packet_csv(s, run, lattice); });
  out.json_file("packet.json", packet_to_json(run));
}

void run_dispersion(const RunConfig& c, Outputs& out) {
  const LatticeSpec lattice = build_defect_lattice(c.n_sites, 1.0, c.kappa_over_omega);
  const DriveSpec drive(c.gamma, c.kappa_over_omega);
  const FloquetSpectrum spectrum =
      floquet_decompose(build_propagator(lattice, drive, steps_for(c), c.jobs));

  // Ring momenta p = 2 pi m / N, matched to the numerical levels by rank.
  const int n = lattice.n_sites();
  std::vector<std::pair<double, double>> analytic;
  for (int m = -(n - 1) / 2; m <= (n - 1) / 2; ++m) {
    const double p = 2.0 * std::numbers::pi * m / n;
    analytic.emplace_back(
        fold_quasienergy(homogeneous_dispersion(p, c.gamma, c.kappa_over_omega)), p);
  }
  std::sort(analytic.begin(), analytic.end());
  double max_error = 0.0;
  out.csv("dispersion.csv", [&](std::ostream& s) {
    s << "rank,momentum,quasienergy,analytic\n";
    for (int k = 0; k < n; ++k) {
      max_error = std::max(max_error, std::abs(spectrum.quasienergies[k] - analytic[k].first));
      s << k << ',' << format_real(analytic[k].second) << ','
        << format_real(spectrum.quasienergies[k]) << ',' << format_real(analytic[k].first)
        << '\n';
    }
  });
  out.json_file("dispersion.json",
                {{"max_error", max_error},
                 {"bandwidth", spectrum.quasienergies.maxCoeff() - spectrum.quasienergies.minCoeff()},
                 {"analytic_bandwidth", 4.0 * c.kappa_over_omega * std::abs(bessel_j(0, c.gamma))}});
}

} // namespace

RunResult run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  RunResult result;
  if (const auto problems = validate(config); !problems.empty()) {
    for (const auto& p : problems) {
      err << "invalid config: " << p << '\n';
    }
    result.exit_code = 2;
    return result;
  }
  try {
    Outputs out(config.out_dir);
    switch (config.command) {
    case Command::spectrum:
      run_spectrum(config, out, true);
      break;
    case Command::classify:
      run_spectrum(config, out, false);
      break;
    case Command::scan:
      run_scan(config, out);
      break;
    case Command::bic_search:
      run_bic_search(config, out);
      break;
    case Command::effective:
      run_effective(config, out);
      break;
    case Command::wavepacket:
      run_wavepacket(config, out);
      break;
    case Command::dispersion:
      run_dispersion(config, out);
      break;
    }
    const json manifest = {{"tool", "fbic"},
                           {"version", FBIC_VERSION},
                           {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                 std::to_string(EIGEN_MINOR_VERSION)},
                           {"command", std::string(to_string(config.command))},
                           {"config", to_json(config)},
                           {"checksums", out.checksums()},
                           {"timestamp", utc_timestamp()}};
    out.json_file("manifest.json", manifest);
    result.files = out.files();
    for (const auto& f : result.files) {
      log << f.string() << '\n';
    }
  } catch (const GateError& e) {
    err << "numerical gate '" << e.gate() << "' failed: " << e.what() << '\n';
    result.exit_code = 3;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    result.exit_code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = 1;
  }
  return result;
}

} // namespace fbic::cli
