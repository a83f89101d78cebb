#include "fbic/io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace fbic {

using nlohmann::json;

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string checksum(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  return checksum(std::string(std::istreambuf_iterator<char>(in), {}));
}

json lattice_to_json(const LatticeSpec& lattice) {
  json doc;
  doc["n_sites"] = lattice.n_sites();
  doc["rho_over_kappa"] = lattice.rho_over_kappa();
  doc["kappa_over_omega"] = lattice.bulk_hopping();
  const bool is_defect_ring =
      lattice.n_sites() >= 5 && lattice.n_sites() % 2 == 1 &&
      lattice.rho_over_kappa() > 0.0 && lattice.rho_over_kappa() <= 1.0 &&
      lattice == build_defect_lattice(lattice.n_sites(), lattice.rho_over_kappa(),
                                      lattice.bulk_hopping());
  if (!is_defect_ring) {
    doc["hoppings"] = std::vector<double>(lattice.hoppings().begin(),
                                          lattice.hoppings().end());
  }
  return doc;
}

LatticeSpec lattice_from_json(const json& doc) {
  if (doc.contains("hoppings")) {
    const auto bonds = doc.at("hoppings").get<std::vector<double>>();
    return LatticeSpec(Eigen::Map<const Eigen::VectorXd>(bonds.data(), bonds.size()),
                       doc.value("rho_over_kappa", 1.0));
  }
  return build_defect_lattice(doc.at("n_sites").get<int>(),
                              doc.at("rho_over_kappa").get<double>(),
                              doc.at("kappa_over_omega").get<double>());
}

json drive_to_json(const DriveSpec& drive) {
  return {{"gamma", drive.gamma}, {"kappa_over_omega", drive.kappa_over_omega}};
}

DriveSpec drive_from_json(const json& doc) {
  return DriveSpec(doc.at("gamma").get<double>(), doc.at("kappa_over_omega").get<double>());
}

void write_spectrum_csv(std::ostream& out, const FloquetSpectrum& spectrum) {
  out << "mode_index,quasienergy,R_at_0,residual\n";
  for (int k = 0; k < spectrum.size(); ++k) {
    out << k << ',' << format_real(spectrum.quasienergies[k]) << ','
        << format_real(spectrum.participation[k]) << ','
        << format_real(spectrum.residuals[k]) << '\n';
  }
}

void write_modes_csv(std::ostream& out, const FloquetSpectrum& spectrum,
                     const LatticeSpec& lattice) {
  out << "mode_index,site_index,re,im\n";
  for (int k = 0; k < spectrum.size(); ++k) {
    for (int i = 0; i < lattice.n_sites(); ++i) {
      const Complex c = spectrum.modes(i, k);
      out << k << ',' << lattice.to_site(i) << ',' << format_real(c.real()) << ','
          << format_real(c.imag()) << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const GammaScan& scan) {
  out << "gamma,mode_index,quasienergy,R0,D,label\n";
  for (const auto& point : scan.points) {
    for (const auto& r : point.reports) {
      out << format_real(point.gamma) << ',' << r.mode_index << ','
          << format_real(r.quasienergy) << ',' << format_real(r.r0) << ','
          << format_real(r.d) << ',' << to_string(r.label) << '\n';
    }
  }
}

void write_reports_csv(std::ostream& out, const std::vector<ModeReport>& reports) {
  out << "mode_index,quasienergy,R0,h1,h2,D,label\n";
  for (const auto& r : reports) {
    out << r.mode_index << ',' << format_real(r.quasienergy) << ','
        << format_real(r.r0) << ',' << format_real(r.h1) << ',' << format_real(r.h2)
        << ',' << format_real(r.d) << ',' << to_string(r.label) << '\n';
  }
}

void write_effective_csv(std::ostream& out, const std::vector<EffectiveLattice>& rows) {
  out << "gamma,Q,kappa_e,alpha,beta\n";
  for (const auto& row : rows) {
    out << format_real(row.gamma) << ',' << format_real(row.q_value) << ','
        << format_real(row.kappa_e) << ',' << format_real(row.alpha) << ','
        << format_real(row.beta) << '\n';
  }
}

void write_packet_csv(std::ostream& out, const PacketRun& run, const LatticeSpec& lattice) {
  out << "time,site,probability\n";
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const std::string time = format_real(run.times[k]);
    for (int i = 0; i < lattice.n_sites(); ++i) {
      out << time << ',' << lattice.to_site(i) << ','
          << format_real(run.snapshots[k][i]) << '\n';
    }
  }
}

void write_cycle_csv(std::ostream& out, int mode_index,
                     const std::vector<CycleSample>& samples, const LatticeSpec& lattice) {
  out << "mode_index,time,site,probability,R\n";
  for (const auto& s : samples) {
    const std::string time = format_real(s.time);
    const std::string r = format_real(s.participation);
    for (int i = 0; i < lattice.n_sites(); ++i) {
      out << mode_index << ',' << time << ',' << lattice.to_site(i) << ','
          << format_real(s.occupation[i]) << ',' << r << '\n';
    }
  }
}

json candidates_to_json(const GammaScan& scan) {
  json list = json::array();
  for (const auto& c : scan.candidates) {
    list.push_back({{"kappa_over_omega", scan.kappa_over_omega},
                    {"gamma_star", c.gamma_grid},
                    {"gamma_lo", c.gamma_lo},
                    {"gamma_hi", c.gamma_hi},
                    {"D", c.d}});
  }
  return list;
}

namespace {

json report_to_json(const ModeReport& r) {
  return {{"mode_index", r.mode_index}, {"quasienergy", r.quasienergy},
          {"R0", r.r0},                 {"h1", r.h1},
          {"h2", r.h2},                 {"D", r.d},
          {"label", std::string(to_string(r.label))}};
}

} // namespace

json bic_search_to_json(const BicSearch& search) {
  const double k = search.scan.kappa_over_omega;
  json bics = json::array();
  for (const auto& b : search.bics) {
    json modes = json::array();
    for (const auto& m : b.bic_modes) {
      modes.push_back(report_to_json(m));
    }
    bics.push_back({{"kappa_over_omega", k},
                    {"gamma_star", b.gamma_star},
                    {"quasienergy", b.report.quasienergy},
                    {"D", b.report.d},
                    {"modes", modes}});
  }
  json refined = json::array();
  for (std::size_t i = 0; i < search.refined.size(); ++i) {
    const auto& r = search.refined[i];
    refined.push_back({{"gamma_lo", search.scan.candidates[i].gamma_lo},
                       {"gamma_hi", search.scan.candidates[i].gamma_hi},
                       {"gamma_star", r.gamma_star},
                       {"D", r.report.d},
                       {"quasienergy", r.report.quasienergy},
                       {"is_bic", r.is_bic},
                       {"evaluations", r.evaluations}});
  }
  return {{"kappa_over_omega", k},
          {"bics", bics},
          {"distinct_gamma_count", search.distinct_gamma_count()},
          {"mode_count", search.mode_count()},
          {"candidates", candidates_to_json(search.scan)},
          {"refinements", refined}};
}

json roots_to_json(const SdtRoots& roots) {
  json doc;
  doc["gamma1"] = roots.gamma1 ? json(*roots.gamma1) : json(nullptr);
  doc["gamma2"] = roots.gamma2 ? json(*roots.gamma2) : json(nullptr);
  if (!roots.diagnostics.empty()) {
    doc["diagnostics"] = roots.diagnostics;
  }
  return doc;
}

json packet_to_json(const PacketRun& run) {
  return {{"r", run.r_coeff},
          {"t", run.t_coeff},
          {"leak", run.leak},
          {"measure_time", run.measure_time ? json(*run.measure_time) : json(nullptr)},
          {"final_time", run.times.back()},
          {"max_norm_error", run.max_norm_error}};
}

} // namespace fbic
