#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "fbic/io.hpp"

using namespace fbic;

namespace {

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    n += c == '\n';
  }
  return n;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

} // namespace

TEST_CASE("real formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.404825557695773, 1e-300, 6.02214076e23}) {
    CHECK(std::strtod(format_real(x).c_str(), nullptr) == x);
  }
  CHECK(format_real(0.5) == "0.5");
}

TEST_CASE("FNV-1a digests") {
  CHECK(checksum("") == "cbf29ce484222325");
  CHECK(checksum("a") == "af63dc4c8601ec8c");
  CHECK(checksum("foobar") == "85944171f73967e8");
}

TEST_CASE("lattice and drive documents") {
  const LatticeSpec lattice = build_defect_lattice(201, 0.7, 0.3);
  const auto doc = lattice_to_json(lattice);
  CHECK(doc.at("n_sites") == 201);
  CHECK(doc.at("rho_over_kappa") == 0.7);
  CHECK(doc.at("kappa_over_omega") == 0.3);
  CHECK_FALSE(doc.contains("hoppings"));
  CHECK(lattice_from_json(doc) == lattice);

  const LatticeSpec custom(Eigen::VectorXd{{0.3, 0.1, 0.3, 0.2, 0.3}});
  const auto custom_doc = lattice_to_json(custom);
  CHECK(custom_doc.contains("hoppings"));
  CHECK(lattice_from_json(custom_doc) == custom);

  const DriveSpec drive(2.38, 0.3);
  const DriveSpec back = drive_from_json(drive_to_json(drive));
  CHECK(back.gamma == 2.38);
  CHECK(back.kappa_over_omega == 0.3);

  CHECK_THROWS(lattice_from_json(nlohmann::json{{"n_sites", 200},
                                                {"rho_over_kappa", 0.7},
                                                {"kappa_over_omega", 0.3}}));
}

TEST_CASE("CSV layouts") {
  const LatticeSpec lattice = build_defect_lattice(21, 0.7, 0.3);
  const DriveSpec drive(2.38, 0.3);
  const FloquetSpectrum spectrum = floquet_decompose(build_propagator(lattice, drive, 1024));

  std::ostringstream s;
  write_spectrum_csv(s, spectrum);
  CHECK(first_line(s.str()) == "mode_index,quasienergy,R_at_0,residual");
  CHECK(count_lines(s.str()) == 22);

  std::ostringstream m;
  write_modes_csv(m, spectrum, lattice);
  CHECK(first_line(m.str()) == "mode_index,site_index,re,im");
  CHECK(count_lines(m.str()) == 1 + 21 * 21);
  CHECK(m.str().find("\n0,-10,") != std::string::npos);

  ClassifyOptions options;
  options.tail_margin = 5;
  std::ostringstream r;
  write_reports_csv(r, classify_spectrum(spectrum, lattice, drive, options));
  CHECK(first_line(r.str()) == "mode_index,quasienergy,R0,h1,h2,D,label");
  CHECK(count_lines(r.str()) == 22);

  std::ostringstream e;
  write_effective_csv(e, {effective_hoppings(2.3, 0.3, 0.7), effective_hoppings(2.4, 0.3, 0.7)});
  CHECK(first_line(e.str()) == "gamma,Q,kappa_e,alpha,beta");
  CHECK(count_lines(e.str()) == 3);

  const auto samples = sample_mode_cycle(lattice, drive, spectrum.mode(3), 4, 1024);
  std::ostringstream c;
  write_cycle_csv(c, 3, samples, lattice);
  CHECK(first_line(c.str()) == "mode_index,time,site,probability,R");
  CHECK(count_lines(c.str()) == 1 + 5 * 21);
}

TEST_CASE("scan and search documents") {
  GammaScan scan;
  scan.kappa_over_omega = 0.3;
  scan.candidates.push_back({2.37, 2.39, 2.38, 4e-9});
  const auto doc = candidates_to_json(scan);
  REQUIRE(doc.size() == 1);
  CHECK(doc[0].at("gamma_star") == 2.38);

  SdtRoots roots;
  roots.gamma1 = 2.38;
  roots.diagnostics = "beta: no sign change";
  const auto r = roots_to_json(roots);
  CHECK(r.at("gamma1") == 2.38);
  CHECK(r.at("gamma2").is_null());
  CHECK(r.contains("diagnostics"));
}
