#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbic/effective.hpp"
#include "fbic/floquet.hpp"
#include "fbic/lattice.hpp"
#include "fbic/spectral.hpp"
#include "fbic/wavepacket.hpp"

namespace fbic {

/// 17 significant digits: round-trips every double.
std::string format_real(double value);

/// 64-bit FNV-1a digest of a byte string, as 16 hex digits.
std::string checksum(const std::string& bytes);
std::string file_checksum(const std::filesystem::path& path);

/// {n_sites, rho_over_kappa, kappa_over_omega}; custom (non-defect)
/// profiles also carry their bond array.
nlohmann::json lattice_to_json(const LatticeSpec& lattice);
LatticeSpec lattice_from_json(const nlohmann::json& doc);

nlohmann::json drive_to_json(const DriveSpec& drive);
DriveSpec drive_from_json(const nlohmann::json& doc);

// CSV emitters. Site indices are physical (defect at 0).

/// mode_index, quasienergy, R_at_0, residual
void write_spectrum_csv(std::ostream& out, const FloquetSpectrum& spectrum);
/// mode_index, site_index, re, im
void write_modes_csv(std::ostream& out, const FloquetSpectrum& spectrum,
                     const LatticeSpec& lattice);
/// gamma, mode_index, quasienergy, R0, D, label
void write_scan_csv(std::ostream& out, const GammaScan& scan);
/// mode_index, quasienergy, R0, h1, h2, D, label
void write_reports_csv(std::ostream& out, const std::vector<ModeReport>& reports);
/// gamma, Q, kappa_e, alpha, beta
void write_effective_csv(std::ostream& out, const std::vector<EffectiveLattice>& rows);
/// time, site, probability
void write_packet_csv(std::ostream& out, const PacketRun& run, const LatticeSpec& lattice);
/// mode_index, time, site, probability, R
void write_cycle_csv(std::ostream& out, int mode_index,
                     const std::vector<CycleSample>& samples, const LatticeSpec& lattice);

nlohmann::json candidates_to_json(const GammaScan& scan);
nlohmann::json bic_search_to_json(const BicSearch& search);
nlohmann::json roots_to_json(const SdtRoots& roots);
nlohmann::json packet_to_json(const PacketRun& run);

} // namespace fbic
