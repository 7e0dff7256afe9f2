#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmma/grid.hpp"
#include "vmma/kernels.hpp"
#include "vmma/simulate.hpp"

namespace vmma {

/// Writes `text` to `path` atomically: temp file in the same directory, then
/// rename. Parent directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64-bit over the payload bytes, as 16 hex digits; the stable content
/// fingerprint recorded in sidecars.
std::string content_hash_hex(const std::string& payload);

// --- CSV payloads (column layouts fixed in docs/FORMATS.md) -----------------

/// Field sample: header x1,..,xd,value; one row per node in row-major order;
/// coordinates are physical (exponentiated for exponential-scale samples).
std::string field_to_csv(const FieldSample& field);

/// Tabulated kernel: header z1,..,zd,value over the tabulation lattice.
std::string kernel_to_csv(const GridSpec& grid, const std::vector<double>& values);

/// Reads a kernel CSV back into a tabulated kernel; the rows must fill a
/// complete uniform lattice (any row order).
Kernel kernel_from_csv(const std::string& text);

/// Generic two-column table, e.g. theta,value or freq,value.
std::string table_to_csv(const std::string& key_name, const std::string& value_name,
                         std::span<const double> keys, std::span<const double> values);

// --- JSON payloads -----------------------------------------------------------

/// Sidecar for a field CSV: grid axes, scale, kind, seed, content hash of the
/// CSV payload, optional self-similarity exponents.
std::string field_sidecar_json(const FieldSample& field, std::uint64_t seed,
                               const std::string& csv_payload,
                               const std::vector<double>& mss_exponents = {});

/// MonteCarloSummary with its request (lags, thetas) as JSON.
std::string summary_to_json(const MonteCarloSummary& summary,
                            const std::vector<std::vector<double>>& lags,
                            const std::vector<double>& thetas);

} // namespace vmma
