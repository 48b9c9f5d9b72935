#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "fraclap/grid_function.hpp"
#include "fraclap/lattice_walk.hpp"

namespace fraclap {

inline constexpr int kSchemaVersion = 1;

/// Shortest text that round-trips the double ("%.17g").
std::string format_double(double v);

/// Writes to `<path>.tmp` then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// One row per site: integer coordinates, then mass.
std::string distribution_csv(const LatticeDistribution& dist);

/// h, M, time, leaked, total mass and the absolute moments Σ mass |hk|^β for
/// each probe β.
nlohmann::json distribution_summary(const LatticeDistribution& dist,
                                    std::span<const double> beta_probes);

/// One row per grid point: physical coordinates, then value.
std::string grid_csv(const GridFunction& u);

/// `<base>.bin` holds little-endian float64 values, `<base>.json` the header
/// {schema_version, n, L, P, dtype, byte_order}.
void write_grid_binary(const GridFunction& u, const std::filesystem::path& base);
GridFunction read_grid_binary(const std::filesystem::path& base);

}  // namespace fraclap
