#pragma once

// Builtin density families and the `coord,weight` CSV format.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mmot/model.hpp"

namespace mmot {

/// Uniform mass N on [a, b]: m equal cells, atoms at cell midpoints.
Density make_uniform(double a, double b, std::size_t m, int particle_count);

/// Mass N with profile exp(-rate r) on [0, r_max]; weights are exact cell
/// integrals, atoms at cell midpoints.
Density make_exponential(double rate, double r_max, std::size_t m, int particle_count);

/// Radial Gaussian exp(-r^2 / (2 sigma^2)) in dimension d on [0, r_max].
/// Each radial atom carries the shell mass, i.e. the cell integral of
/// r^(d-1) exp(-r^2 / (2 sigma^2)).
Density make_gaussian_radial(double sigma, double r_max, std::size_t m, int dimension,
                             int particle_count);

/// Reads `coord,weight` rows. With renormalize the weights are rescaled to
/// sum to N; otherwise a mismatch throws MassMismatch. Malformed rows or
/// negative weights throw ParseError naming the row.
Density read_density_csv(std::istream& in, Geometry geometry, int particle_count,
                         bool renormalize);
Density read_density_csv(const std::filesystem::path& path, Geometry geometry,
                         int particle_count, bool renormalize);

void write_density_csv(std::ostream& out, const Density& density);

}  // namespace mmot
