#include "mmot/ingest.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mmot/csv.hpp"

namespace mmot {

namespace {

void require_grid(std::size_t m, double a, double b) {
  if (m < 2 || !(b > a)) {
    throw Error(ErrorCode::InvalidArgument, "cli", "grid needs m >= 2 cells on a nonempty interval");
  }
}

}  // namespace

Density make_uniform(double a, double b, std::size_t m, int particle_count) {
  require_grid(m, a, b);
  const double h = (b - a) / static_cast<double>(m);
  std::vector<double> nodes(m);
  std::vector<double> weights(m, static_cast<double>(particle_count) / static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) nodes[i] = a + (static_cast<double>(i) + 0.5) * h;
  return Density::renormalized(Geometry::line(), std::move(nodes), std::move(weights),
                               particle_count);
}

Density make_exponential(double rate, double r_max, std::size_t m, int particle_count) {
  require_grid(m, 0.0, r_max);
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "cli", "rate must be positive");
  const double h = r_max / static_cast<double>(m);
  std::vector<double> nodes(m);
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = static_cast<double>(i) * h;
    nodes[i] = left + 0.5 * h;
    // int_left^{left+h} e^{-rate r} dr, up to the common factor 1/rate.
    weights[i] = -std::exp(-rate * left) * std::expm1(-rate * h);
  }
  return Density::renormalized(Geometry::line(), std::move(nodes), std::move(weights),
                               particle_count);
}

Density make_gaussian_radial(double sigma, double r_max, std::size_t m, int dimension,
                             int particle_count) {
  require_grid(m, 0.0, r_max);
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "cli", "sigma must be positive");
  const auto geometry = Geometry::radial(dimension);
  const double h = r_max / static_cast<double>(m);
  const double a = 0.5 * dimension;
  // int r^(d-1) e^{-r^2/2 sigma^2} dr is proportional to the regularised
  // incomplete gamma P(d/2, r^2 / 2 sigma^2); differences are taken on the
  // side (P or Q) that keeps relative accuracy.
  auto t = [&](double r) { return r * r / (2.0 * sigma * sigma); };
  std::vector<double> nodes(m);
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = static_cast<double>(i) * h;
    const double right = left + h;
    nodes[i] = left + 0.5 * h;
    if (t(left) < a) {
      weights[i] = boost::math::gamma_p(a, t(right)) - boost::math::gamma_p(a, t(left));
    } else {
      weights[i] = boost::math::gamma_q(a, t(left)) - boost::math::gamma_q(a, t(right));
    }
  }
  return Density::renormalized(geometry, std::move(nodes), std::move(weights), particle_count);
}

Density read_density_csv(std::istream& in, Geometry geometry, int particle_count,
                         bool renormalize) {
  const auto table = read_csv(in, {"coord", "weight"});
  std::vector<double> nodes;
  std::vector<double> weights;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[1] < 0.0) {
      throw Error(ErrorCode::ParseError, "cli",
                  "row " + std::to_string(r + 2) + ": negative weight");
    }
    nodes.push_back(row[0]);
    weights.push_back(row[1]);
  }
  if (renormalize) {
    return Density::renormalized(geometry, std::move(nodes), std::move(weights), particle_count);
  }
  return Density(geometry, std::move(nodes), std::move(weights), particle_count);
}

Density read_density_csv(const std::filesystem::path& path, Geometry geometry,
                         int particle_count, bool renormalize) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cli", "cannot open " + path.string());
  return read_density_csv(in, geometry, particle_count, renormalize);
}

void write_density_csv(std::ostream& out, const Density& density) {
  CsvWriter csv(out, {"coord", "weight"});
  for (std::size_t i = 0; i < density.size(); ++i) {
    csv.row({density.nodes()[i], density.weights()[i]});
  }
}

}  // namespace mmot
