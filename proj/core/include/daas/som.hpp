#ifndef DAAS_SOM_HPP
#define DAAS_SOM_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daas/datamodel.hpp"

namespace daas::som {

enum class Topology { hexagonal, grid };

std::string_view to_string(Topology t);
/// Accepts "hexagonal"/"hextop" and "grid"/"gridtop".
std::optional<Topology> parse_topology(std::string_view name);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

/**
 * Node layout. Node i sits at row i / cols, column i % cols. Grid nodes have
 * integer coordinates; hexagonal rows are sqrt(3)/2 apart and odd rows are
 * shifted right by 0.5, so every neighbor is at distance 1.
 */
class Lattice {
public:
  Lattice(std::size_t rows, std::size_t cols, Topology topology);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return positions_.size(); }
  Topology topology() const noexcept { return topology_; }
  const std::vector<Position>& positions() const noexcept { return positions_; }

  double distance(std::size_t a, std::size_t b) const;
  double squared_distance(std::size_t a, std::size_t b) const;
  /// Nodes at lattice distance <= 1 (excluding the node itself).
  std::vector<std::size_t> neighbors(std::size_t node) const;

private:
  std::size_t rows_;
  std::size_t cols_;
  Topology topology_;
  std::vector<Position> positions_;
};

Lattice build_lattice(std::size_t rows, std::size_t cols, Topology topology);

// Defaults follow the reference training setup: 200 iterations, Gaussian
// neighborhood shrinking from radius 8 to 2.
struct SomParams {
  std::size_t iterations = 200;
  double radius_start = 8.0;
  double radius_end = 2.0;
  double learning_rate_start = 0.5;
  double learning_rate_end = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr std::string_view kNeighborhood = "gaussian";

/// Geometric interpolation from start (t = 0) to end (t = iterations - 1), exact at both ends.
double schedule(double start, double end, std::size_t t, std::size_t iterations);
double radius_at(const SomParams& params, std::size_t t);
double learning_rate_at(const SomParams& params, std::size_t t);

struct SomModel {
  Lattice lattice;
  std::vector<Vector> weights;
  SomParams params;
  double final_qe = 0.0;

  std::size_t dim() const { return weights.empty() ? 0 : weights.front().size(); }
};

/// Weights drawn uniformly from [0, 1]^d under params.seed; no training.
SomModel initialize(const Lattice& lattice, std::size_t dim, const SomParams& params);

/// Best-matching unit by Euclidean distance, ties to the lowest node index.
std::size_t bmu(const SomModel& model, std::span<const double> x);

/**
 * Online training. Each iteration presents every point once in a
 * seed-shuffled order; each presentation moves every node toward the point by
 * lr(t) * exp(-d_lattice(bmu, node)^2 / (2 radius(t)^2)).
 */
SomModel train(const Dataset& ds, const Lattice& lattice, const SomParams& params);

/// Mean Euclidean distance from each point to its BMU weights.
double quantization_error(const SomModel& model, const Dataset& ds);

/// Mean weight distance to lattice neighbors, row-major rows x cols.
std::vector<double> u_matrix(const SomModel& model);

void write_u_matrix_csv(std::ostream& out, const SomModel& model, std::span<const double> umatrix);
/// node_index,row,col,w_0..w_{d-1}
void write_model_csv(std::ostream& out, const SomModel& model);
/// JSON echo of the lattice and training parameters.
std::string params_json(const SomModel& model);

} // namespace daas::som

#endif
