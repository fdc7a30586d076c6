#include "daas/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "daas/csv.hpp"
#include "daas/error.hpp"
#include "daas/parallel.hpp"
#include "daas/random.hpp"

namespace daas::som {

namespace {

constexpr double kNeighborSlack = 1e-9;
// Below this many weight entries a presentation runs inline; spawning tasks
// would cost more than the arithmetic.
constexpr std::size_t kParallelWeights = std::size_t{1} << 15;
constexpr std::size_t kNodeBlock = 64;

} // namespace

std::string_view to_string(Topology t) {
  return t == Topology::hexagonal ? "hexagonal" : "grid";
}

std::optional<Topology> parse_topology(std::string_view name) {
  if (name == "hexagonal" || name == "hextop") {
    return Topology::hexagonal;
  }
  if (name == "grid" || name == "gridtop") {
    return Topology::grid;
  }
  return std::nullopt;
}

Lattice::Lattice(std::size_t rows, std::size_t cols, Topology topology)
    : rows_(rows), cols_(cols), topology_(topology) {
  if (rows == 0 || cols == 0) {
    throw Error("lattice dimensions must be at least 1x1");
  }
  positions_.reserve(rows * cols);
  const double row_step = topology == Topology::hexagonal ? std::sqrt(3.0) / 2.0 : 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double shift = (topology == Topology::hexagonal && r % 2 == 1) ? 0.5 : 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      positions_.push_back({static_cast<double>(c) + shift, static_cast<double>(r) * row_step});
    }
  }
}

double Lattice::squared_distance(std::size_t a, std::size_t b) const {
  const double dx = positions_[a].x - positions_[b].x;
  const double dy = positions_[a].y - positions_[b].y;
  return dx * dx + dy * dy;
}

double Lattice::distance(std::size_t a, std::size_t b) const {
  return std::sqrt(squared_distance(a, b));
}

std::vector<std::size_t> Lattice::neighbors(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t other = 0; other < size(); ++other) {
    if (other != node && distance(node, other) <= 1.0 + kNeighborSlack) {
      out.push_back(other);
    }
  }
  return out;
}

Lattice build_lattice(std::size_t rows, std::size_t cols, Topology topology) {
  return Lattice(rows, cols, topology);
}

void SomParams::validate() const {
  if (iterations < 1) {
    throw Error("SOM iterations must be at least 1");
  }
  if (!(radius_end > 0.0) || !(radius_start >= radius_end)) {
    throw Error("SOM radius must satisfy radius_start >= radius_end > 0");
  }
  if (!(learning_rate_end > 0.0) || !(learning_rate_start >= learning_rate_end) ||
      !(learning_rate_start <= 1.0)) {
    throw Error("SOM learning rate must satisfy 0 < end <= start <= 1");
  }
}

double schedule(double start, double end, std::size_t t, std::size_t iterations) {
  if (iterations <= 1) {
    return start;
  }
  const double f = static_cast<double>(t) / static_cast<double>(iterations - 1);
  // start^(1-f) * end^f hits both endpoints exactly (pow(x, 0) == 1, pow(x, 1) == x).
  return std::pow(start, 1.0 - f) * std::pow(end, f);
}

double radius_at(const SomParams& params, std::size_t t) {
  return schedule(params.radius_start, params.radius_end, t, params.iterations);
}

double learning_rate_at(const SomParams& params, std::size_t t) {
  return schedule(params.learning_rate_start, params.learning_rate_end, t, params.iterations);
}

SomModel initialize(const Lattice& lattice, std::size_t dim, const SomParams& params) {
  if (dim == 0) {
    throw Error("SOM weight dimension must be at least 1");
  }
  Rng rng(params.seed);
  std::vector<Vector> weights(lattice.size(), Vector(dim));
  for (auto& w : weights) {
    for (double& v : w) {
      v = rng.uniform();
    }
  }
  return SomModel{lattice, std::move(weights), params, 0.0};
}

std::size_t bmu(const SomModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw Error("input dimension " + std::to_string(x.size()) +
                " does not match SOM dimension " + std::to_string(model.dim()));
  }
  const std::size_t nodes = model.weights.size();
  struct Best {
    double d2 = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
  };
  auto scan = [&](std::size_t lo, std::size_t hi, Best& best) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double d2 = squared_distance(x, model.weights[i]);
      if (d2 < best.d2) {
        best = {d2, i};
      }
    }
  };
  if (nodes * x.size() < kParallelWeights) {
    Best best;
    scan(0, nodes, best);
    return best.index;
  }
  // Blocks are combined left before right, so ties still resolve to the lowest index.
  return parallel::reduce(nodes, Best{}, scan,
                          [](Best& lhs, const Best& rhs) {
                            if (rhs.d2 < lhs.d2) {
                              lhs = rhs;
                            }
                          },
                          kNodeBlock)
      .index;
}

namespace {

void present(SomModel& model, std::span<const double> x, double rate, double radius) {
  const std::size_t winner = bmu(model, x);
  const double denom = 2.0 * radius * radius;
  auto update = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t node = lo; node < hi; ++node) {
      const double h = std::exp(-model.lattice.squared_distance(winner, node) / denom);
      const double step = rate * h;
      auto& w = model.weights[node];
      for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] += step * (x[j] - w[j]);
      }
    }
  };
  const std::size_t nodes = model.weights.size();
  if (nodes * x.size() < kParallelWeights) {
    update(0, nodes);
  } else {
    parallel::for_blocks(nodes, kNodeBlock, update);
  }
}

} // namespace

SomModel train(const Dataset& ds, const Lattice& lattice, const SomParams& params) {
  params.validate();
  if (ds.empty()) {
    throw Error("cannot train a SOM on an empty dataset");
  }
  SomModel model = initialize(lattice, ds.dim(), params);
  // A separate stream keeps presentation order independent of the weight draws.
  Rng order_rng(derive_seed(params.seed, 1));
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t t = 0; t < params.iterations; ++t) {
    const double radius = radius_at(params, t);
    const double rate = learning_rate_at(params, t);
    order_rng.shuffle(order);
    for (std::size_t i : order) {
      present(model, ds.row(i), rate, radius);
    }
  }
  model.final_qe = quantization_error(model, ds);
  return model;
}

double quantization_error(const SomModel& model, const Dataset& ds) {
  if (ds.empty()) {
    throw Error("quantization error needs at least one point");
  }
  const double total = parallel::sum(ds.size(), [&](std::size_t i) {
    const auto x = ds.row(i);
    return std::sqrt(squared_distance(x, model.weights[bmu(model, x)]));
  });
  return total / static_cast<double>(ds.size());
}

std::vector<double> u_matrix(const SomModel& model) {
  const auto& lattice = model.lattice;
  std::vector<double> out(lattice.size(), 0.0);
  for (std::size_t node = 0; node < lattice.size(); ++node) {
    const auto nbrs = lattice.neighbors(node);
    if (nbrs.empty()) {
      continue;
    }
    double total = 0.0;
    for (std::size_t other : nbrs) {
      total += std::sqrt(squared_distance(model.weights[node], model.weights[other]));
    }
    out[node] = total / static_cast<double>(nbrs.size());
  }
  return out;
}

void write_u_matrix_csv(std::ostream& out, const SomModel& model, std::span<const double> umatrix) {
  const auto& lattice = model.lattice;
  for (std::size_t r = 0; r < lattice.rows(); ++r) {
    for (std::size_t c = 0; c < lattice.cols(); ++c) {
      if (c > 0) {
        out << ',';
      }
      out << csv::format_real(umatrix[r * lattice.cols() + c]);
    }
    out << '\n';
  }
}

void write_model_csv(std::ostream& out, const SomModel& model) {
  out << "node_index,row,col";
  for (std::size_t j = 0; j < model.dim(); ++j) {
    out << ",w_" << j;
  }
  out << '\n';
  const std::size_t cols = model.lattice.cols();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    out << i << ',' << i / cols << ',' << i % cols;
    for (double v : model.weights[i]) {
      out << ',' << csv::format_real(v);
    }
    out << '\n';
  }
}

std::string params_json(const SomModel& model) {
  const auto& p = model.params;
  nlohmann::ordered_json j;
  j["rows"] = model.lattice.rows();
  j["cols"] = model.lattice.cols();
  j["topology"] = std::string(to_string(model.lattice.topology()));
  j["iterations"] = p.iterations;
  j["radius_start"] = p.radius_start;
  j["radius_end"] = p.radius_end;
  j["radius_first"] = radius_at(p, 0);
  j["radius_last"] = radius_at(p, p.iterations - 1);
  j["learning_rate_start"] = p.learning_rate_start;
  j["learning_rate_end"] = p.learning_rate_end;
  j["neighborhood"] = std::string(kNeighborhood);
  j["seed"] = p.seed;
  j["dim"] = model.dim();
  j["final_qe"] = model.final_qe;
  return j.dump(2) + "\n";
}

} // namespace daas::som
