#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "daas/error.hpp"
#include "daas/parallel.hpp"
#include "daas/som.hpp"
#include "test_support.hpp"

namespace {

using namespace daas::som;
using daas::testing::make_dataset;

SomModel model_with(std::size_t rows, std::size_t cols, Topology t,
                    std::vector<daas::Vector> weights) {
  return SomModel{build_lattice(rows, cols, t), std::move(weights), SomParams{}, 0.0};
}

// --- lattice -----------------------------------------------------------------

TEST(Lattice, TableSizesAndSingleNode) {
  EXPECT_EQ(build_lattice(20, 20, Topology::hexagonal).size(), 400u);
  EXPECT_EQ(build_lattice(30, 30, Topology::grid).size(), 900u);
  for (auto t : {Topology::hexagonal, Topology::grid}) {
    const auto one = build_lattice(1, 1, t);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one.positions()[0].x, 0.0);
    EXPECT_EQ(one.positions()[0].y, 0.0);
  }
}

TEST(Lattice, ZeroDimensionRejected) {
  EXPECT_THROW(build_lattice(0, 3, Topology::grid), daas::Error);
  EXPECT_THROW(build_lattice(3, 0, Topology::hexagonal), daas::Error);
}

TEST(Lattice, HexagonalOffsetRowsAreUnitDistance) {
  const auto hex = build_lattice(2, 2, Topology::hexagonal);
  // Node (row 1, col 0) sits at (0.5, sqrt(3)/2).
  EXPECT_NEAR(hex.distance(0, 2), std::sqrt(0.25 + 0.75), 1e-15);
  EXPECT_NEAR(hex.distance(0, 2), 1.0, 1e-15);
  EXPECT_EQ(hex.positions()[2].x, 0.5);
}

TEST(Lattice, InteriorNeighborCounts) {
  const auto grid = build_lattice(5, 5, Topology::grid);
  const auto hex = build_lattice(5, 5, Topology::hexagonal);
  EXPECT_EQ(grid.neighbors(12).size(), 4u);
  EXPECT_EQ(hex.neighbors(12).size(), 6u);
  EXPECT_EQ(grid.neighbors(0).size(), 2u);
}

TEST(Lattice, DistancesAreAMetric) {
  for (auto t : {Topology::hexagonal, Topology::grid}) {
    const auto lat = build_lattice(4, 5, t);
    for (std::size_t a = 0; a < lat.size(); ++a) {
      for (std::size_t b = 0; b < lat.size(); ++b) {
        EXPECT_EQ(lat.distance(a, b), lat.distance(b, a));
        for (std::size_t c = 0; c < lat.size(); ++c) {
          EXPECT_LE(lat.distance(a, c), lat.distance(a, b) + lat.distance(b, c) + 1e-12);
        }
      }
    }
  }
}

TEST(Lattice, TopologyNames) {
  EXPECT_EQ(parse_topology("hexagonal"), Topology::hexagonal);
  EXPECT_EQ(parse_topology("gridtop"), Topology::grid);
  EXPECT_FALSE(parse_topology("tritop").has_value());
  EXPECT_FALSE(parse_topology("randtop").has_value());
}

// --- schedule ----------------------------------------------------------------

TEST(Schedule, RadiusEndpointsAreExact) {
  const SomParams p;
  EXPECT_EQ(p.iterations, 200u);
  EXPECT_EQ(radius_at(p, 0), 8.0);
  EXPECT_EQ(radius_at(p, 199), 2.0);
  EXPECT_EQ(learning_rate_at(p, 0), 0.5);
  EXPECT_EQ(learning_rate_at(p, 199), 0.05);
  for (std::size_t t = 1; t < p.iterations; ++t) {
    EXPECT_LT(radius_at(p, t), radius_at(p, t - 1));
  }
  // Geometric decay: the midpoint of the log schedule.
  EXPECT_NEAR(schedule(8.0, 2.0, 1, 3), 4.0, 1e-12);
  // Awkward ratios still land exactly on both ends.
  EXPECT_EQ(schedule(7.3, 1.1, 0, 37), 7.3);
  EXPECT_EQ(schedule(7.3, 1.1, 36, 37), 1.1);
}

TEST(Schedule, ParamsValidation) {
  SomParams p;
  p.iterations = 0;
  EXPECT_THROW(p.validate(), daas::Error);
  p = {};
  p.radius_end = 9.0;
  EXPECT_THROW(p.validate(), daas::Error);
  p = {};
  p.learning_rate_start = 1.5;
  EXPECT_THROW(p.validate(), daas::Error);
  p = {};
  p.learning_rate_end = 0.0;
  EXPECT_THROW(p.validate(), daas::Error);
}

// --- bmu ---------------------------------------------------------------------

TEST(Bmu, TiesAndExactMatches) {
  const auto flat = model_with(2, 2, Topology::grid, {{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  const std::vector<double> x{0.3, 0.7};
  EXPECT_EQ(bmu(flat, x), 0u);

  const auto m = model_with(1, 3, Topology::grid, {{0, 0}, {5, 5}, {9, 1}});
  const std::vector<double> hit{5, 5};
  EXPECT_EQ(bmu(m, hit), 1u);
  const std::vector<double> wrong{1, 2, 3};
  EXPECT_THROW(bmu(m, wrong), daas::Error);
}

TEST(Bmu, MatchesLinearScanOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<daas::Vector> w(5, daas::Vector(3));
  for (auto& v : w) {
    for (double& x : v) {
      x = u(rng);
    }
  }
  const auto m = model_with(1, 5, Topology::grid, w);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      double d = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        d += (x[j] - w[i][j]) * (x[j] - w[i][j]);
      }
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    EXPECT_EQ(bmu(m, x), best);
  }
}

TEST(Bmu, LargeMapsUseTheParallelPathWithSameAnswer) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  // 64 x 64 nodes x 16 dims crosses the parallel threshold.
  std::vector<daas::Vector> w(64 * 64, daas::Vector(16));
  for (auto& v : w) {
    for (double& x : v) {
      x = u(rng);
    }
  }
  w[4000] = w[17];  // duplicated weights: the tie must still go to 17
  const auto m = model_with(64, 64, Topology::grid, w);
  daas::parallel::set_max_workers(8);
  EXPECT_EQ(bmu(m, w[17]), 17u);
  daas::parallel::set_max_workers(0);
}

// --- training ----------------------------------------------------------------

TEST(Train, SingleRepeatedPointAttractsEveryWeight) {
  const auto ds = make_dataset({{0.3, 0.8}, {0.3, 0.8}, {0.3, 0.8}});
  SomParams p;
  p.iterations = 400;
  const auto m = train(ds, build_lattice(3, 3, Topology::hexagonal), p);
  for (const auto& w : m.weights) {
    EXPECT_NEAR(w[0], 0.3, 1e-3);
    EXPECT_NEAR(w[1], 0.8, 1e-3);
  }
  EXPECT_LT(m.final_qe, 1e-3);
}

TEST(Train, QuantizationErrorDropsOnBlobData) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto blobs = daas::testing::make_blobs({{0.2, 0.2}, {0.8, 0.3}, {0.5, 0.9}}, 30, 0.05,
                                                 seed + 100);
    const auto ds = daas::normalize(blobs.data);
    SomParams p;
    p.seed = seed;
    p.iterations = 30;
    const auto lattice = build_lattice(20, 20, Topology::hexagonal);
    const double initial = quantization_error(initialize(lattice, 2, p), ds);
    const auto trained = train(ds, lattice, p);
    EXPECT_LE(trained.final_qe, initial) << "seed " << seed;
  }
}

TEST(Train, WeightsStayNearUnitCube) {
  std::mt19937_64 rng(77);
  const auto ds = daas::normalize(daas::testing::random_dataset(rng, 120, 3));
  SomParams p;
  p.iterations = 40;
  p.seed = 4;
  const auto m = train(ds, build_lattice(8, 8, Topology::grid), p);
  for (const auto& w : m.weights) {
    for (double v : w) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, -0.05);
      EXPECT_LE(v, 1.05);
    }
  }
}

TEST(Train, DeterministicAcrossWorkerCounts) {
  std::mt19937_64 rng(5);
  const auto ds = daas::normalize(daas::testing::random_dataset(rng, 50, 16));
  SomParams p;
  p.iterations = 3;
  p.seed = 8;
  // 48 x 48 x 16 weights takes the parallel update path.
  const auto lattice = build_lattice(48, 48, Topology::hexagonal);
  daas::parallel::set_max_workers(1);
  const auto a = train(ds, lattice, p);
  daas::parallel::set_max_workers(8);
  const auto b = train(ds, lattice, p);
  daas::parallel::set_max_workers(0);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(std::memcmp(&a.final_qe, &b.final_qe, sizeof a.final_qe), 0);
}

TEST(Train, EmptyDatasetRejected) {
  EXPECT_THROW(train(daas::Dataset{}, build_lattice(2, 2, Topology::grid), SomParams{}),
               daas::Error);
}

// --- u-matrix and quantization error ----------------------------------------

TEST(UMatrix, ConstantWeightsGiveZeros) {
  const auto m = model_with(3, 4, Topology::hexagonal, std::vector<daas::Vector>(12, {0.4, 0.4}));
  for (double v : u_matrix(m)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(UMatrix, SinglePair) {
  const auto m = model_with(1, 2, Topology::grid, {{0}, {3}});
  EXPECT_EQ(u_matrix(m), (std::vector<double>{3.0, 3.0}));
}

TEST(UMatrix, PairContributionsAreSymmetric) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<daas::Vector> w(20, daas::Vector(2));
  for (auto& v : w) {
    v = {u(rng), u(rng)};
  }
  const auto m = model_with(4, 5, Topology::hexagonal, w);
  // Recompute each node's mean from the symmetric pair table.
  const auto um = u_matrix(m);
  for (std::size_t a = 0; a < 20; ++a) {
    const auto nbrs = m.lattice.neighbors(a);
    double total = 0;
    for (std::size_t b : nbrs) {
      const auto back = m.lattice.neighbors(b);
      EXPECT_NE(std::find(back.begin(), back.end(), a), back.end());
      total += std::hypot(w[a][0] - w[b][0], w[a][1] - w[b][1]);
    }
    EXPECT_NEAR(um[a], total / nbrs.size(), 1e-15);
  }
}

TEST(QuantizationError, ZeroWhenPointsAreWeights) {
  const auto m = model_with(1, 3, Topology::grid, {{0, 0}, {1, 0}, {0, 1}});
  EXPECT_EQ(quantization_error(m, make_dataset({{1, 0}, {0, 1}, {0, 0}})), 0.0);
}

TEST(QuantizationError, SingleNodeIsMeanDistance) {
  const auto m = model_with(1, 1, Topology::grid, {{0, 0}});
  EXPECT_DOUBLE_EQ(quantization_error(m, make_dataset({{3, 4}, {0, 1}})), 3.0);
  EXPECT_THROW(quantization_error(m, daas::Dataset{}), daas::Error);
}

TEST(QuantizationError, MatchesBruteForceRecomputation) {
  std::mt19937_64 rng(90);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ds = daas::testing::random_dataset(rng, 40, 3);
    SomParams p;
    p.seed = rng();
    const auto m = initialize(build_lattice(3, 4, Topology::grid), 3, p);
    double total = 0;
    for (const auto& pt : ds.points()) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& w : m.weights) {
        best = std::min(best, std::sqrt(daas::squared_distance(pt.features, w)));
      }
      total += best;
    }
    EXPECT_NEAR(quantization_error(m, ds), total / ds.size(), 1e-12);
  }
}

TEST(Export, ModelCsvAndParams) {
  const auto m = model_with(2, 2, Topology::hexagonal, {{0.5}, {1}, {0}, {0.25}});
  std::ostringstream csv;
  write_model_csv(csv, m);
  EXPECT_EQ(csv.str(), "node_index,row,col,w_0\n0,0,0,0.5\n1,0,1,1\n2,1,0,0\n3,1,1,0.25\n");

  std::ostringstream grid;
  write_u_matrix_csv(grid, m, u_matrix(m));
  const auto text = grid.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);

  const auto j = nlohmann::json::parse(params_json(m));
  EXPECT_EQ(j["iterations"], 200);
  EXPECT_EQ(j["radius_first"], 8.0);
  EXPECT_EQ(j["radius_last"], 2.0);
  EXPECT_EQ(j["neighborhood"], "gaussian");
  EXPECT_EQ(j["topology"], "hexagonal");
}

} // namespace
