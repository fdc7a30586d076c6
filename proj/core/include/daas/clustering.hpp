#ifndef DAAS_CLUSTERING_HPP
#define DAAS_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daas/datamodel.hpp"

namespace daas::clustering {

using Centroids = std::vector<Vector>;

struct KmeansOptions {
  std::size_t max_iter = 100;
  /// Absolute wcss improvement below which iteration stops.
  double tol = 1e-6;
};

/**
 * Result of a flat k-means run.
 *
 * Every point is assigned to its nearest centroid (ties go to the lowest
 * cluster id) and `wcss` is measured against `centroids` under `assignment`.
 * `wcss_history` holds the wcss reported by each Lloyd step, which is
 * non-increasing.
 */
struct ClusterModel {
  std::size_t k = 0;
  Centroids centroids;
  std::vector<std::size_t> assignment;
  double wcss = 0.0;
  std::size_t iterations_run = 0;
  std::uint64_t seed = 0;
  std::vector<double> wcss_history;

  std::vector<std::size_t> cluster_sizes() const;
  bool has_empty_cluster() const;
};

struct Assignment {
  std::vector<std::size_t> labels;
  double wcss = 0.0;
};

struct LloydResult {
  Centroids centroids;
  std::vector<std::size_t> assignment;
  /// Measured under the new assignment against the centroids passed in.
  double wcss = 0.0;
};

/// Nearest centroid for one vector, ties to the lowest index.
std::size_t nearest(std::span<const double> x, const Centroids& centroids);

/// Nearest-centroid labels and their total squared distance.
Assignment assign(const Dataset& ds, const Centroids& centroids);

/**
 * k-means++ seeding. Candidates are visited in id order, so the chosen
 * points depend on ids and the seed rather than on row positions.
 */
Centroids init_kmeanspp(const Dataset& ds, std::size_t k, std::uint64_t seed);

/// One assignment + update pass. Empty clusters keep their previous centroid.
LloydResult lloyd_step(const Dataset& ds, const Centroids& centroids);

ClusterModel kmeans(const Dataset& ds, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& options = {});

/// Lloyd iterations from fixed starting centroids.
ClusterModel kmeans_from(const Dataset& ds, Centroids start, std::uint64_t seed,
                         const KmeansOptions& options = {});

/**
 * Re-seeds every empty cluster at the point farthest from its assigned
 * centroid and resumes Lloyd iterations, repeating until no cluster is empty.
 * A model without empty clusters is returned unchanged. Never increases wcss.
 */
ClusterModel refine(const ClusterModel& model, const Dataset& ds,
                    const KmeansOptions& options = {});

struct Partition {
  double wcss = 0.0;
  std::vector<std::size_t> labels;
};

inline constexpr std::size_t kBruteForceMaxPoints = 12;
inline constexpr std::size_t kBruteForceMaxClusters = 4;

/// Exhaustive minimum-wcss partition into at most k non-empty parts.
Partition brute_force_partition(const Dataset& ds, std::size_t k);

/// Within-cluster sum of squares of a labelling using member-mean centroids.
double partition_wcss(const Dataset& ds, std::span<const std::size_t> labels);

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

} // namespace daas::clustering

#endif
