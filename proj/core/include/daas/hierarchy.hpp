#ifndef DAAS_HIERARCHY_HPP
#define DAAS_HIERARCHY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "daas/clustering.hpp"
#include "daas/datamodel.hpp"

namespace daas::clustering {

struct ClusterNode {
  std::size_t id = 0;
  std::size_t level = 0;
  std::optional<std::size_t> parent;
  Vector centroid;
  std::size_t object_count = 0;
  double wcss = 0.0;
  double rmse = 0.0;
  /// Share of the level's total wcss; 0 when the level total is 0.
  double coefficient = 0.0;
  std::vector<std::size_t> members;
  std::vector<std::size_t> children;
};

/// Tree of order m; node ids are breadth-first from the root (id 0, level 0).
struct ClusterTree {
  std::size_t order = 0;
  std::size_t depth = 0;
  std::vector<ClusterNode> nodes;

  std::size_t levels() const;
  std::vector<std::size_t> leaves() const;
};

struct HierarchyOptions {
  std::uint64_t seed = 0;
  KmeansOptions kmeans;
  /// Cluster count for the root split; 0 means use the tree order.
  std::size_t root_order = 0;
};

/**
 * Recursive k-means (kmeans + refine at every node). A node is split only
 * while it is above `depth`, holds at least as many members as the split count and
 * has non-zero rmse. The root split uses `options.seed`; node i uses a seed
 * derived from (seed, i).
 */
ClusterTree build_hierarchy(const Dataset& ds, std::size_t m, std::size_t depth,
                            const HierarchyOptions& options = {});

/// Root plus the non-empty clusters of a flat model, as a one-level tree.
ClusterTree tree_from_model(const ClusterModel& model, const Dataset& ds);

struct ClusterStatsRow {
  std::size_t level = 0;
  std::size_t cluster_id = 0;
  std::optional<std::size_t> parent;
  std::size_t object_count = 0;
  double rmse = 0.0;
  double coefficient = 0.0;
};

using ClusterStats = std::vector<ClusterStatsRow>;

/// Recomputes per-node statistics from the data; rows ordered by (level, id).
ClusterStats cluster_stats(const ClusterTree& tree, const Dataset& ds);

/// Per-cluster rows (level 1, parent 0) for a flat model; ids are model cluster ids.
ClusterStats model_stats(const ClusterModel& model, const Dataset& ds);

/// level,cluster_id,parent_id,object_count,rmse,coefficient (root parent_id is -1).
void write_stats_csv(std::ostream& out, const ClusterStats& stats);

/// point_id,level,cluster_id for every node membership below the root.
void write_assignments_csv(std::ostream& out, const ClusterTree& tree, const Dataset& ds);

} // namespace daas::clustering

#endif
