#include "daas/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <tuple>

#include "daas/csv.hpp"
#include "daas/error.hpp"
#include "daas/random.hpp"

namespace daas::clustering {

std::size_t ClusterTree::levels() const {
  std::size_t deepest = 0;
  for (const auto& node : nodes) {
    deepest = std::max(deepest, node.level);
  }
  return nodes.empty() ? 0 : deepest + 1;
}

std::vector<std::size_t> ClusterTree::leaves() const {
  std::vector<std::size_t> out;
  for (const auto& node : nodes) {
    if (node.children.empty()) {
      out.push_back(node.id);
    }
  }
  return out;
}

namespace {

Vector mean_of(const Dataset& ds, std::span<const std::size_t> members) {
  Vector mean(ds.dim(), 0.0);
  for (std::size_t i : members) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      mean[j] += ds[i].features[j];
    }
  }
  for (double& v : mean) {
    v /= static_cast<double>(members.size());
  }
  return mean;
}

double wcss_of(const Dataset& ds, std::span<const std::size_t> members, const Vector& centroid) {
  double total = 0.0;
  for (std::size_t i : members) {
    total += squared_distance(ds.row(i), centroid);
  }
  return total;
}

void fill_node_stats(ClusterNode& node, const Dataset& ds) {
  node.object_count = node.members.size();
  node.wcss = wcss_of(ds, node.members, node.centroid);
  node.rmse = node.object_count > 0
                  ? std::sqrt(node.wcss / static_cast<double>(node.object_count))
                  : 0.0;
}

void fill_coefficients(std::vector<ClusterNode>& nodes) {
  std::vector<double> level_total;
  for (const auto& node : nodes) {
    if (level_total.size() <= node.level) {
      level_total.resize(node.level + 1, 0.0);
    }
    level_total[node.level] += node.wcss;
  }
  for (auto& node : nodes) {
    const double total = level_total[node.level];
    node.coefficient = total > 0.0 ? node.wcss / total : 0.0;
  }
}

ClusterNode make_root(const Dataset& ds) {
  ClusterNode root;
  root.members.resize(ds.size());
  std::iota(root.members.begin(), root.members.end(), std::size_t{0});
  root.centroid = mean_of(ds, root.members);
  fill_node_stats(root, ds);
  return root;
}

} // namespace

ClusterTree build_hierarchy(const Dataset& ds, std::size_t m, std::size_t depth,
                            const HierarchyOptions& options) {
  if (m < 2) {
    throw Error("tree order m must be at least 2");
  }
  if (depth < 1) {
    throw Error("tree depth must be at least 1");
  }
  if (ds.empty()) {
    throw Error("cannot build a hierarchy over an empty dataset");
  }

  ClusterTree tree;
  tree.order = m;
  tree.depth = depth;
  tree.nodes.push_back(make_root(ds));

  // Nodes are expanded in id order and children appended, which numbers the
  // tree breadth-first.
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const ClusterNode node = tree.nodes[id];
    const std::size_t split = (id == 0 && options.root_order > 0) ? options.root_order : m;
    if (node.level >= depth || node.object_count < split || node.rmse == 0.0) {
      continue;
    }
    const Dataset members = ds.subset(node.members);
    const std::uint64_t seed = id == 0 ? options.seed : derive_seed(options.seed, id);
    const auto model = refine(kmeans(members, split, seed, options.kmeans), members, options.kmeans);

    for (std::size_t c = 0; c < model.k; ++c) {
      ClusterNode child;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (model.assignment[i] == c) {
          child.members.push_back(node.members[i]);
        }
      }
      if (child.members.empty()) {
        continue;
      }
      child.id = tree.nodes.size();
      child.level = node.level + 1;
      child.parent = id;
      child.centroid = model.centroids[c];
      fill_node_stats(child, ds);
      tree.nodes[id].children.push_back(child.id);
      tree.nodes.push_back(std::move(child));
    }
  }
  fill_coefficients(tree.nodes);
  return tree;
}

ClusterTree tree_from_model(const ClusterModel& model, const Dataset& ds) {
  if (model.assignment.size() != ds.size()) {
    throw Error("model was not built on this dataset");
  }
  ClusterTree tree;
  tree.order = model.k;
  tree.depth = 1;
  tree.nodes.push_back(make_root(ds));
  for (std::size_t c = 0; c < model.k; ++c) {
    ClusterNode child;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (model.assignment[i] == c) {
        child.members.push_back(i);
      }
    }
    if (child.members.empty()) {
      continue;
    }
    child.id = tree.nodes.size();
    child.level = 1;
    child.parent = 0;
    child.centroid = model.centroids[c];
    fill_node_stats(child, ds);
    tree.nodes[0].children.push_back(child.id);
    tree.nodes.push_back(std::move(child));
  }
  fill_coefficients(tree.nodes);
  return tree;
}

ClusterStats cluster_stats(const ClusterTree& tree, const Dataset& ds) {
  std::vector<ClusterNode> nodes;
  nodes.reserve(tree.nodes.size());
  for (const auto& src : tree.nodes) {
    if (src.members.empty()) {
      continue;
    }
    for (std::size_t i : src.members) {
      if (i >= ds.size()) {
        throw Error("tree references a point outside the dataset");
      }
    }
    ClusterNode node;
    node.id = src.id;
    node.level = src.level;
    node.parent = src.parent;
    node.centroid = src.centroid;
    node.members = src.members;
    fill_node_stats(node, ds);
    nodes.push_back(std::move(node));
  }
  fill_coefficients(nodes);

  ClusterStats rows;
  rows.reserve(nodes.size());
  for (const auto& node : nodes) {
    rows.push_back({node.level, node.id, node.parent, node.object_count, node.rmse,
                    node.coefficient});
  }
  std::sort(rows.begin(), rows.end(), [](const ClusterStatsRow& a, const ClusterStatsRow& b) {
    return std::tie(a.level, a.cluster_id) < std::tie(b.level, b.cluster_id);
  });
  return rows;
}

ClusterStats model_stats(const ClusterModel& model, const Dataset& ds) {
  const auto tree = tree_from_model(model, ds);
  // Map node ids back to model cluster ids: children were created in cluster order.
  std::vector<std::size_t> cluster_of_node(tree.nodes.size(), 0);
  {
    const auto sizes = model.cluster_sizes();
    std::size_t node = 1;
    for (std::size_t c = 0; c < model.k; ++c) {
      if (sizes[c] > 0) {
        cluster_of_node[node++] = c;
      }
    }
  }
  ClusterStats rows;
  for (const auto& row : cluster_stats(tree, ds)) {
    if (row.level == 0) {
      continue;
    }
    auto copy = row;
    copy.cluster_id = cluster_of_node[row.cluster_id];
    rows.push_back(copy);
  }
  return rows;
}

void write_stats_csv(std::ostream& out, const ClusterStats& stats) {
  out << "level,cluster_id,parent_id,object_count,rmse,coefficient\n";
  for (const auto& row : stats) {
    out << row.level << ',' << row.cluster_id << ',';
    if (row.parent) {
      out << *row.parent;
    } else {
      out << "-1";
    }
    out << ',' << row.object_count << ',' << csv::format_real(row.rmse) << ','
        << csv::format_real(row.coefficient) << '\n';
  }
}

void write_assignments_csv(std::ostream& out, const ClusterTree& tree, const Dataset& ds) {
  out << "point_id,level,cluster_id\n";
  std::vector<const ClusterNode*> ordered;
  for (const auto& node : tree.nodes) {
    if (node.level > 0) {
      ordered.push_back(&node);
    }
  }
  // Group by level, then by point index within the level.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_level(tree.levels());
  for (const auto* node : ordered) {
    for (std::size_t i : node->members) {
      per_level[node->level].emplace_back(i, node->id);
    }
  }
  for (std::size_t level = 1; level < per_level.size(); ++level) {
    auto& rows = per_level[level];
    std::sort(rows.begin(), rows.end());
    for (const auto& [point, cluster] : rows) {
      out << csv::escape(ds[point].id) << ',' << level << ',' << cluster << '\n';
    }
  }
}

} // namespace daas::clustering
