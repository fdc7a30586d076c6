#include "daas/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "daas/error.hpp"
#include "daas/parallel.hpp"
#include "daas/random.hpp"

namespace daas::clustering {

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t label : assignment) {
    ++sizes[label];
  }
  return sizes;
}

bool ClusterModel::has_empty_cluster() const {
  const auto sizes = cluster_sizes();
  return std::find(sizes.begin(), sizes.end(), 0) != sizes.end();
}

namespace {

void check_dims(const Dataset& ds, const Centroids& centroids) {
  if (centroids.empty()) {
    throw Error("at least one centroid is required");
  }
  for (const auto& c : centroids) {
    if (c.size() != ds.dim()) {
      throw Error("centroid dimension " + std::to_string(c.size()) +
                  " does not match data dimension " + std::to_string(ds.dim()));
    }
  }
}

// Per-block partial sums for one Lloyd update.
struct Accumulator {
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  double wcss = 0.0;
};

} // namespace

std::size_t nearest(std::span<const double> x, const Centroids& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Assignment assign(const Dataset& ds, const Centroids& centroids) {
  check_dims(ds, centroids);
  Assignment out;
  out.labels.assign(ds.size(), 0);
  out.wcss = parallel::reduce(
      ds.size(), 0.0,
      [&](std::size_t lo, std::size_t hi, double& acc) {
        for (std::size_t i = lo; i < hi; ++i) {
          const std::size_t c = nearest(ds.row(i), centroids);
          out.labels[i] = c;
          acc += squared_distance(ds.row(i), centroids[c]);
        }
      },
      [](double& lhs, const double& rhs) { lhs += rhs; });
  return out;
}

Centroids init_kmeanspp(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (k == 0) {
    throw Error("k must be at least 1");
  }
  if (k > n) {
    throw Error("k = " + std::to_string(k) + " exceeds the number of points (" +
                std::to_string(n) + ")");
  }

  // Visit candidates by id so the draw sequence is tied to ids, not rows.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds[a].id < ds[b].id; });

  Rng rng(seed);
  std::vector<char> chosen(n, 0);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  Centroids centroids;
  centroids.reserve(k);

  auto take = [&](std::size_t idx) {
    chosen[idx] = 1;
    centroids.emplace_back(ds[idx].features);
    const auto& c = centroids.back();
    parallel::for_blocks(n, parallel::kReductionBlock, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        min_d2[i] = chosen[i] ? 0.0 : std::min(min_d2[i], squared_distance(ds.row(i), c));
      }
    });
  };

  take(order[rng.below(n)]);
  while (centroids.size() < k) {
    const double total = parallel::sum(n, [&](std::size_t r) { return min_d2[order[r]]; });
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double w = min_d2[order[r]];
        if (w <= 0.0) {
          continue;
        }
        pick = order[r];
        cumulative += w;
        if (cumulative > target) {
          break;
        }
      }
    } else {
      // Every remaining point duplicates a chosen one: fall back to a uniform unchosen point.
      std::vector<std::size_t> rest;
      for (std::size_t r = 0; r < n; ++r) {
        if (!chosen[order[r]]) {
          rest.push_back(order[r]);
        }
      }
      pick = rest[rng.below(rest.size())];
    }
    take(pick);
  }
  return centroids;
}

LloydResult lloyd_step(const Dataset& ds, const Centroids& centroids) {
  check_dims(ds, centroids);
  const std::size_t k = centroids.size();
  const std::size_t d = ds.dim();

  LloydResult out;
  out.assignment.assign(ds.size(), 0);
  Accumulator init{std::vector<double>(k * d, 0.0), std::vector<std::size_t>(k, 0), 0.0};

  auto total = parallel::reduce(
      ds.size(), init,
      [&](std::size_t lo, std::size_t hi, Accumulator& acc) {
        for (std::size_t i = lo; i < hi; ++i) {
          const auto x = ds.row(i);
          const std::size_t c = nearest(x, centroids);
          out.assignment[i] = c;
          acc.wcss += squared_distance(x, centroids[c]);
          ++acc.counts[c];
          for (std::size_t j = 0; j < d; ++j) {
            acc.sums[c * d + j] += x[j];
          }
        }
      },
      [](Accumulator& lhs, const Accumulator& rhs) {
        for (std::size_t i = 0; i < lhs.sums.size(); ++i) {
          lhs.sums[i] += rhs.sums[i];
        }
        for (std::size_t i = 0; i < lhs.counts.size(); ++i) {
          lhs.counts[i] += rhs.counts[i];
        }
        lhs.wcss += rhs.wcss;
      });

  out.wcss = total.wcss;
  out.centroids = centroids;
  for (std::size_t c = 0; c < k; ++c) {
    if (total.counts[c] == 0) {
      continue;
    }
    const double count = static_cast<double>(total.counts[c]);
    for (std::size_t j = 0; j < d; ++j) {
      out.centroids[c][j] = total.sums[c * d + j] / count;
    }
  }
  return out;
}

ClusterModel kmeans_from(const Dataset& ds, Centroids start, std::uint64_t seed,
                         const KmeansOptions& options) {
  if (options.max_iter == 0) {
    throw Error("max_iter must be at least 1");
  }
  if (!(options.tol >= 0.0)) {
    throw Error("tol must be non-negative");
  }
  check_dims(ds, start);

  ClusterModel model;
  model.k = start.size();
  model.seed = seed;
  Centroids current = std::move(start);
  double previous = std::numeric_limits<double>::infinity();
  while (model.iterations_run < options.max_iter) {
    auto step = lloyd_step(ds, current);
    ++model.iterations_run;
    model.wcss_history.push_back(step.wcss);
    const bool moved = step.centroids != current;
    current = std::move(step.centroids);
    if (!moved || previous - step.wcss < options.tol) {
      break;
    }
    previous = step.wcss;
  }

  auto final_assignment = assign(ds, current);
  model.centroids = std::move(current);
  model.assignment = std::move(final_assignment.labels);
  model.wcss = final_assignment.wcss;
  return model;
}

ClusterModel kmeans(const Dataset& ds, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& options) {
  return kmeans_from(ds, init_kmeanspp(ds, k, seed), seed, options);
}

ClusterModel refine(const ClusterModel& model, const Dataset& ds, const KmeansOptions& options) {
  if (model.assignment.size() != ds.size()) {
    throw Error("model was not built on this dataset");
  }
  ClusterModel current = model;
  // Each productive round fills at least one cluster; the bound only guards
  // against Lloyd re-emptying clusters indefinitely.
  const std::size_t max_rounds = 4 * model.k + 8;
  for (std::size_t round = 0; round < max_rounds && current.has_empty_cluster(); ++round) {
    auto sizes = current.cluster_sizes();
    auto labels = current.assignment;
    auto centroids = current.centroids;
    std::vector<double> d2(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      d2[i] = squared_distance(ds.row(i), centroids[labels[i]]);
    }

    bool reseeded = false;
    for (std::size_t c = 0; c < current.k; ++c) {
      if (sizes[c] != 0) {
        continue;
      }
      std::size_t far = ds.size();
      double far_d2 = 0.0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (sizes[labels[i]] > 1 && d2[i] > far_d2) {
          far_d2 = d2[i];
          far = i;
        }
      }
      if (far == ds.size()) {
        continue;
      }
      centroids[c] = ds[far].features;
      --sizes[labels[far]];
      labels[far] = c;
      sizes[c] = 1;
      d2[far] = 0.0;
      reseeded = true;
    }
    if (!reseeded) {
      break;
    }

    auto resumed = kmeans_from(ds, std::move(centroids), current.seed, options);
    resumed.iterations_run += current.iterations_run;
    resumed.wcss_history.insert(resumed.wcss_history.begin(), current.wcss_history.begin(),
                                current.wcss_history.end());
    current = std::move(resumed);
  }
  return current;
}

double partition_wcss(const Dataset& ds, std::span<const std::size_t> labels) {
  if (labels.size() != ds.size()) {
    throw Error("label count does not match dataset size");
  }
  std::map<std::size_t, std::pair<Vector, std::size_t>> parts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& [sum, count] = parts[labels[i]];
    if (sum.empty()) {
      sum.assign(ds.dim(), 0.0);
    }
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      sum[j] += ds[i].features[j];
    }
    ++count;
  }
  for (auto& [label, part] : parts) {
    for (double& v : part.first) {
      v /= static_cast<double>(part.second);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    total += squared_distance(ds.row(i), parts.at(labels[i]).first);
  }
  return total;
}

namespace {

// Restricted growth strings: labels[i] <= max(labels[0..i)) + 1, so each
// set partition is visited exactly once.
void enumerate_partitions(const Dataset& ds, std::size_t k, std::size_t i, std::size_t used,
                          std::vector<std::size_t>& labels, Partition& best) {
  if (i == ds.size()) {
    const double w = partition_wcss(ds, labels);
    if (w < best.wcss) {
      best.wcss = w;
      best.labels = labels;
    }
    return;
  }
  const std::size_t limit = std::min(used + 1, k);
  for (std::size_t c = 0; c < limit; ++c) {
    labels[i] = c;
    enumerate_partitions(ds, k, i + 1, std::max(used, c + 1), labels, best);
  }
}

} // namespace

Partition brute_force_partition(const Dataset& ds, std::size_t k) {
  if (ds.empty()) {
    throw Error("brute-force partition needs at least one point");
  }
  if (ds.size() > kBruteForceMaxPoints) {
    throw Error("brute-force partition supports at most " +
                std::to_string(kBruteForceMaxPoints) + " points, got " +
                std::to_string(ds.size()));
  }
  if (k == 0 || k > kBruteForceMaxClusters) {
    throw Error("brute-force partition supports 1 <= k <= " +
                std::to_string(kBruteForceMaxClusters));
  }
  Partition best;
  best.wcss = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> labels(ds.size(), 0);
  enumerate_partitions(ds, k, 0, 0, labels, best);
  return best;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) {
    throw Error("labelings differ in length");
  }
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows;
  std::map<std::size_t, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : table) {
    index += pairs(count);
  }
  double sum_rows = 0.0;
  for (const auto& [key, count] : rows) {
    sum_rows += pairs(count);
  }
  double sum_cols = 0.0;
  for (const auto& [key, count] : cols) {
    sum_cols += pairs(count);
  }
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) {
    return 1.0;
  }
  return (index - expected) / (maximum - expected);
}

} // namespace daas::clustering
