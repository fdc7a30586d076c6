#ifndef DAAS_PIPELINE_HPP
#define DAAS_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "daas/clustering.hpp"
#include "daas/datamodel.hpp"
#include "daas/hierarchy.hpp"
#include "daas/slaopt.hpp"

namespace daas::pipeline {

/// Marker recorded for a service that could not be accommodated.
inline constexpr std::string_view kInfeasibleMarker = "InfeasibleSolution_Data";

struct DataDemand {
  std::string id;
  std::filesystem::path source;
  Schema schema;
};

struct ServiceRequest {
  std::string id;
  std::size_t k = 1;
  std::size_t selection_budget = 1;
  std::optional<slaopt::AllocationProblem> sla;
};

struct PlaneEntry {
  std::string key;
  Dataset data;
};

/**
 * Accumulated normalized data. Entries keep insertion order and the pooled
 * view concatenates them, so the pooled point order is stable across updates.
 */
struct PlaneState {
  std::vector<PlaneEntry> entries;
  std::uint64_t version = 0;

  std::size_t point_count() const;
  /// 0 while empty.
  std::size_t dim() const;
  Dataset pooled() const;
};

/**
 * Adds `ds` under `key`. A new point whose id matches an existing point and
 * whose features lie within `epsilon` of it replaces that point in place;
 * every other new point is appended.
 */
PlaneState update_plane(const PlaneState& state, std::string_view key, const Dataset& ds,
                        double epsilon);

/**
 * Best clusters by ascending rmse, then larger object_count, then lower id.
 * Empty clusters are never selected.
 */
clustering::ClusterStats select_best_set(std::span<const clustering::ClusterStatsRow> candidates,
                                         std::size_t budget);

struct DemandOutcome {
  std::string id;
  bool ok = false;
  std::string error;
  std::size_t points = 0;
};

struct ServiceOutcome {
  std::string service_id;
  bool accommodated = false;
  std::string reason;
  clustering::ClusterStats stats;
  clustering::ClusterStats selected;
  std::optional<slaopt::AllocationResult> sla;
  /// (point id, cluster id) over the pooled data the service was clustered on.
  std::vector<std::pair<std::string, std::size_t>> assignments;
};

struct Totals {
  std::size_t demands_ingested = 0;
  std::size_t demands_failed = 0;
  std::size_t services_accommodated = 0;
  std::size_t services_infeasible = 0;
  std::size_t clusters_selected = 0;
  std::size_t plane_points = 0;
  std::uint64_t plane_version = 0;
  double sla_objective = 0.0;
};

struct PipelineReport {
  std::vector<DemandOutcome> demands;
  std::vector<ServiceOutcome> outcomes;
  Totals totals;
};

struct PipelineConfig {
  double epsilon = 1e-9;
  std::uint64_t seed = 0;
  clustering::KmeansOptions kmeans;
};

/**
 * Ingest and normalize every demand into the plane, then for each service
 * cluster the pooled plane, select the best clusters and either accommodate
 * them (solving the SLA allocation when one is attached, then feeding the
 * selected centroids back into the plane) or mark the service infeasible.
 */
PipelineReport run(std::span<const DataDemand> demands, std::span<const ServiceRequest> services,
                   const PipelineConfig& config);

struct PipelineInput {
  std::vector<DataDemand> demands;
  std::vector<ServiceRequest> services;
  PipelineConfig config;
};

/// Parses the pipeline JSON document; relative sources resolve against base_dir.
PipelineInput parse_input(const nlohmann::json& j, const std::filesystem::path& base_dir);

nlohmann::json report_to_json(const PipelineReport& report);

} // namespace daas::pipeline

#endif
