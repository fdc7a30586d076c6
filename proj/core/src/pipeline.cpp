#include "daas/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>
#include <unordered_map>

#include "daas/error.hpp"
#include "daas/parallel.hpp"
#include "daas/random.hpp"

namespace daas::pipeline {

std::size_t PlaneState::point_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    n += e.data.size();
  }
  return n;
}

std::size_t PlaneState::dim() const {
  for (const auto& e : entries) {
    if (!e.data.empty()) {
      return e.data.dim();
    }
  }
  return 0;
}

Dataset PlaneState::pooled() const {
  std::vector<DataPoint> points;
  points.reserve(point_count());
  std::vector<std::string> names;
  std::string id_name = "id";
  for (const auto& e : entries) {
    if (names.empty() && !e.data.empty()) {
      names = e.data.feature_names();
      id_name = e.data.id_name();
    }
    points.insert(points.end(), e.data.points().begin(), e.data.points().end());
  }
  return Dataset(std::move(points), std::move(names), std::move(id_name));
}

PlaneState update_plane(const PlaneState& state, std::string_view key, const Dataset& ds,
                        double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw Error("plane merge tolerance epsilon must be non-negative");
  }
  const std::size_t dim = state.dim();
  if (dim != 0 && !ds.empty() && ds.dim() != dim) {
    throw Error("dataset dimension " + std::to_string(ds.dim()) +
                " does not match plane dimension " + std::to_string(dim));
  }

  std::vector<std::vector<DataPoint>> points;
  points.reserve(state.entries.size() + 1);
  std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> by_id;
  std::size_t target = state.entries.size();
  for (std::size_t e = 0; e < state.entries.size(); ++e) {
    points.push_back(state.entries[e].data.points());
    for (std::size_t i = 0; i < points[e].size(); ++i) {
      by_id[points[e][i].id].emplace_back(e, i);
    }
    if (state.entries[e].key == key) {
      target = e;
    }
  }
  if (target == state.entries.size()) {
    points.emplace_back();
  }

  const double eps2 = epsilon * epsilon;
  for (const auto& p : ds.points()) {
    bool replaced = false;
    if (const auto it = by_id.find(p.id); it != by_id.end()) {
      for (const auto& [e, i] : it->second) {
        if (squared_distance(points[e][i].features, p.features) <= eps2) {
          points[e][i].features = p.features;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) {
      points[target].push_back(p);
    }
  }

  PlaneState next;
  next.version = state.version + 1;
  for (std::size_t e = 0; e < state.entries.size(); ++e) {
    next.entries.push_back({state.entries[e].key, state.entries[e].data.with_points(std::move(points[e]))});
  }
  if (target == state.entries.size()) {
    next.entries.push_back({std::string(key), ds.with_points(std::move(points[target]))});
  }
  return next;
}

clustering::ClusterStats select_best_set(std::span<const clustering::ClusterStatsRow> candidates,
                                         std::size_t budget) {
  clustering::ClusterStats ranked;
  for (const auto& row : candidates) {
    if (row.object_count > 0) {
      ranked.push_back(row);
    }
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const clustering::ClusterStatsRow& a, const clustering::ClusterStatsRow& b) {
              if (a.rmse != b.rmse) {
                return a.rmse < b.rmse;
              }
              if (a.object_count != b.object_count) {
                return a.object_count > b.object_count;
              }
              return a.cluster_id < b.cluster_id;
            });
  if (ranked.size() > budget) {
    ranked.resize(budget);
  }
  return ranked;
}

namespace {

Dataset load_demand(const DataDemand& demand) {
  std::ifstream in(demand.source, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + demand.source.string());
  }
  return normalize(ingest_csv(in, demand.schema));
}

Dataset centroid_dataset(const ServiceRequest& service, const clustering::ClusterModel& model,
                         const clustering::ClusterStats& selected, const Dataset& like) {
  std::vector<DataPoint> points;
  for (const auto& row : selected) {
    points.push_back({service.id + "/cluster-" + std::to_string(row.cluster_id),
                      model.centroids[row.cluster_id]});
  }
  return Dataset(std::move(points), like.feature_names(), like.id_name());
}

void mark_infeasible(ServiceOutcome& outcome, std::string reason) {
  outcome.accommodated = false;
  outcome.reason = std::move(reason);
}

} // namespace

PipelineReport run(std::span<const DataDemand> demands, std::span<const ServiceRequest> services,
                   const PipelineConfig& config) {
  PipelineReport report;
  PlaneState plane;

  // Ingestion may run concurrently; commits happen in input order.
  std::vector<std::optional<Dataset>> loaded(demands.size());
  std::vector<std::string> errors(demands.size());
  parallel::for_blocks(demands.size(), 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        loaded[i] = load_demand(demands[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  });
  for (std::size_t i = 0; i < demands.size(); ++i) {
    DemandOutcome outcome{demands[i].id, false, errors[i], 0};
    if (loaded[i]) {
      try {
        plane = update_plane(plane, demands[i].id, *loaded[i], config.epsilon);
        outcome.ok = true;
        outcome.points = loaded[i]->size();
      } catch (const Error& e) {
        outcome.error = e.what();
      }
    }
    ++(outcome.ok ? report.totals.demands_ingested : report.totals.demands_failed);
    report.demands.push_back(std::move(outcome));
  }

  for (std::size_t s = 0; s < services.size(); ++s) {
    const auto& service = services[s];
    ServiceOutcome outcome;
    outcome.service_id = service.id;

    const Dataset pooled = plane.pooled();
    if (pooled.empty()) {
      mark_infeasible(outcome, "no data in the plane");
    } else if (service.k < 1 || service.selection_budget < 1) {
      mark_infeasible(outcome, "k and selection budget must be at least 1");
    } else {
      try {
        const auto model = clustering::refine(
            clustering::kmeans(pooled, service.k, derive_seed(config.seed, s), config.kmeans),
            pooled, config.kmeans);
        outcome.stats = clustering::model_stats(model, pooled);
        for (std::size_t i = 0; i < pooled.size(); ++i) {
          outcome.assignments.emplace_back(pooled[i].id, model.assignment[i]);
        }
        outcome.selected = select_best_set(outcome.stats, service.selection_budget);

        if (outcome.selected.empty()) {
          mark_infeasible(outcome, "no non-empty cluster to select");
        } else {
          if (service.sla) {
            outcome.sla = slaopt::optimize_greedy(*service.sla);
          }
          if (outcome.sla && std::holds_alternative<slaopt::Infeasible>(*outcome.sla)) {
            const auto& inf = std::get<slaopt::Infeasible>(*outcome.sla);
            mark_infeasible(outcome, "SLA allocation needs " + std::to_string(inf.required) +
                                         " servers but the budget is " +
                                         std::to_string(inf.budget));
          } else {
            outcome.accommodated = true;
            if (outcome.sla) {
              report.totals.sla_objective += std::get<slaopt::Allocation>(*outcome.sla).objective;
            }
            plane = update_plane(plane, "service:" + service.id,
                                 centroid_dataset(service, model, outcome.selected, pooled),
                                 config.epsilon);
          }
        }
      } catch (const Error& e) {
        mark_infeasible(outcome, e.what());
      }
    }

    if (outcome.accommodated) {
      ++report.totals.services_accommodated;
      report.totals.clusters_selected += outcome.selected.size();
    } else {
      ++report.totals.services_infeasible;
    }
    report.outcomes.push_back(std::move(outcome));
  }

  report.totals.plane_points = plane.point_count();
  report.totals.plane_version = plane.version;
  return report;
}

namespace {

Schema schema_from_json(const nlohmann::json& demand) {
  Schema schema;
  if (const auto it = demand.find("schema"); it != demand.end()) {
    schema.id_column = it->value("id", schema.id_column);
    schema.features = it->value("features", std::vector<std::string>{});
  }
  return schema;
}

} // namespace

PipelineInput parse_input(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  PipelineInput input;
  try {
    for (const auto& d : j.at("demands")) {
      DataDemand demand;
      demand.id = d.at("id").get<std::string>();
      demand.source = d.at("source").get<std::string>();
      if (demand.source.is_relative()) {
        demand.source = base_dir / demand.source;
      }
      demand.schema = schema_from_json(d);
      input.demands.push_back(std::move(demand));
    }
    for (const auto& s : j.at("services")) {
      ServiceRequest service;
      service.id = s.at("id").get<std::string>();
      service.k = s.at("k").get<std::size_t>();
      service.selection_budget = s.value("budget", service.k);
      if (const auto it = s.find("sla"); it != s.end() && !it->is_null()) {
        service.sla = slaopt::problem_from_json(*it);
      }
      input.services.push_back(std::move(service));
    }
    input.config.epsilon = j.value("epsilon", input.config.epsilon);
    input.config.seed = j.value("seed", input.config.seed);
    input.config.kmeans.max_iter = j.value("max_iter", input.config.kmeans.max_iter);
    input.config.kmeans.tol = j.value("tol", input.config.kmeans.tol);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed pipeline configuration: ") + e.what());
  }
  return input;
}

namespace {

nlohmann::json stats_row_json(const clustering::ClusterStatsRow& row) {
  return {{"cluster_id", row.cluster_id},
          {"level", row.level},
          {"object_count", row.object_count},
          {"rmse", row.rmse},
          {"coefficient", row.coefficient}};
}

} // namespace

nlohmann::json report_to_json(const PipelineReport& report) {
  nlohmann::json demands = nlohmann::json::array();
  for (const auto& d : report.demands) {
    nlohmann::json item = {{"id", d.id}, {"status", d.ok ? "ok" : "error"}, {"points", d.points}};
    if (!d.ok) {
      item["error"] = d.error;
    }
    demands.push_back(std::move(item));
  }

  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : report.outcomes) {
    nlohmann::json item = {{"service_id", o.service_id},
                           {"status", o.accommodated ? "accommodated" : std::string(kInfeasibleMarker)}};
    if (!o.reason.empty()) {
      item["reason"] = o.reason;
    }
    nlohmann::json selected = nlohmann::json::array();
    for (const auto& row : o.selected) {
      selected.push_back(stats_row_json(row));
    }
    item["selected"] = std::move(selected);
    item["sla"] = o.sla ? slaopt::result_to_json(*o.sla) : nlohmann::json(nullptr);
    outcomes.push_back(std::move(item));
  }

  const auto& t = report.totals;
  nlohmann::json totals = {{"demands_ingested", t.demands_ingested},
                           {"demands_failed", t.demands_failed},
                           {"services_accommodated", t.services_accommodated},
                           {"services_infeasible", t.services_infeasible},
                           {"clusters_selected", t.clusters_selected},
                           {"plane_points", t.plane_points},
                           {"plane_version", t.plane_version},
                           {"sla_objective", t.sla_objective}};
  return {{"demands", std::move(demands)}, {"outcomes", std::move(outcomes)}, {"totals", std::move(totals)}};
}

} // namespace daas::pipeline
