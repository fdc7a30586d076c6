#include <gtest/gtest.h>

#include "daas/error.hpp"
#include "daas/parallel.hpp"
#include "daas/pipeline.hpp"
#include "test_support.hpp"

namespace {

using namespace daas;
using namespace daas::pipeline;
using daas::testing::make_dataset;
using daas::testing::TempDir;
using daas::testing::write_text;

clustering::ClusterStatsRow row(std::size_t id, std::size_t count, double rmse) {
  clustering::ClusterStatsRow r;
  r.level = 1;
  r.cluster_id = id;
  r.object_count = count;
  r.rmse = rmse;
  return r;
}

TEST(UpdatePlane, EmptyStatePlusDataset) {
  const auto ds = make_dataset({{0.1, 0.2}, {0.3, 0.4}});
  const auto s = update_plane({}, "a", ds, 1e-6);
  EXPECT_EQ(s.version, 1u);
  EXPECT_EQ(s.point_count(), 2u);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.pooled()[1].features, (std::vector<double>{0.3, 0.4}));
}

TEST(UpdatePlane, IdenticalReAddIsADuplicate) {
  const auto ds = make_dataset({{0.1, 0.2}, {0.3, 0.4}});
  auto s = update_plane({}, "a", ds, 1e-6);
  s = update_plane(s, "a", ds, 1e-6);
  EXPECT_EQ(s.version, 2u);
  EXPECT_EQ(s.point_count(), 2u);
  // Duplicate rule spans keys: same ids under another key still replace.
  s = update_plane(s, "b", ds, 1e-6);
  EXPECT_EQ(s.point_count(), 2u);
}

TEST(UpdatePlane, ReplaceVersusRetain) {
  auto s = update_plane({}, "a", make_dataset({{0.0, 0.0}}), 0.1);
  // Same id, within epsilon: replaced in place.
  s = update_plane(s, "a", make_dataset({{0.05, 0.0}}), 0.1);
  ASSERT_EQ(s.point_count(), 1u);
  EXPECT_EQ(s.pooled()[0].features[0], 0.05);
  // Same id, beyond epsilon: both retained.
  s = update_plane(s, "a", make_dataset({{0.5, 0.0}}), 0.1);
  ASSERT_EQ(s.point_count(), 2u);
  EXPECT_EQ(s.pooled()[0].features[0], 0.05);
  EXPECT_EQ(s.pooled()[1].features[0], 0.5);
  EXPECT_EQ(s.version, 3u);
}

TEST(UpdatePlane, DimensionMismatchRejected) {
  const auto s = update_plane({}, "a", make_dataset({{0.0, 0.0}}), 0.1);
  EXPECT_THROW(update_plane(s, "b", make_dataset({{0.0}}), 0.1), daas::Error);
  EXPECT_THROW(update_plane(s, "b", make_dataset({{0.0, 0.0}}), -1.0), daas::Error);
}

TEST(SelectBestSet, Ordering) {
  const std::vector<clustering::ClusterStatsRow> single{row(0, 5, 0.2)};
  EXPECT_EQ(select_best_set(single, 1).size(), 1u);

  const std::vector<clustering::ClusterStatsRow> rows{row(0, 5, 0.5), row(1, 5, 0.1), row(2, 5, 0.3)};
  const auto sel = select_best_set(rows, 2);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].cluster_id, 1u);
  EXPECT_EQ(sel[1].cluster_id, 2u);

  const std::vector<clustering::ClusterStatsRow> ties{row(0, 2, 0.1), row(1, 7, 0.1), row(2, 7, 0.1)};
  const auto t = select_best_set(ties, 3);
  EXPECT_EQ(t[0].cluster_id, 1u);
  EXPECT_EQ(t[1].cluster_id, 2u);
  EXPECT_EQ(t[2].cluster_id, 0u);

  const std::vector<clustering::ClusterStatsRow> empty{row(0, 0, 0.0), row(1, 0, 0.0)};
  EXPECT_TRUE(select_best_set(empty, 2).empty());
}

struct Fixture : ::testing::Test {
  TempDir dir{"pipeline"};

  DataDemand demand(const std::string& id, const std::string& csv) {
    const auto path = dir / (id + ".csv");
    write_text(path, csv);
    return DataDemand{id, path, {}};
  }
};

using PipelineRun = Fixture;

TEST_F(PipelineRun, ZeroServices) {
  const std::vector<DataDemand> demands{demand("d", "id,x\na,0\nb,1\n")};
  const auto report = run(demands, {}, {});
  EXPECT_TRUE(report.outcomes.empty());
  EXPECT_EQ(report.totals.demands_ingested, 1u);
  EXPECT_EQ(report.totals.plane_points, 2u);
  EXPECT_EQ(report.totals.plane_version, 1u);
}

TEST_F(PipelineRun, SeparablePointsGiveSingletons) {
  const std::vector<DataDemand> demands{demand("d", "id,x,y\na,0,0\nb,10,0\nc,0,10\n")};
  const std::vector<ServiceRequest> services{{"s", 3, 3, std::nullopt}};
  const auto report = run(demands, services, {});
  ASSERT_EQ(report.outcomes.size(), 1u);
  const auto& o = report.outcomes[0];
  EXPECT_TRUE(o.accommodated);
  ASSERT_EQ(o.selected.size(), 3u);
  for (const auto& r : o.selected) {
    EXPECT_EQ(r.object_count, 1u);
    EXPECT_EQ(r.rmse, 0.0);
  }
  // Centroids coincide with normalized points but carry new ids, so the plane grows.
  EXPECT_EQ(report.totals.plane_points, 6u);
  EXPECT_EQ(report.totals.plane_version, 2u);
}

TEST_F(PipelineRun, IngestionErrorsStayLocal) {
  const std::vector<DataDemand> demands{demand("good", "id,x\na,0\nb,1\n"),
                                        demand("bad", "id,x\na,zz\n"),
                                        DataDemand{"missing", dir / "nope.csv", {}}};
  const std::vector<ServiceRequest> services{{"s", 2, 1, std::nullopt}};
  const auto report = run(demands, services, {});
  EXPECT_EQ(report.totals.demands_ingested, 1u);
  EXPECT_EQ(report.totals.demands_failed, 2u);
  EXPECT_FALSE(report.demands[1].ok);
  EXPECT_NE(report.demands[1].error.find("row"), std::string::npos);
  EXPECT_TRUE(report.outcomes[0].accommodated);
}

TEST_F(PipelineRun, InfeasibleSlaDoesNotStopOthers) {
  const std::vector<DataDemand> demands{demand("d", "id,x\na,0\nb,0.1\nc,5\nd,5.2\n")};
  slaopt::AllocationProblem tight{{{3, 1, 1, 1}, {2, 1, 1, 1}}, 5};  // needs 4 + 3
  slaopt::AllocationProblem loose{{{1, 1, 1, 1}}, 4};
  const std::vector<ServiceRequest> services{{"tight", 2, 1, tight}, {"loose", 2, 1, loose}};
  const auto report = run(demands, services, {});
  ASSERT_EQ(report.outcomes.size(), services.size());
  EXPECT_FALSE(report.outcomes[0].accommodated);
  EXPECT_TRUE(report.outcomes[1].accommodated);
  EXPECT_EQ(report.totals.services_infeasible, 1u);
  EXPECT_EQ(report.totals.services_accommodated, 1u);

  const auto j = report_to_json(report);
  EXPECT_EQ(j["outcomes"][0]["status"], std::string(kInfeasibleMarker));
  EXPECT_EQ(j["outcomes"][0]["sla"]["infeasible"]["required"], 7);
  EXPECT_EQ(j["outcomes"][1]["status"], "accommodated");
  EXPECT_EQ(j["outcomes"][1]["sla"]["n"][0], 4);
}

TEST_F(PipelineRun, KTooLargeIsInfeasibleNotFatal) {
  const std::vector<DataDemand> demands{demand("d", "id,x\na,0\nb,1\n")};
  const std::vector<ServiceRequest> services{{"big", 5, 1, std::nullopt}, {"ok", 1, 1, std::nullopt}};
  const auto report = run(demands, services, {});
  EXPECT_FALSE(report.outcomes[0].accommodated);
  EXPECT_TRUE(report.outcomes[1].accommodated);
}

TEST_F(PipelineRun, EmptyPlaneIsInfeasible) {
  const std::vector<ServiceRequest> services{{"s", 1, 1, std::nullopt}};
  const auto report = run({}, services, {});
  EXPECT_FALSE(report.outcomes[0].accommodated);
}

TEST_F(PipelineRun, DeterministicAcrossWorkerCounts) {
  std::string csv = "id,x,y\n";
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 600; ++i) {
    csv += "p" + std::to_string(i) + "," + std::to_string(u(rng)) + "," + std::to_string(u(rng)) + "\n";
  }
  const std::vector<DataDemand> demands{demand("a", csv), demand("b", csv)};
  const std::vector<ServiceRequest> services{{"s1", 4, 2, std::nullopt}, {"s2", 6, 3, std::nullopt}};
  PipelineConfig config;
  config.seed = 17;

  parallel::set_max_workers(1);
  const auto one = report_to_json(run(demands, services, config)).dump();
  parallel::set_max_workers(8);
  const auto eight = report_to_json(run(demands, services, config)).dump();
  parallel::set_max_workers(0);
  EXPECT_EQ(one, eight);
}

TEST(ParseInput, ReadsDocument) {
  const auto j = nlohmann::json::parse(R"({
    "demands": [{"id": "d", "source": "data/x.csv", "schema": {"id": "key", "features": ["a"]}}],
    "services": [{"id": "s", "k": 3}, {"id": "t", "k": 2, "budget": 1,
                  "sla": {"N": 4, "classes": [{"lambda": 1, "mu": 1, "b": 1, "R": 1}]}}],
    "seed": 9, "epsilon": 0.5})");
  const auto in = parse_input(j, "/base");
  EXPECT_EQ(in.demands[0].source, std::filesystem::path("/base/data/x.csv"));
  EXPECT_EQ(in.demands[0].schema.id_column, "key");
  EXPECT_EQ(in.services[0].selection_budget, 3u);
  EXPECT_FALSE(in.services[0].sla.has_value());
  EXPECT_EQ(in.services[1].sla->servers, 4);
  EXPECT_EQ(in.config.seed, 9u);
  EXPECT_EQ(in.config.epsilon, 0.5);

  EXPECT_THROW(parse_input(nlohmann::json::parse(R"({"demands": []})"), "/"), daas::Error);
}

} // namespace
