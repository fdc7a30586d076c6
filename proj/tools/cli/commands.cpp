#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/artifacts.hpp"
#include "daas/clustering.hpp"
#include "daas/csv.hpp"
#include "daas/datamodel.hpp"
#include "daas/error.hpp"
#include "daas/hierarchy.hpp"
#include "daas/parallel.hpp"
#include "daas/pipeline.hpp"
#include "daas/slaopt.hpp"
#include "daas/som.hpp"

namespace daas::cli {

namespace {

namespace fs = std::filesystem;

// Missing files and unparseable documents; mapped to kExitInput.
class InputError : public Error {
public:
  using Error::Error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out = ".";
  bool out_given = false;
};

struct DataOptions {
  std::string input;
  std::string id_column = "id";
  std::vector<std::string> features;
  bool raw = false;
};

void add_data_options(CLI::App& cmd, DataOptions& opts) {
  cmd.add_option("input,--input", opts.input, "CSV file with a header row")->required();
  cmd.add_option("--id-column", opts.id_column, "Name of the id column")->capture_default_str();
  cmd.add_option("--features", opts.features, "Feature columns (default: all but the id)")
      ->delimiter(',');
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open input file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json(const std::string& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

Dataset load_dataset(const DataOptions& opts, bool normalize_data) {
  std::istringstream in(read_file(opts.input));
  Dataset ds;
  try {
    ds = ingest_csv(in, Schema{opts.id_column, opts.features});
  } catch (const ParseError& e) {
    throw InputError(opts.input + ": " + e.what());
  }
  return normalize_data ? normalize(ds) : ds;
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

// --- ingest -----------------------------------------------------------------

struct IngestOptions {
  DataOptions data;
  bool normalize = false;
};

void ingest_cmd(const IngestOptions& opts, const GlobalOptions& global, std::ostream& out) {
  const Dataset ds = load_dataset(opts.data, opts.normalize);
  ArtifactSet artifacts;
  artifacts.add("dataset.csv", to_csv(ds));
  if (ds.normalized()) {
    nlohmann::json ranges = nlohmann::json::array();
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      ranges.push_back({{"feature", ds.feature_names()[j]},
                        {"min", ds.ranges()[j].min},
                        {"max", ds.ranges()[j].max}});
    }
    artifacts.add("normalization.json", nlohmann::json{{"ranges", ranges}}.dump(2) + "\n");
  }
  artifacts.commit(global.out);
  out << "ingested " << ds.size() << " points of dimension " << ds.dim() << '\n';
}

// --- cluster ----------------------------------------------------------------

struct ClusterOptions {
  DataOptions data;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t depth = 1;
  std::size_t max_iter = clustering::KmeansOptions{}.max_iter;
  double tol = clustering::KmeansOptions{}.tol;
};

void cluster_cmd(const ClusterOptions& opts, const GlobalOptions& global, std::ostream& out) {
  const Dataset ds = load_dataset(opts.data, !opts.data.raw);
  if (opts.k < 1 || opts.k > ds.size()) {
    throw Error("k = " + std::to_string(opts.k) + " must lie in [1, " +
                std::to_string(ds.size()) + "]");
  }
  const std::size_t m = opts.m == 0 ? opts.k : opts.m;
  clustering::HierarchyOptions hopts;
  hopts.seed = global.seed;
  hopts.kmeans = {opts.max_iter, opts.tol};
  hopts.root_order = opts.k;
  // A single split of order 1 is a valid flat run; the tree itself needs m >= 2.
  const auto tree = clustering::build_hierarchy(ds, std::max<std::size_t>(m, 2), opts.depth, hopts);
  const auto stats = clustering::cluster_stats(tree, ds);

  ArtifactSet artifacts;
  artifacts.add("assignments.csv",
                render([&](std::ostream& o) { clustering::write_assignments_csv(o, tree, ds); }));
  artifacts.add("stats.csv", render([&](std::ostream& o) { clustering::write_stats_csv(o, stats); }));
  for (std::size_t level = 1; level < tree.levels(); ++level) {
    std::ostringstream plot;
    plot << "cluster_id,coefficient,object_count,rmse\n";
    for (const auto& row : stats) {
      if (row.level == level) {
        plot << row.cluster_id << ',' << csv::format_real(row.coefficient) << ','
             << row.object_count << ',' << csv::format_real(row.rmse) << '\n';
      }
    }
    artifacts.add("plot_level" + std::to_string(level) + ".csv", plot.str());
  }
  artifacts.commit(global.out);
  out << "clustered " << ds.size() << " points into " << tree.nodes.size() - 1
      << " clusters over " << tree.levels() - 1 << " level(s)\n";
}

// --- som --------------------------------------------------------------------

struct SomOptions {
  DataOptions data;
  std::size_t rows = 20;
  std::size_t cols = 20;
  std::string topology = "hexagonal";
  som::SomParams params;
};

void som_cmd(SomOptions opts, const GlobalOptions& global, std::ostream& out) {
  const auto topology = som::parse_topology(opts.topology);
  if (!topology) {
    throw Error("unknown topology '" + opts.topology + "'; expected one of {hexagonal, grid}");
  }
  opts.params.seed = global.seed;
  opts.params.validate();
  const Dataset ds = load_dataset(opts.data, !opts.data.raw);
  const auto lattice = som::build_lattice(opts.rows, opts.cols, *topology);
  const auto model = som::train(ds, lattice, opts.params);
  const auto umatrix = som::u_matrix(model);

  ArtifactSet artifacts;
  artifacts.add("som_model.csv", render([&](std::ostream& o) { som::write_model_csv(o, model); }));
  artifacts.add("u_matrix.csv",
                render([&](std::ostream& o) { som::write_u_matrix_csv(o, model, umatrix); }));
  artifacts.add("som_params.json", som::params_json(model));
  artifacts.commit(global.out);
  out << "trained " << opts.rows << "x" << opts.cols << " " << som::to_string(*topology)
      << " map, quantization error " << csv::format_real(model.final_qe) << '\n';
}

// --- allocate / availability -----------------------------------------------

struct AllocateOptions {
  std::string problem;
  bool oracle = false;
};

bool same_result(const slaopt::AllocationResult& a, const slaopt::AllocationResult& b) {
  if (a.index() != b.index()) {
    return false;
  }
  if (const auto* x = std::get_if<slaopt::Allocation>(&a)) {
    const auto& y = std::get<slaopt::Allocation>(b);
    return std::abs(x->objective - y.objective) <= 1e-9;
  }
  return std::get<slaopt::Infeasible>(a).required == std::get<slaopt::Infeasible>(b).required;
}

int allocate_cmd(const AllocateOptions& opts, const GlobalOptions& global, std::ostream& out) {
  const auto doc = read_json(opts.problem);
  slaopt::AllocationProblem problem;
  try {
    problem = slaopt::problem_from_json(doc);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const auto result = slaopt::optimize_greedy(problem);
  const std::string text = slaopt::result_to_json(result).dump() + "\n";
  bool agree = true;
  if (opts.oracle) {
    agree = same_result(result, slaopt::optimize_bruteforce(problem));
  }
  if (global.out_given) {
    ArtifactSet artifacts;
    artifacts.add("allocation.json", text);
    artifacts.commit(global.out);
  }
  out << text;
  if (opts.oracle) {
    out << "agreement: " << (agree ? "true" : "false") << '\n';
  }
  return agree ? kExitOk : kExitFailure;
}

void availability_cmd(const std::string& path, const GlobalOptions& global, std::ostream& out) {
  const auto doc = read_json(path);
  slaopt::AvailabilityModel model;
  try {
    model = slaopt::availability_from_json(doc);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const std::string text = nlohmann::json{{"availability", slaopt::availability(model)}}.dump() + "\n";
  if (global.out_given) {
    ArtifactSet artifacts;
    artifacts.add("availability.json", text);
    artifacts.commit(global.out);
  }
  out << text;
}

// --- pipeline ---------------------------------------------------------------

std::string file_stem_for(const std::string& id) {
  std::string stem;
  for (char c : id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    stem.push_back(safe ? c : '_');
  }
  return stem.empty() ? "service" : stem;
}

void pipeline_cmd(const std::string& config_path, const GlobalOptions& global, std::ostream& out) {
  const auto doc = read_json(config_path);
  pipeline::PipelineInput input;
  try {
    input = pipeline::parse_input(doc, fs::path(config_path).parent_path());
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  if (!doc.contains("seed")) {
    input.config.seed = global.seed;
  }
  const auto report = pipeline::run(input.demands, input.services, input.config);

  ArtifactSet artifacts;
  artifacts.add("report.json", pipeline::report_to_json(report).dump(2) + "\n");
  for (std::size_t s = 0; s < report.outcomes.size(); ++s) {
    const auto& outcome = report.outcomes[s];
    if (outcome.stats.empty()) {
      continue;
    }
    const std::string stem = std::to_string(s) + "_" + file_stem_for(outcome.service_id);
    artifacts.add(stem + "_stats.csv",
                  render([&](std::ostream& o) { clustering::write_stats_csv(o, outcome.stats); }));
    std::ostringstream assign;
    assign << "point_id,level,cluster_id\n";
    for (const auto& [id, cluster] : outcome.assignments) {
      assign << csv::escape(id) << ",1," << cluster << '\n';
    }
    artifacts.add(stem + "_assignments.csv", assign.str());
  }
  artifacts.commit(global.out);
  out << "services: " << report.totals.services_accommodated << " accommodated, "
      << report.totals.services_infeasible << " infeasible\n";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"daas: clustering, SOM and SLA allocation analytics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", global.threads, "Worker cap (0 = hardware default)")
      ->capture_default_str();
  auto* out_opt = app.add_option("--out", global.out, "Output directory")->capture_default_str();

  IngestOptions ingest;
  auto* ingest_app = app.add_subcommand("ingest", "Read a CSV and re-emit it, optionally normalized");
  add_data_options(*ingest_app, ingest.data);
  ingest_app->add_flag("--normalize", ingest.normalize, "Min-max scale features to [0, 1]");

  ClusterOptions cluster;
  auto* cluster_app = app.add_subcommand("cluster", "k-means clustering with an optional hierarchy");
  add_data_options(*cluster_app, cluster.data);
  cluster_app->add_flag("--raw", cluster.data.raw, "Skip min-max normalization");
  cluster_app->add_option("-k,--k", cluster.k, "Clusters in the first split")->required();
  cluster_app->add_option("-m,--m", cluster.m, "Tree order below the first split (default: k)");
  cluster_app->add_option("--depth", cluster.depth, "Levels below the root")->capture_default_str();
  cluster_app->add_option("--max-iter", cluster.max_iter)->capture_default_str();
  cluster_app->add_option("--tol", cluster.tol)->capture_default_str();

  SomOptions somopts;
  auto* som_app = app.add_subcommand("som", "Train a self-organizing map");
  add_data_options(*som_app, somopts.data);
  som_app->add_flag("--raw", somopts.data.raw, "Skip min-max normalization");
  som_app->add_option("--rows", somopts.rows)->capture_default_str();
  som_app->add_option("--cols", somopts.cols)->capture_default_str();
  som_app->add_option("--topology", somopts.topology, "hexagonal or grid")->capture_default_str();
  som_app->add_option("--iterations", somopts.params.iterations)->capture_default_str();
  som_app->add_option("--radius-start", somopts.params.radius_start)->capture_default_str();
  som_app->add_option("--radius-end", somopts.params.radius_end)->capture_default_str();
  som_app->add_option("--lr-start", somopts.params.learning_rate_start)->capture_default_str();
  som_app->add_option("--lr-end", somopts.params.learning_rate_end)->capture_default_str();

  AllocateOptions allocate;
  auto* allocate_app = app.add_subcommand("allocate", "Solve an SLA server allocation problem");
  allocate_app->add_option("problem,--problem", allocate.problem, "Problem JSON")->required();
  allocate_app->add_flag("--oracle", allocate.oracle, "Cross-check against brute force");

  std::string availability_path;
  auto* availability_app = app.add_subcommand("availability", "Evaluate scenario availability");
  availability_app->add_option("model,--model", availability_path, "Scenario JSON")->required();

  std::string pipeline_path;
  auto* pipeline_app = app.add_subcommand("pipeline", "Run demands and services end to end");
  pipeline_app->add_option("config,--config", pipeline_path, "Pipeline JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  global.out_given = out_opt->count() > 0;
  parallel::set_max_workers(global.threads);

  try {
    if (*ingest_app) {
      ingest_cmd(ingest, global, out);
    } else if (*cluster_app) {
      cluster_cmd(cluster, global, out);
    } else if (*som_app) {
      som_cmd(somopts, global, out);
    } else if (*allocate_app) {
      return allocate_cmd(allocate, global, out);
    } else if (*availability_app) {
      availability_cmd(availability_path, global, out);
    } else if (*pipeline_app) {
      pipeline_cmd(pipeline_path, global, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

} // namespace daas::cli
