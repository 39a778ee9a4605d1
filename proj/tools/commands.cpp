#include "commands.hpp"

#include "mlcd/error.hpp"
#include "mlcd/eval.hpp"
#include "mlcd/generate.hpp"
#include "mlcd/graph.hpp"
#include "mlcd/modularity.hpp"
#include "mlcd/nullmodels.hpp"
#include "mlcd/optimize.hpp"
#include "mlcd/parallel.hpp"
#include "mlcd/random.hpp"
#include "mlcd/scenario.hpp"
#include "mlcd/sweep.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace mlcd::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GraphInput {
  std::string input;
  std::vector<std::string> layer_files;
  std::string duplicates = "sum-halved";
  std::string restrict_to = "none";
};

void add_graph_options(CLI::App* cmd, GraphInput& in) {
  auto* edges = cmd->add_option("--input", in.input, "multi-layer edge list: layer u v [weight]");
  auto* files = cmd->add_option("--layer-files", in.layer_files, "one edge list per layer: u v [weight]");
  edges->excludes(files);
  cmd->add_option("--duplicates", in.duplicates, "repeated pair policy: sum-halved, sum, max")
      ->capture_default_str();
  cmd->add_option("--restrict", in.restrict_to, "node filter: none, active, cross-layer")->capture_default_str();
}

MultiLayerGraph load_graph(const GraphInput& in, std::ostream& err) {
  EdgeListOptions options;
  options.duplicates = parse_duplicate_policy(in.duplicates);
  MultiLayerGraph g;
  if (!in.input.empty()) {
    g = load_multilayer_edgelist(in.input, options);
  } else if (!in.layer_files.empty()) {
    g = load_layer_files(in.layer_files, options);
  } else {
    throw InputError("one of --input or --layer-files is required");
  }
  if (in.restrict_to == "none") return g;
  RestrictResult r;
  if (in.restrict_to == "active") {
    r = restrict_to_active_nodes(g);
  } else if (in.restrict_to == "cross-layer") {
    r = restrict_to_cross_layer_connected(g);
  } else {
    throw InputError(fmt::format("unknown --restrict '{}' (none, active, cross-layer)", in.restrict_to));
  }
  if (!r.removed_ids.empty()) fmt::print(err, "note: dropped {} nodes by --restrict {}\n", r.removed_ids.size(), in.restrict_to);
  return std::move(r.graph);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path));
  return out;
}

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << doc.dump(2) << '\n';
  } else {
    auto file = open_output(path);
    file << doc.dump(2) << '\n';
  }
}

json to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

KlVariant parse_kl_variant(const std::string& name) {
  if (name == "steepest") return KlVariant::Steepest;
  if (name == "node-order") return KlVariant::NodeOrder;
  throw InputError(fmt::format("unknown KL variant '{}' (steepest, node-order)", name));
}

std::vector<MeasureKind> parse_measures(const std::vector<std::string>& names) {
  std::vector<MeasureKind> out;
  for (const auto& name : names) out.push_back(parse_measure(name));
  return out;
}

// ---- detect ----

struct DetectArgs {
  GraphInput graph;
  std::string measure = "mnavrg";
  std::optional<int> k;
  std::optional<int> restarts;
  std::uint64_t seed = 0;
  std::string output;
  std::string summary;
  std::string init;
  std::string kl_variant = "steepest";
  double min_gain = 1e-10;
  int max_sweeps = 50;
  double restart_perturbation = 1.0;
};

void run_detect(const DetectArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
  const MultiLayerGraph g = load_graph(a.graph, err);
  OptimizeConfig cfg;
  cfg.measure = parse_measure(a.measure);
  cfg.restarts = a.restarts;
  cfg.seed = a.seed;
  cfg.min_gain = a.min_gain;
  cfg.max_sweeps = a.max_sweeps;
  cfg.known_k = a.k;
  cfg.kl_variant = parse_kl_variant(a.kl_variant);
  cfg.restart_perturbation = a.restart_perturbation;
  cfg.threads = threads;

  DetectResult result;
  std::string optimizer;
  if (a.k) {
    optimizer = "kl";
    const Partition init = a.init.empty() ? random_partition(g.n_nodes(), *a.k, derive_seed(a.seed, 1))
                                          : partition_for_graph(g, read_partition(a.init));
    result = kernighan_lin(g, cfg, init);
  } else {
    if (!a.init.empty()) throw InputError("--init requires --k");
    optimizer = "louvain";
    result = louvain(g, cfg);
  }

  auto file = open_output(a.output);
  write_partition(file, g, result.partition);

  const json summary = {{"schema", "mlcd.detect/1"},
                        {"measure", measure_name(cfg.measure)},
                        {"optimizer", optimizer},
                        {"seed", a.seed},
                        {"n_nodes", g.n_nodes()},
                        {"n_layers", g.n_layers()},
                        {"k_detected", result.k_detected},
                        {"score", result.score},
                        {"sweeps_used", result.sweeps_used},
                        {"restart_scores", result.restart_scores},
                        {"score_trace", result.score_trace}};
  if (!a.summary.empty()) emit_json(summary, a.summary, out);
}

// ---- select-null ----

struct SelectNullArgs {
  GraphInput graph;
  int boot = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string output;
  std::string boot_csv;
};

void run_select_null(const SelectNullArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
  const MultiLayerGraph g = load_graph(a.graph, err);
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  const LrtResult r = bootstrap_lrt(g, a.boot, a.seed, threads);
  const json doc = {{"schema", "mlcd.select_null/1"},
                    {"n_nodes", g.n_nodes()},
                    {"n_layers", g.n_layers()},
                    {"lambda1", r.lambda1},
                    {"lambda2", r.lambda2},
                    {"statistic", r.statistic},
                    {"df", r.df},
                    {"p_chi2", r.p_chi2},
                    {"p_boot", r.p_boot},
                    {"B", r.replicates},
                    {"alpha", a.alpha},
                    {"seed", a.seed},
                    {"recommended", r.p_boot < a.alpha ? "ID" : "SD"}};
  emit_json(doc, a.output, out);
  if (!a.boot_csv.empty()) {
    auto file = open_output(a.boot_csv);
    fmt::print(file, "replicate,statistic\n");
    for (std::size_t i = 0; i < r.boot_stats.size(); ++i) fmt::print(file, "{},{:.17g}\n", i, r.boot_stats[i]);
  }
}

// ---- simulate ----

struct SimulateArgs {
  std::string scenario;
  int reps = 1;
  std::uint64_t seed = 0;
  std::string outdir;
  std::optional<double> axis_value;
};

void run_simulate(const SimulateArgs& a, unsigned threads, std::ostream& out) {
  if (a.reps < 1) throw InputError("--reps must be at least 1");
  Scenario scenario = load_scenario(a.scenario);
  if (scenario.axis) {
    const double value = a.axis_value.value_or(scenario.axis_values.front());
    scenario = scenario.at_axis(value);
  } else if (a.axis_value) {
    throw InputError("--axis-value given but the scenario has no axis");
  }
  fs::create_directories(a.outdir);

  struct Rep {
    GeneratorSpec spec;
    SampleStats stats;
    Eigen::VectorXd layer_edges;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(a.reps));
  parallel_for(reps.size(), threads, [&](std::size_t r) {
    Rep& rep = reps[r];
    rep.spec = scenario.to_spec(derive_seed(a.seed, r));
    const Partition labels = sample_labels(rep.spec);
    const MultiLayerGraph g = sample_graph(labels, rep.spec, &rep.stats);
    rep.layer_edges = g.layer_totals() / 2.0;
    const std::string stem = fmt::format("rep_{:03}", r);
    {
      auto file = open_output((fs::path(a.outdir) / (stem + ".edges")).string());
      write_multilayer_edgelist(file, g);
    }
    auto truth = open_output((fs::path(a.outdir) / (stem + ".truth")).string());
    for (Index i = 0; i < rep.spec.n; ++i) fmt::print(truth, "{}\t{}\n", i, labels.labels[std::size_t(i)] + 1);
  });

  json manifest = {{"schema", "mlcd.simulate/1"},
                   {"scenario", scenario_to_json(scenario)},
                   {"seed", a.seed},
                   {"rho_rule", "rho solved so each layer's expected average degree is share * avg_degree"}};
  auto& list = manifest["replicates"] = json::array();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const std::string stem = fmt::format("rep_{:03}", r);
    std::vector<double> edges(reps[r].layer_edges.data(), reps[r].layer_edges.data() + reps[r].layer_edges.size());
    list.push_back({{"edges", stem + ".edges"},
                    {"truth", stem + ".truth"},
                    {"spec", spec_to_json(reps[r].spec)},
                    {"layer_edge_counts", edges},
                    {"clamped", reps[r].stats.clamped}});
  }
  emit_json(manifest, (fs::path(a.outdir) / "manifest.json").string(), out);
}

// ---- sweep ----

struct SweepArgs {
  std::string scenario;
  int reps = 20;
  std::vector<std::string> measures{"ng-agg", "mnavrg", "sdavrg", "sdlocal"};
  std::uint64_t seed = 0;
  std::string outdir;
  std::string optimizer = "louvain";
  std::optional<int> restarts;
  double perturb = 0.5;
  std::string kl_variant = "steepest";
  std::string nmi_variant = "mean";
};

void run_sweep_command(const SweepArgs& a, unsigned threads, std::ostream& out) {
  SweepSpec spec;
  spec.scenario = load_scenario(a.scenario);
  spec.reps = a.reps;
  spec.measures = parse_measures(a.measures);
  spec.seed = a.seed;
  spec.optimizer = parse_optimizer(a.optimizer);
  spec.restarts = a.restarts;
  spec.perturb_fraction = a.perturb;
  spec.kl_variant = parse_kl_variant(a.kl_variant);
  spec.nmi_variant = parse_nmi_variant(a.nmi_variant);
  spec.threads = threads;
  const SweepResult result = run_sweep(spec);

  fs::create_directories(a.outdir);
  {
    auto file = open_output((fs::path(a.outdir) / "replicates.csv").string());
    write_replicates_csv(file, result);
  }
  {
    auto file = open_output((fs::path(a.outdir) / "summary.csv").string());
    write_summary_csv(file, result);
  }
  const json manifest = {{"schema", "mlcd.sweep/1"},
                         {"scenario", scenario_to_json(spec.scenario)},
                         {"reps", a.reps},
                         {"measures", a.measures},
                         {"seed", a.seed},
                         {"optimizer", optimizer_name(spec.optimizer)},
                         {"perturb_fraction", a.perturb},
                         {"nmi_variant", nmi_variant_name(spec.nmi_variant)},
                         {"failed_runs", result.failed},
                         {"clamped_probabilities", result.clamped}};
  emit_json(manifest, (fs::path(a.outdir) / "manifest.json").string(), out);
}

// ---- eval ----

struct EvalArgs {
  std::string detected;
  std::string truth;
  std::string nmi_variant = "mean";
  std::string output;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const LabeledPartition detected = read_partition(a.detected);
  const LabeledPartition truth = read_partition(a.truth);
  std::unordered_map<std::string, int> truth_by_id;
  for (std::size_t i = 0; i < truth.node_ids.size(); ++i) truth_by_id[truth.node_ids[i]] = truth.communities[i] - 1;

  std::vector<int> d_labels, t_labels;
  std::size_t only_detected = 0;
  for (std::size_t i = 0; i < detected.node_ids.size(); ++i) {
    const auto it = truth_by_id.find(detected.node_ids[i]);
    if (it == truth_by_id.end()) {
      ++only_detected;
      continue;
    }
    d_labels.push_back(detected.communities[i] - 1);
    t_labels.push_back(it->second);
  }
  if (d_labels.empty()) throw InputError("the partitions share no node ids");
  const std::size_t only_truth = truth.node_ids.size() - d_labels.size();

  const Partition d = Partition::from_labels(std::move(d_labels)).compacted();
  const Partition t = Partition::from_labels(std::move(t_labels)).compacted();
  const EvalReport report = optimal_assignment(d, t, parse_nmi_variant(a.nmi_variant));
  const json doc = {{"schema", "mlcd.eval/1"},
                    {"nmi", report.nmi},
                    {"nmi_variant", a.nmi_variant},
                    {"n_nodes", d.size()},
                    {"unmatched_detected_nodes", only_detected},
                    {"unmatched_truth_nodes", only_truth},
                    {"k_detected", report.k_detected},
                    {"k_true", report.k_true},
                    {"agreement", report.agreement},
                    {"matching", report.matching},
                    {"exact_matching", report.exact_matching},
                    {"confusion", to_json(report.confusion)}};
  emit_json(doc, a.output, out);
}

// ---- degree-fit ----

struct DegreeFitArgs {
  GraphInput graph;
  std::string output;
  std::string summary;
};

void run_degree_fit(const DegreeFitArgs& a, std::ostream& out, std::ostream& err) {
  const MultiLayerGraph g = load_graph(a.graph, err);
  const DegreeFit fit = emit_degree_fit(g);
  auto file = open_output(a.output);
  write_degree_fit_csv(file, fit);
  if (!a.summary.empty()) {
    std::vector<double> corr(fit.fit_correlation.data(), fit.fit_correlation.data() + fit.fit_correlation.size());
    const json doc = {{"schema", "mlcd.degree_fit/1"},
                      {"layers", fit.layer_names},
                      {"fit_correlation", corr},
                      {"layer_correlation", to_json(fit.layer_correlation)}};
    emit_json(doc, a.summary, out);
  }
}

// ---- aggregate ----

struct AggregateArgs {
  GraphInput graph;
  std::string output;
};

void run_aggregate(const AggregateArgs& a, std::ostream& err) {
  const MultiLayerGraph g = aggregate_layers(load_graph(a.graph, err));
  auto file = open_output(a.output);
  write_multilayer_edgelist(file, g);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community detection in multi-layer networks", "mlcd"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MLCD_THREADS or all cores)");

  DetectArgs detect;
  auto* cmd_detect = app.add_subcommand("detect", "find communities (Louvain, or Kernighan-Lin with --k)");
  add_graph_options(cmd_detect, detect.graph);
  cmd_detect->add_option("--measure", detect.measure, "quality function")->capture_default_str();
  cmd_detect->add_option("--k", detect.k, "known number of communities (selects Kernighan-Lin)");
  cmd_detect->add_option("--init", detect.init, "initial partition for Kernighan-Lin");
  cmd_detect->add_option("--restarts", detect.restarts, "restarts (default 10 Louvain, 20 KL)");
  cmd_detect->add_option("--seed", detect.seed, "random seed")->required();
  cmd_detect->add_option("--output", detect.output, "partition file")->required();
  cmd_detect->add_option("--summary", detect.summary, "JSON summary file ('-' for stdout)");
  cmd_detect->add_option("--kl-variant", detect.kl_variant, "steepest or node-order")->capture_default_str();
  cmd_detect->add_option("--min-gain", detect.min_gain)->capture_default_str();
  cmd_detect->add_option("--max-sweeps", detect.max_sweeps)->capture_default_str();
  cmd_detect->add_option("--restart-perturbation", detect.restart_perturbation,
                         "fraction of labels resampled for later KL restarts")
      ->capture_default_str();

  SelectNullArgs select;
  auto* cmd_select = app.add_subcommand("select-null", "bootstrap LRT of independent vs shared degrees");
  add_graph_options(cmd_select, select.graph);
  cmd_select->add_option("--bootstrap,--boot", select.boot, "bootstrap replicates")->capture_default_str();
  cmd_select->add_option("--alpha", select.alpha, "level for recommending the independent-degree model")
      ->capture_default_str();
  cmd_select->add_option("--seed", select.seed, "random seed")->required();
  cmd_select->add_option("--output", select.output, "JSON result file (default stdout)");
  cmd_select->add_option("--boot-csv", select.boot_csv, "bootstrap statistics CSV");

  SimulateArgs simulate;
  auto* cmd_simulate = app.add_subcommand("simulate", "draw graphs from a scenario");
  cmd_simulate->add_option("--scenario", simulate.scenario, "scenario JSON")->required();
  cmd_simulate->add_option("--reps", simulate.reps)->capture_default_str();
  cmd_simulate->add_option("--seed", simulate.seed, "random seed")->required();
  cmd_simulate->add_option("--outdir", simulate.outdir)->required();
  cmd_simulate->add_option("--axis-value", simulate.axis_value, "axis point (default: first value)");

  SweepArgs sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "simulation study along a scenario axis");
  cmd_sweep->add_option("--scenario", sweep.scenario, "scenario JSON with an axis")->required();
  cmd_sweep->add_option("--reps", sweep.reps)->capture_default_str();
  cmd_sweep->add_option("--measures", sweep.measures)->delimiter(',')->capture_default_str();
  cmd_sweep->add_option("--seed", sweep.seed, "random seed")->required();
  cmd_sweep->add_option("--outdir", sweep.outdir)->required();
  cmd_sweep->add_option("--optimizer", sweep.optimizer, "louvain or kl")->capture_default_str();
  cmd_sweep->add_option("--restarts", sweep.restarts);
  cmd_sweep->add_option("--perturb", sweep.perturb, "KL start: fraction of true labels resampled")
      ->capture_default_str();
  cmd_sweep->add_option("--kl-variant", sweep.kl_variant)->capture_default_str();
  cmd_sweep->add_option("--nmi-variant", sweep.nmi_variant)->capture_default_str();

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "compare a partition against the truth");
  cmd_eval->add_option("--detected", eval.detected)->required();
  cmd_eval->add_option("--truth", eval.truth)->required();
  cmd_eval->add_option("--nmi-variant", eval.nmi_variant, "mean, sqrt or max")->capture_default_str();
  cmd_eval->add_option("--output", eval.output, "JSON report file (default stdout)");

  DegreeFitArgs degree;
  auto* cmd_degree = app.add_subcommand("degree-fit", "observed vs shared-degree fitted degrees");
  add_graph_options(cmd_degree, degree.graph);
  cmd_degree->add_option("--output", degree.output, "CSV file")->required();
  cmd_degree->add_option("--summary", degree.summary, "JSON correlations ('-' for stdout)");

  AggregateArgs aggregate;
  auto* cmd_aggregate = app.add_subcommand("aggregate", "sum all layers into one");
  add_graph_options(cmd_aggregate, aggregate.graph);
  cmd_aggregate->add_option("--output", aggregate.output, "edge list file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  }

  try {
    if (cmd_detect->parsed()) run_detect(detect, threads, out, err);
    if (cmd_select->parsed()) run_select_null(select, threads, out, err);
    if (cmd_simulate->parsed()) run_simulate(simulate, threads, out);
    if (cmd_sweep->parsed()) run_sweep_command(sweep, threads, out);
    if (cmd_eval->parsed()) run_eval(eval, out);
    if (cmd_degree->parsed()) run_degree_fit(degree, out, err);
    if (cmd_aggregate->parsed()) run_aggregate(aggregate, err);
  } catch (const InputError& e) {
    fmt::print(err, "input error: {}\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 3;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "input error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace mlcd::cli
