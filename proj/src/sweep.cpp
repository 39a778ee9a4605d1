#include "mlcd/sweep.hpp"

#include "mlcd/error.hpp"
#include "mlcd/parallel.hpp"
#include "mlcd/random.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>

namespace mlcd {

namespace {

constexpr std::uint64_t kOptimizerStream = 1000;
constexpr std::uint64_t kPerturbStream = 2000;

struct Task {
  std::vector<ReplicateRow> rows;
  std::size_t clamped = 0;
};

Task run_replicate(const SweepSpec& spec, std::size_t axis_index, int rep) {
  const double value = spec.scenario.axis_values[axis_index];
  const std::uint64_t graph_seed = derive_seed(derive_seed(spec.seed, axis_index), static_cast<std::uint64_t>(rep));
  Task task;
  for (MeasureKind measure : spec.measures) {
    ReplicateRow row;
    row.axis_index = axis_index;
    row.axis_value = value;
    row.measure = measure;
    row.rep = rep;
    task.rows.push_back(row);
  }

  try {
    const GeneratorSpec gen = spec.scenario.at_axis(value).to_spec(graph_seed);
    const Partition labels = sample_labels(gen);
    SampleStats stats;
    const MultiLayerGraph full = sample_graph(labels, gen, &stats);
    task.clamped = stats.clamped;
    const RestrictResult active = restrict_to_active_nodes(full);
    std::vector<int> kept_labels;
    kept_labels.reserve(active.kept.size());
    for (Index i : active.kept) kept_labels.push_back(labels.labels[static_cast<std::size_t>(i)]);
    const Partition truth(std::move(kept_labels), gen.k);

    OptimizeConfig cfg;
    cfg.seed = derive_seed(graph_seed, kOptimizerStream);
    cfg.restarts = spec.restarts;
    cfg.kl_variant = spec.kl_variant;
    cfg.threads = 1;
    Partition init;
    if (spec.optimizer == OptimizerKind::KernighanLin) {
      cfg.known_k = gen.k;
      init = perturb_labels(truth, spec.perturb_fraction, derive_seed(graph_seed, kPerturbStream));
    }

    for (auto& row : task.rows) {
      row.k_true = truth.count_nonempty();
      try {
        cfg.measure = row.measure;
        const DetectResult found = spec.optimizer == OptimizerKind::Louvain ? louvain(active.graph, cfg)
                                                                            : kernighan_lin(active.graph, cfg, init);
        row.k_detected = found.k_detected;
        row.score = found.score;
        row.nmi = nmi(found.partition, truth, spec.nmi_variant);
        row.ok = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  } catch (const Error& e) {
    for (auto& row : task.rows) row.error = e.what();
  }
  return task;
}

SummaryRow summarize(std::span<const ReplicateRow> rows) {
  SummaryRow s;
  s.axis_value = rows.front().axis_value;
  s.measure = rows.front().measure;
  s.axis_index = rows.front().axis_index;
  std::vector<double> nmis;
  double k_sum = 0.0;
  double sq = 0.0;
  for (const auto& row : rows) {
    if (!row.ok) {
      ++s.n_failed;
      continue;
    }
    ++s.n_ok;
    nmis.push_back(row.nmi);
    k_sum += row.k_detected;
    sq += static_cast<double>(row.k_detected - row.k_true) * (row.k_detected - row.k_true);
    ++s.k_counts[row.k_detected];
  }
  if (nmis.empty()) {
    s.mean_nmi = s.sd_nmi = s.min_nmi = s.max_nmi = s.mean_k = s.mse_k = std::nan("");
    return s;
  }
  const Eigen::Map<const Eigen::VectorXd> v(nmis.data(), static_cast<Index>(nmis.size()));
  s.mean_nmi = v.mean();
  s.sd_nmi = nmis.size() > 1 ? std::sqrt((v.array() - s.mean_nmi).square().sum() / double(nmis.size() - 1)) : 0.0;
  s.min_nmi = v.minCoeff();
  s.max_nmi = v.maxCoeff();
  s.mean_k = k_sum / static_cast<double>(nmis.size());
  s.mse_k = sq / static_cast<double>(nmis.size());
  return s;
}

std::string format_k_counts(const std::map<int, int>& counts) {
  std::string out;
  for (const auto& [k, c] : counts) {
    if (!out.empty()) out += ';';
    out += fmt::format("{}:{}", k, c);
  }
  return out;
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "louvain") return OptimizerKind::Louvain;
  if (name == "kl") return OptimizerKind::KernighanLin;
  throw InputError(fmt::format("unknown optimizer '{}' (louvain, kl)", name));
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::Louvain ? "louvain" : "kl";
}

void SweepSpec::validate() const {
  scenario.validate();
  if (!scenario.axis) throw InputError("sweep scenario needs an axis");
  if (reps < 1) throw InputError("sweep needs reps >= 1");
  if (measures.empty()) throw InputError("sweep needs at least one measure");
  if (restarts && *restarts < 1) throw InputError("restarts must be at least 1");
  if (!(perturb_fraction >= 0.0 && perturb_fraction <= 1.0)) throw InputError("perturb fraction must lie in [0, 1]");
}

const SummaryRow& SweepResult::at(std::size_t axis_index, MeasureKind measure) const {
  for (const auto& row : summary) {
    if (row.axis_index == axis_index && row.measure == measure) return row;
  }
  throw InputError(fmt::format("no summary for axis point {} and measure {}", axis_index, measure_name(measure)));
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t points = spec.scenario.axis_values.size();
  const std::size_t reps = static_cast<std::size_t>(spec.reps);
  std::vector<Task> tasks(points * reps);
  parallel_for(tasks.size(), spec.threads, [&](std::size_t t) {
    tasks[t] = run_replicate(spec, t / reps, static_cast<int>(t % reps));
  });

  SweepResult result;
  const std::size_t n_measures = spec.measures.size();
  for (std::size_t a = 0; a < points; ++a) {
    for (std::size_t m = 0; m < n_measures; ++m) {
      std::vector<ReplicateRow> group;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& row = tasks[a * reps + r].rows[m];
        group.push_back(row);
        result.replicates.push_back(row);
        result.failed += row.ok ? 0 : 1;
      }
      result.summary.push_back(summarize(group));
    }
  }
  for (const auto& t : tasks) result.clamped += t.clamped;
  if (10 * static_cast<std::size_t>(result.failed) > result.replicates.size()) {
    std::string first;
    for (const auto& row : result.replicates) {
      if (!row.ok) {
        first = row.error;
        break;
      }
    }
    throw PreconditionError(fmt::format("{} of {} replicate runs failed (first: {})", result.failed,
                                        result.replicates.size(), first));
  }
  return result;
}

void write_replicates_csv(std::ostream& out, const SweepResult& result) {
  fmt::print(out, "axis_index,axis_value,measure,rep,status,k_true,k_detected,nmi,score,error\n");
  for (const auto& r : result.replicates) {
    fmt::print(out, "{},{:.17g},{},{},{},{},{},{:.17g},{:.17g},{}\n", r.axis_index, r.axis_value,
               measure_name(r.measure), r.rep, r.ok ? "ok" : "failed", r.k_true, r.k_detected, r.nmi, r.score,
               csv_escape(r.error));
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  fmt::print(out, "axis_value,measure,n_ok,n_failed,mean_nmi,sd_nmi,min_nmi,max_nmi,mean_k,mse_k,k_counts\n");
  for (const auto& s : result.summary) {
    fmt::print(out, "{:.17g},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", s.axis_value,
               measure_name(s.measure), s.n_ok, s.n_failed, s.mean_nmi, s.sd_nmi, s.min_nmi, s.max_nmi, s.mean_k,
               s.mse_k, format_k_counts(s.k_counts));
  }
}

}  // namespace mlcd
