#pragma once

#include "mlcd/eval.hpp"
#include "mlcd/modularity.hpp"
#include "mlcd/optimize.hpp"
#include "mlcd/scenario.hpp"

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mlcd {

enum class OptimizerKind { Louvain, KernighanLin };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view optimizer_name(OptimizerKind kind);

struct SweepSpec {
  Scenario scenario;  ///< must carry a sweep axis
  int reps = 1;
  std::vector<MeasureKind> measures;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::Louvain;
  std::optional<int> restarts;
  /// Kernighan-Lin starts from the truth with this fraction of labels resampled.
  double perturb_fraction = 0.5;
  KlVariant kl_variant = KlVariant::Steepest;
  NmiVariant nmi_variant = NmiVariant::Mean;
  unsigned threads = 0;

  void validate() const;
};

struct ReplicateRow {
  std::size_t axis_index = 0;
  double axis_value = 0.0;
  MeasureKind measure = MeasureKind::MNavrg;
  int rep = 0;
  bool ok = false;
  std::string error;
  int k_true = 0;
  int k_detected = 0;
  double nmi = 0.0;
  double score = 0.0;
};

struct SummaryRow {
  std::size_t axis_index = 0;
  double axis_value = 0.0;
  MeasureKind measure = MeasureKind::MNavrg;
  int n_ok = 0;
  int n_failed = 0;
  double mean_nmi = 0.0;
  double sd_nmi = 0.0;
  double min_nmi = 0.0;
  double max_nmi = 0.0;
  double mean_k = 0.0;
  double mse_k = 0.0;
  std::map<int, int> k_counts;
};

struct SweepResult {
  std::vector<ReplicateRow> replicates;  ///< ordered by (axis, measure, rep)
  std::vector<SummaryRow> summary;       ///< ordered by (axis, measure)
  std::size_t clamped = 0;
  int failed = 0;

  const SummaryRow& at(std::size_t axis_index, MeasureKind measure) const;
};

/// Draws reps graphs per axis point (shared by all measures), drops isolated
/// nodes, runs the optimizer per measure and scores against the truth.
/// Replicate failures are recorded; more than 10% failures throws.
SweepResult run_sweep(const SweepSpec& spec);

void write_replicates_csv(std::ostream& out, const SweepResult& result);
void write_summary_csv(std::ostream& out, const SweepResult& result);

// ---- shared-degree fit export ----

struct DegreeFitRow {
  std::string node;
  Index layer = 0;
  double observed = 0.0;
  double fitted = 0.0;  ///< θ̂_i β̂_m sqrt(2L) = K_i · 2L^(m) / 2L
  bool zero_degree = false;
};

struct DegreeFit {
  std::vector<DegreeFitRow> rows;     ///< ordered by (node, layer)
  Eigen::VectorXd fit_correlation;    ///< per layer, observed vs fitted over nonzero nodes
  Eigen::MatrixXd layer_correlation;  ///< Pearson correlation of degrees across layers
  std::vector<std::string> layer_names;
};

DegreeFit emit_degree_fit(const MultiLayerGraph& g);
void write_degree_fit_csv(std::ostream& out, const DegreeFit& fit);

}  // namespace mlcd
