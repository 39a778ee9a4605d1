#pragma once

#include "mlcd/graph.hpp"

#include <array>
#include <string_view>

namespace mlcd {

/// Every quality function the optimizers and the CLI can target.
enum class MeasureKind {
  NgAggregate,  ///< Newman-Girvan modularity of the layer-aggregated graph
  MNavrg,       ///< average of layer-normalized NG modularities (independent degrees)
  SDavrg,       ///< shared-degree null model, global layer frequency
  SDlocal,      ///< shared-degree null model, community-local layer frequency
  SDratio,      ///< shared-degree null model, ratio of expected edge counts
  DCMLSBM,      ///< degree-corrected multi-layer SBM profile likelihood
  DCRMLSBM,     ///< restricted variant: block matrix shared across layers
  SDMLSBM,      ///< shared node degrees across layers
  SDRMLSBM,     ///< shared degrees and shared block matrix
};

inline constexpr std::array<MeasureKind, 9> kAllMeasures = {
    MeasureKind::NgAggregate, MeasureKind::MNavrg,  MeasureKind::SDavrg,
    MeasureKind::SDlocal,     MeasureKind::SDratio, MeasureKind::DCMLSBM,
    MeasureKind::DCRMLSBM,    MeasureKind::SDMLSBM, MeasureKind::SDRMLSBM};

/// CLI spelling: ng-agg, mnavrg, sdavrg, sdlocal, sdratio, dcmlsbm, ...
std::string_view measure_name(MeasureKind kind);
MeasureKind parse_measure(std::string_view name);

/// Configuration-model family (NG-style, sums over within-community terms).
bool is_configuration_measure(MeasureKind kind);
/// Block-model family (profile likelihoods over community pairs).
bool is_block_model_measure(MeasureKind kind);

/// Single-layer Newman-Girvan modularity. Requires M = 1.
double q_ng(const CommunityStats& stats);
double q_mnavrg(const CommunityStats& stats);
double q_sdavrg(const CommunityStats& stats);
double q_sdlocal(const CommunityStats& stats);
double q_sdratio(const CommunityStats& stats);
double q_dcmlsbm(const CommunityStats& stats);
double q_dcrmlsbm(const CommunityStats& stats);
double q_sdmlsbm(const CommunityStats& stats);
double q_sdrmlsbm(const CommunityStats& stats);

/// Dispatches on `kind`. Throws PreconditionError when the measure is
/// undefined on the graph (empty layer, or empty graph for NgAggregate).
double evaluate(MeasureKind kind, const CommunityStats& stats);

/// Throws PreconditionError if `kind` is undefined for graphs with these totals.
void check_measure_defined(MeasureKind kind, const Eigen::VectorXd& layer_totals);

/// Q after moving `node` out of its singleton community into `target`, minus
/// Q before. MNavrg, SDavrg and SDlocal use closed-form one-step gains; the
/// other measures reuse the local update of delta_move.
double delta_isolated_join(MeasureKind kind, const CommunityStats& stats, Index node, int target,
                           const MultiLayerGraph& g);

/// Q after moving `node` from `from` to `to`, minus Q before.
double delta_move(MeasureKind kind, const CommunityStats& stats, Index node, int from, int to,
                  const MultiLayerGraph& g);

/// Optimizer entry points: `links` must be gathered for the node on `stats`.
/// No precondition checks beyond debug assertions.
double delta_isolated_join(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links,
                           int target);
double delta_move(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links, int to);

}  // namespace mlcd
