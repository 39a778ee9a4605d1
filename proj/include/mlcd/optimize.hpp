#pragma once

#include "mlcd/graph.hpp"
#include "mlcd/modularity.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mlcd {

enum class KlVariant {
  Steepest,   ///< each step applies the best (node, community) move among unmoved nodes
  NodeOrder,  ///< nodes visited once in random order, each moved to its best community
};

struct OptimizeConfig {
  MeasureKind measure = MeasureKind::MNavrg;
  /// Defaults to 10 for Louvain and 20 for Kernighan-Lin when unset.
  std::optional<int> restarts;
  std::uint64_t seed = 0;
  /// A Louvain move is accepted only if it gains more than this.
  double min_gain = 1e-10;
  /// Cap on Louvain local-moving passes per level and on KL sweeps.
  int max_sweeps = 50;
  /// Number of communities; required by Kernighan-Lin, forbidden for Louvain.
  std::optional<int> known_k;
  KlVariant kl_variant = KlVariant::Steepest;
  /// Fraction of labels resampled for KL restarts after the first one.
  double restart_perturbation = 1.0;
  /// Worker threads for restarts (0: MLCD_THREADS or hardware concurrency).
  unsigned threads = 0;

  int resolved_restarts(bool kernighan_lin) const;
  void validate() const;
};

struct DetectResult {
  Partition partition;  ///< compacted, no empty communities
  double score = 0.0;
  int k_detected = 0;
  int sweeps_used = 0;
  std::vector<double> restart_scores;
  /// Score after every local-moving pass (Louvain) or sweep (KL) of the winning restart.
  std::vector<double> score_trace;
};

/// Multi-level greedy optimization for unknown K: local moving from singletons,
/// then contraction of communities into super-nodes, until nothing changes.
DetectResult louvain(const MultiLayerGraph& g, const OptimizeConfig& cfg);

/// Kernighan-Lin style refinement for known K starting from `init`.
DetectResult kernighan_lin(const MultiLayerGraph& g, const OptimizeConfig& cfg, const Partition& init);

/// Resamples the labels of a uniformly chosen ⌊fraction·N⌋ subset uniformly
/// from the truth's K labels. `eligible`, if given, receives that subset.
Partition perturb_labels(const Partition& truth, double fraction, std::uint64_t seed,
                         std::vector<Index>* eligible = nullptr);

/// Uniformly random labels in [0, k).
Partition random_partition(Index n, int k, std::uint64_t seed);

/// Exhaustive search over all set partitions into at most max_k blocks. N <= 12.
DetectResult brute_force_best(const MultiLayerGraph& g, MeasureKind measure, int max_k);

}  // namespace mlcd
