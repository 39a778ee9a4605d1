#include "mlcd/optimize.hpp"

#include "mlcd/error.hpp"
#include "mlcd/random.hpp"
#include "optimize_internal.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlcd {

int OptimizeConfig::resolved_restarts(bool kernighan_lin) const {
  return restarts.value_or(kernighan_lin ? 20 : 10);
}

void OptimizeConfig::validate() const {
  if (restarts && *restarts < 1) throw InputError("restarts must be at least 1");
  if (!(min_gain >= 0.0)) throw InputError("min_gain must be nonnegative");
  if (max_sweeps < 1) throw InputError("max_sweeps must be at least 1");
  if (known_k && *known_k < 1) throw InputError("known K must be at least 1");
  if (!(restart_perturbation >= 0.0 && restart_perturbation <= 1.0)) {
    throw InputError("restart perturbation must lie in [0, 1]");
  }
}

namespace detail {

DetectResult finalize_result(const MultiLayerGraph& g, MeasureKind measure, const Partition& z, int sweeps,
                             std::vector<double> trace) {
  DetectResult result;
  result.partition = z.compacted();
  result.k_detected = result.partition.k;
  result.score = evaluate(measure, CommunityStats(g, result.partition));
  result.sweeps_used = sweeps;
  if (!trace.empty() && std::abs(trace.back() - result.score) > 1e-9 * std::max(1.0, std::abs(result.score))) {
    throw std::logic_error(fmt::format("optimizer bookkeeping drifted: tracked {} vs recomputed {}",
                                       trace.back(), result.score));
  }
  result.score_trace = std::move(trace);
  return result;
}

DetectResult pick_best(std::vector<DetectResult> restarts) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts.size(); ++r) {
    if (restarts[r].score > restarts[best].score) best = r;
  }
  std::vector<double> scores;
  scores.reserve(restarts.size());
  for (const auto& r : restarts) scores.push_back(r.score);
  DetectResult result = std::move(restarts[best]);
  result.restart_scores = std::move(scores);
  return result;
}

}  // namespace detail

Partition perturb_labels(const Partition& truth, double fraction, std::uint64_t seed, std::vector<Index>* eligible) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("perturbation fraction must lie in [0, 1]");
  const Index n = truth.size();
  const auto count = static_cast<Index>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  Rng rng = make_rng(seed, 0);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());

  Partition out = truth;
  std::uniform_int_distribution<int> pick(0, truth.k - 1);
  for (Index i : order) out.labels[static_cast<std::size_t>(i)] = pick(rng);
  if (eligible) *eligible = std::move(order);
  return out;
}

Partition random_partition(Index n, int k, std::uint64_t seed) {
  if (k < 1) throw InputError("random partition needs k >= 1");
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& l : labels) l = pick(rng);
  return Partition(std::move(labels), k);
}

DetectResult brute_force_best(const MultiLayerGraph& g, MeasureKind measure, int max_k) {
  constexpr Index kMaxNodes = 12;
  const Index n = g.n_nodes();
  if (n > kMaxNodes) {
    throw PreconditionError(fmt::format("exhaustive search is limited to {} nodes, got {}", kMaxNodes, n));
  }
  if (n < 1) throw PreconditionError("exhaustive search needs at least one node");
  if (max_k < 1) throw InputError("max_k must be at least 1");
  check_measure_defined(measure, g.layer_totals());

  // restricted growth strings: labels[i] <= 1 + max(labels[0..i-1])
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  std::optional<DetectResult> best;
  std::size_t visited = 0;
  while (true) {
    const int blocks = prefix_max.back() + 1;
    if (blocks <= max_k) {
      ++visited;
      Partition z(labels, blocks);
      const double score = evaluate(measure, CommunityStats(g, z));
      if (!best || score > best->score) {
        best = DetectResult{};
        best->partition = std::move(z);
        best->score = score;
        best->k_detected = blocks;
      }
    }
    // next string in lexicographic order
    Index i = n - 1;
    while (i > 0) {
      const auto u = static_cast<std::size_t>(i);
      if (labels[u] <= prefix_max[u - 1] && labels[u] + 1 < max_k) break;
      --i;
    }
    if (i == 0) break;
    const auto u = static_cast<std::size_t>(i);
    ++labels[u];
    prefix_max[u] = std::max(prefix_max[u - 1], labels[u]);
    for (auto j = u + 1; j < labels.size(); ++j) {
      labels[j] = 0;
      prefix_max[j] = prefix_max[u];
    }
  }
  best->sweeps_used = static_cast<int>(visited);
  best->restart_scores = {best->score};
  return *best;
}

}  // namespace mlcd
