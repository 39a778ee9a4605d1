#include "mlcd/error.hpp"
#include "mlcd/optimize.hpp"
#include "mlcd/parallel.hpp"
#include "mlcd/random.hpp"
#include "optimize_internal.hpp"

#include <algorithm>
#include <numeric>

namespace mlcd {

namespace {

struct LevelOutcome {
  bool moved = false;
  int passes = 0;
};

LevelOutcome local_moving(const MultiLayerGraph& g, CommunityStats& stats, const OptimizeConfig& cfg, Rng& rng,
                          std::vector<double>& trace) {
  NodeLinks links(stats.k(), g.n_layers());
  std::vector<Index> order(static_cast<std::size_t>(g.n_nodes()));
  std::iota(order.begin(), order.end(), Index{0});
  LevelOutcome out;
  while (out.passes < cfg.max_sweeps) {
    ++out.passes;
    std::shuffle(order.begin(), order.end(), rng);
    double pass_gain = 0.0;
    for (Index node : order) {
      links.gather(g, stats, node);
      const int home = links.home();
      int target = home;
      double best = 0.0;
      for (int c : links.neighbor_communities()) {
        if (c == home) continue;
        const double gain = delta_move(cfg.measure, stats, links, c);
        if (gain > best) {
          best = gain;
          target = c;
        }
      }
      if (target != home && best > cfg.min_gain) {
        stats.apply_move(links, target);
        pass_gain += best;
        out.moved = true;
      }
    }
    trace.push_back(evaluate(cfg.measure, stats));
    if (pass_gain < cfg.min_gain) break;
  }
  return out;
}

DetectResult run_restart(const MultiLayerGraph& g, const OptimizeConfig& cfg, int restart) {
  Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(restart));
  std::vector<int> membership(static_cast<std::size_t>(g.n_nodes()));
  std::iota(membership.begin(), membership.end(), 0);
  std::vector<double> trace;
  int sweeps = 0;

  MultiLayerGraph coarse;
  const MultiLayerGraph* level = &g;
  while (true) {
    CommunityStats stats(*level, Partition::singletons(level->n_nodes()));
    const auto outcome = local_moving(*level, stats, cfg, rng, trace);
    sweeps += outcome.passes;
    if (!outcome.moved) break;
    const Partition merged = stats.partition().compacted();
    for (auto& c : membership) c = merged.labels[static_cast<std::size_t>(c)];
    MultiLayerGraph next = contract(*level, merged);
    coarse = std::move(next);
    level = &coarse;
  }
  return detail::finalize_result(g, cfg.measure, Partition::from_labels(std::move(membership)), sweeps,
                                 std::move(trace));
}

}  // namespace

DetectResult louvain(const MultiLayerGraph& g, const OptimizeConfig& cfg) {
  cfg.validate();
  if (cfg.known_k) throw InputError("Louvain estimates K; known K is only accepted by Kernighan-Lin");
  if (g.n_nodes() < 1) throw PreconditionError("graph has no nodes");
  check_measure_defined(cfg.measure, g.layer_totals());

  const int restarts = cfg.resolved_restarts(false);
  std::vector<DetectResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), cfg.threads,
               [&](std::size_t r) { results[r] = run_restart(g, cfg, static_cast<int>(r)); });
  return detail::pick_best(std::move(results));
}

}  // namespace mlcd
