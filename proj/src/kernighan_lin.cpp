#include "mlcd/error.hpp"
#include "mlcd/optimize.hpp"
#include "mlcd/parallel.hpp"
#include "mlcd/random.hpp"
#include "optimize_internal.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <limits>
#include <numeric>

namespace mlcd {

namespace {

struct Move {
  Index node;
  int from;
  int to;
};

struct Choice {
  Index node = -1;
  int to = -1;
  double gain = -std::numeric_limits<double>::infinity();
};

// Best target for one node over every other community, even if the gain is negative.
void consider(const CommunityStats& stats, const NodeLinks& links, MeasureKind measure, Choice& best) {
  const int home = links.home();
  for (int c = 0; c < stats.k(); ++c) {
    if (c == home) continue;
    const double gain = delta_move(measure, stats, links, c);
    if (gain > best.gain) best = {links.node(), c, gain};
  }
}

// Re-gathers the moved node and its unmoved neighbors, the only links a move changes.
void refresh(const MultiLayerGraph& g, const CommunityStats& stats, Index node, const std::vector<char>& moved,
             std::vector<NodeLinks>& cache) {
  for (Index m = 0; m < g.n_layers(); ++m) {
    for (SparseLayer::InnerIterator it(g.layer(m), node); it; ++it) {
      const Index j = it.row();
      if (!moved[static_cast<std::size_t>(j)]) cache[static_cast<std::size_t>(j)].gather(g, stats, j);
    }
  }
}

DetectResult run_restart(const MultiLayerGraph& g, const OptimizeConfig& cfg, const Partition& start, int restart) {
  const Index n = g.n_nodes();
  CommunityStats stats(g, start);
  NodeLinks links(stats.k(), g.n_layers());
  Rng rng = make_rng(cfg.seed, 1000 + static_cast<std::uint64_t>(restart));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  std::vector<NodeLinks> cache;
  if (cfg.kl_variant == KlVariant::Steepest) cache.assign(static_cast<std::size_t>(n), links);

  std::vector<double> trace;
  int sweeps = 0;
  while (sweeps < cfg.max_sweeps && stats.k() > 1) {
    ++sweeps;
    std::vector<Move> history;
    std::vector<char> moved(static_cast<std::size_t>(n), 0);
    double cumulative = 0.0;
    double best_cumulative = 0.0;
    std::size_t best_length = 0;
    if (cfg.kl_variant == KlVariant::NodeOrder) std::shuffle(order.begin(), order.end(), rng);

    if (cfg.kl_variant == KlVariant::Steepest) {
      for (Index i = 0; i < n; ++i) cache[static_cast<std::size_t>(i)].gather(g, stats, i);
    }

    for (Index step = 0; step < n; ++step) {
      Choice best;
      if (cfg.kl_variant == KlVariant::Steepest) {
        for (Index i = 0; i < n; ++i) {
          if (moved[static_cast<std::size_t>(i)]) continue;
          consider(stats, cache[static_cast<std::size_t>(i)], cfg.measure, best);
        }
      } else {
        links.gather(g, stats, order[static_cast<std::size_t>(step)]);
        consider(stats, links, cfg.measure, best);
      }
      if (best.node < 0) break;
      links.gather(g, stats, best.node);
      history.push_back({best.node, links.home(), best.to});
      stats.apply_move(links, best.to);
      moved[static_cast<std::size_t>(best.node)] = 1;
      if (cfg.kl_variant == KlVariant::Steepest) refresh(g, stats, best.node, moved, cache);
      cumulative += best.gain;
      if (cumulative > best_cumulative) {
        best_cumulative = cumulative;
        best_length = history.size();
      }
    }
    for (std::size_t h = history.size(); h-- > best_length;) {
      links.gather(g, stats, history[h].node);
      stats.apply_move(links, history[h].from);
    }
    trace.push_back(evaluate(cfg.measure, stats));
    if (best_cumulative <= cfg.min_gain) break;
  }
  if (trace.empty()) trace.push_back(evaluate(cfg.measure, stats));
  return detail::finalize_result(g, cfg.measure, stats.partition(), sweeps, std::move(trace));
}

}  // namespace

DetectResult kernighan_lin(const MultiLayerGraph& g, const OptimizeConfig& cfg, const Partition& init) {
  cfg.validate();
  if (!cfg.known_k) throw InputError("Kernighan-Lin needs a known number of communities");
  const int k = *cfg.known_k;
  init.validate(g.n_nodes());
  if (init.k > k) {
    throw InputError(fmt::format("initial partition uses {} labels but K = {}", init.k, k));
  }
  if (g.n_nodes() < 1) throw PreconditionError("graph has no nodes");
  check_measure_defined(cfg.measure, g.layer_totals());

  const Partition start(init.labels, k);
  const int restarts = cfg.resolved_restarts(true);
  std::vector<DetectResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), cfg.threads, [&](std::size_t r) {
    const Partition seeded =
        r == 0 ? start : perturb_labels(start, cfg.restart_perturbation, derive_seed(cfg.seed, r));
    results[r] = run_restart(g, cfg, seeded, static_cast<int>(r));
  });
  return detail::pick_best(std::move(results));
}

}  // namespace mlcd
