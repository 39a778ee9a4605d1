#include "mlcd/modularity.hpp"

#include "mlcd/error.hpp"

#include <fmt/core.h>

#include <cassert>
#include <cmath>

namespace mlcd {

std::string_view measure_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::NgAggregate: return "ng-agg";
    case MeasureKind::MNavrg: return "mnavrg";
    case MeasureKind::SDavrg: return "sdavrg";
    case MeasureKind::SDlocal: return "sdlocal";
    case MeasureKind::SDratio: return "sdratio";
    case MeasureKind::DCMLSBM: return "dcmlsbm";
    case MeasureKind::DCRMLSBM: return "dcrmlsbm";
    case MeasureKind::SDMLSBM: return "sdmlsbm";
    case MeasureKind::SDRMLSBM: return "sdrmlsbm";
  }
  return "unknown";
}

MeasureKind parse_measure(std::string_view name) {
  for (MeasureKind kind : kAllMeasures) {
    if (measure_name(kind) == name) return kind;
  }
  throw InputError(fmt::format("unknown measure '{}'", name));
}

bool is_configuration_measure(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::NgAggregate:
    case MeasureKind::MNavrg:
    case MeasureKind::SDavrg:
    case MeasureKind::SDlocal:
    case MeasureKind::SDratio:
      return true;
    default:
      return false;
  }
}

bool is_block_model_measure(MeasureKind kind) { return !is_configuration_measure(kind); }

void check_measure_defined(MeasureKind kind, const Eigen::VectorXd& layer_totals) {
  if (kind == MeasureKind::NgAggregate) {
    if (!(layer_totals.sum() > 0.0)) throw PreconditionError("empty graph: total edge weight is 0");
    return;
  }
  for (Index m = 0; m < layer_totals.size(); ++m) {
    if (!(layer_totals(m) > 0.0)) {
      throw PreconditionError(fmt::format("layer {} has no edges; {} is undefined", m + 1, measure_name(kind)));
    }
  }
}

namespace {

// Accumulators as they are.
struct CurrentView {
  const CommunityStats& s;

  double between(Index m, int q, int l) const { return s.between(m)(q, l); }
  double degree(int q, Index m) const { return s.community_degrees()(q, m); }
};

// Accumulators as they would be after moving links.node() from its home to `to`.
struct MovedView {
  const CommunityStats& s;
  const NodeLinks& links;
  int from;
  int to;

  double between(Index m, int q, int l) const {
    double v = s.between(m)(q, l);
    if (q == from) v -= links.to(l, m);
    if (l == from) v -= links.to(q, m);
    if (q == to) v += links.to(l, m);
    if (l == to) v += links.to(q, m);
    if (q == l) {
      if (q == from) v -= links.loop(m);
      if (q == to) v += links.loop(m);
    }
    return v;
  }
  double degree(int q, Index m) const {
    double v = s.community_degrees()(q, m);
    if (q == from) v -= links.degree(m);
    if (q == to) v += links.degree(m);
    return v;
  }
};

// Contribution of community q to a configuration-model measure, so that
// Q = Σ_q community_term(q).
template <typename View>
double community_term(MeasureKind kind, const View& view, const Eigen::VectorXd& totals, double total,
                      int q) {
  const Index n_layers = totals.size();
  const double inv_layers = 1.0 / static_cast<double>(n_layers);
  double shared = 0.0;  // Σ_m e_q^(m)
  for (Index m = 0; m < n_layers; ++m) shared += view.degree(q, m);

  double sum = 0.0;
  switch (kind) {
    case MeasureKind::NgAggregate: {
      double within = 0.0;
      for (Index m = 0; m < n_layers; ++m) within += view.between(m, q, q);
      return (within - shared * shared / total) / total;
    }
    case MeasureKind::MNavrg:
      for (Index m = 0; m < n_layers; ++m) {
        const double e = view.degree(q, m);
        sum += (view.between(m, q, q) - e * e / totals(m)) / totals(m);
      }
      return sum * inv_layers;
    case MeasureKind::SDavrg:
      // L^(m) (Σ_m e_q)² / 2L² over 2L^(m) is (Σ_m e_q)² / (2L)²
      for (Index m = 0; m < n_layers; ++m) sum += view.between(m, q, q) / totals(m);
      return (sum - static_cast<double>(n_layers) * shared * shared / (total * total)) * inv_layers;
    case MeasureKind::SDlocal:
      for (Index m = 0; m < n_layers; ++m) {
        sum += (view.between(m, q, q) - view.degree(q, m) * shared / total) / totals(m);
      }
      return sum * inv_layers;
    case MeasureKind::SDratio: {
      double squares = 0.0;
      for (Index m = 0; m < n_layers; ++m) squares += view.degree(q, m) * view.degree(q, m);
      for (Index m = 0; m < n_layers; ++m) {
        const double e = view.degree(q, m);
        const double expected = squares > 0.0 ? e * e * shared * shared / (total * squares) : 0.0;
        sum += (view.between(m, q, q) - expected) / totals(m);
      }
      return sum * inv_layers;
    }
    default:
      break;
  }
  assert(false && "not a configuration-model measure");
  return 0.0;
}

// Contribution of the unordered community pair {q, l} to a block-model
// measure, so that Q = Σ_{q<=l} pair_term(q, l). Zero-weight terms vanish.
template <typename View>
double pair_term(MeasureKind kind, const View& view, const Eigen::VectorXd& totals, int q, int l) {
  const Index n_layers = totals.size();
  const bool restricted = kind == MeasureKind::DCRMLSBM || kind == MeasureKind::SDRMLSBM;
  const bool shared_degree = kind == MeasureKind::SDMLSBM || kind == MeasureKind::SDRMLSBM;

  double pooled = 0.0;  // Σ_m e_ql^(m) / 2L^(m)
  bool any = false;
  for (Index m = 0; m < n_layers; ++m) {
    const double p = view.between(m, q, l) / totals(m);
    if (p > 0.0) {
      pooled += p;
      any = true;
    }
  }
  if (!any) return 0.0;

  double shared_q = 0.0;
  double shared_l = 0.0;
  if (shared_degree) {
    for (Index m = 0; m < n_layers; ++m) {
      shared_q += view.degree(q, m) / totals(m);
      shared_l += view.degree(l, m) / totals(m);
    }
  }

  double value = 0.0;
  for (Index m = 0; m < n_layers; ++m) {
    const double p = view.between(m, q, l) / totals(m);
    if (!(p > 0.0)) continue;
    const double numerator = restricted ? pooled : p;
    const double denominator = shared_degree
                                   ? shared_q * shared_l
                                   : (view.degree(q, m) / totals(m)) * (view.degree(l, m) / totals(m));
    if (!(denominator > 0.0)) continue;
    value += p * std::log(numerator / denominator);
  }
  return value;
}

template <typename View>
double evaluate_view(MeasureKind kind, const View& view, const CommunityStats& stats) {
  const auto& totals = stats.layer_totals();
  const int k = stats.k();
  double q_total = 0.0;
  if (is_configuration_measure(kind)) {
    for (int q = 0; q < k; ++q) q_total += community_term(kind, view, totals, stats.grand_total(), q);
  } else {
    for (int l = 0; l < k; ++l) {
      for (int q = 0; q <= l; ++q) q_total += pair_term(kind, view, totals, q, l);
    }
  }
  return q_total;
}

// Local update: only terms touching `from` or `to` change.
double local_delta(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links, int to) {
  const int from = links.home();
  if (from == to) return 0.0;
  const CurrentView before{stats};
  const MovedView after{stats, links, from, to};
  const auto& totals = stats.layer_totals();
  if (is_configuration_measure(kind)) {
    const double total = stats.grand_total();
    return community_term(kind, after, totals, total, from) + community_term(kind, after, totals, total, to) -
           community_term(kind, before, totals, total, from) - community_term(kind, before, totals, total, to);
  }
  double delta = 0.0;
  for (int c = 0; c < stats.k(); ++c) {
    delta += pair_term(kind, after, totals, from, c) - pair_term(kind, before, totals, from, c);
    if (c != from) delta += pair_term(kind, after, totals, to, c) - pair_term(kind, before, totals, to, c);
  }
  return delta;
}

// One-step gain of joining an isolated node to a community with layer degrees
// `community_degree` (node excluded) when the node has weights `links.to(target, m)`.
// Written with e_{i,q} = 2·(weight from i to q), the ordered-pair count.
template <typename DegreeFn>
double isolated_join_gain(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links, int target,
                          DegreeFn community_degree) {
  const auto& totals = stats.layer_totals();
  const Index n_layers = totals.size();
  const double total_half = stats.grand_total() / 2.0;  // L
  double shared_q = 0.0;                                // Σ_m e_q^(m)
  for (Index m = 0; m < n_layers; ++m) shared_q += community_degree(m);
  const double shared_i = links.total_degree();  // Σ_m k_i^(m)

  double gain = 0.0;
  for (Index m = 0; m < n_layers; ++m) {
    const double layer_half = totals(m) / 2.0;  // L^(m)
    const double e_iq = 2.0 * links.to(target, m);
    const double e_q = community_degree(m);
    const double k_i = links.degree(m);
    double term = 0.0;
    switch (kind) {
      case MeasureKind::MNavrg:
        term = e_iq - e_q * k_i / layer_half;
        break;
      case MeasureKind::SDavrg:
        term = e_iq - (layer_half / total_half) * shared_q * shared_i / total_half;
        break;
      case MeasureKind::SDlocal:
        term = e_iq - (k_i * shared_q + shared_i * e_q) / (2.0 * total_half);
        break;
      default:
        assert(false);
    }
    gain += term / totals(m);
  }
  return gain / static_cast<double>(n_layers);
}

bool has_closed_form_join(MeasureKind kind) {
  return kind == MeasureKind::MNavrg || kind == MeasureKind::SDavrg || kind == MeasureKind::SDlocal;
}

void check_node_and_communities(const CommunityStats& stats, const MultiLayerGraph& g, Index node,
                                int from, int to) {
  if (node < 0 || node >= g.n_nodes()) throw InputError(fmt::format("node {} out of range", node));
  if (stats.labels().size() != static_cast<std::size_t>(g.n_nodes())) {
    throw InputError("community statistics belong to a different graph");
  }
  if (from < 0 || from >= stats.k() || to < 0 || to >= stats.k()) {
    throw InputError(fmt::format("community out of range in move {} -> {}", from + 1, to + 1));
  }
  if (stats.label(node) != from) throw InputError(fmt::format("node {} is not in community {}", node, from + 1));
  if (from == to) throw InputError("a move needs distinct source and target communities");
}

}  // namespace

double evaluate(MeasureKind kind, const CommunityStats& stats) {
  check_measure_defined(kind, stats.layer_totals());
  return evaluate_view(kind, CurrentView{stats}, stats);
}

double q_ng(const CommunityStats& stats) {
  if (stats.n_layers() != 1) throw PreconditionError("q_ng needs a single-layer graph; aggregate first");
  return evaluate(MeasureKind::NgAggregate, stats);
}

double q_mnavrg(const CommunityStats& stats) { return evaluate(MeasureKind::MNavrg, stats); }
double q_sdavrg(const CommunityStats& stats) { return evaluate(MeasureKind::SDavrg, stats); }
double q_sdlocal(const CommunityStats& stats) { return evaluate(MeasureKind::SDlocal, stats); }
double q_sdratio(const CommunityStats& stats) { return evaluate(MeasureKind::SDratio, stats); }
double q_dcmlsbm(const CommunityStats& stats) { return evaluate(MeasureKind::DCMLSBM, stats); }
double q_dcrmlsbm(const CommunityStats& stats) { return evaluate(MeasureKind::DCRMLSBM, stats); }
double q_sdmlsbm(const CommunityStats& stats) { return evaluate(MeasureKind::SDMLSBM, stats); }
double q_sdrmlsbm(const CommunityStats& stats) { return evaluate(MeasureKind::SDRMLSBM, stats); }

double delta_isolated_join(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links, int target) {
  assert(stats.community_size(links.home()) == 1);
  if (!has_closed_form_join(kind)) return local_delta(kind, stats, links, target);
  return isolated_join_gain(kind, stats, links, target,
                            [&](Index m) { return stats.community_degrees()(target, m); });
}

double delta_move(MeasureKind kind, const CommunityStats& stats, const NodeLinks& links, int to) {
  const int from = links.home();
  if (from == to) return 0.0;
  if (!has_closed_form_join(kind)) return local_delta(kind, stats, links, to);
  // Isolate the node, then join `to`; subtract the gain of rejoining `from`.
  const double join_to = isolated_join_gain(kind, stats, links, to,
                                            [&](Index m) { return stats.community_degrees()(to, m); });
  const double join_from = isolated_join_gain(kind, stats, links, from, [&](Index m) {
    return stats.community_degrees()(from, m) - links.degree(m);
  });
  return join_to - join_from;
}

double delta_isolated_join(MeasureKind kind, const CommunityStats& stats, Index node, int target,
                           const MultiLayerGraph& g) {
  if (node < 0 || node >= g.n_nodes()) throw InputError(fmt::format("node {} out of range", node));
  const int from = stats.label(node);
  check_node_and_communities(stats, g, node, from, target);
  if (stats.community_size(from) != 1) {
    throw InputError(fmt::format("node {} is not alone in its community", node));
  }
  check_measure_defined(kind, stats.layer_totals());
  NodeLinks links(stats.k(), g.n_layers());
  links.gather(g, stats, node);
  return delta_isolated_join(kind, stats, links, target);
}

double delta_move(MeasureKind kind, const CommunityStats& stats, Index node, int from, int to,
                  const MultiLayerGraph& g) {
  check_node_and_communities(stats, g, node, from, to);
  check_measure_defined(kind, stats.layer_totals());
  NodeLinks links(stats.k(), g.n_layers());
  links.gather(g, stats, node);
  return delta_move(kind, stats, links, to);
}

}  // namespace mlcd
