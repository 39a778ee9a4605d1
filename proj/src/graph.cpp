#include "mlcd/graph.hpp"

#include "mlcd/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace mlcd {

namespace {

void validate_layer(const SparseLayer& layer, Index n, Index m) {
  if (layer.rows() != n || layer.cols() != n) {
    throw InputError(fmt::format("layer {} is {}x{}, expected {}x{}", m, layer.rows(),
                                 layer.cols(), n, n));
  }
  double scale = 0.0;
  for (Index j = 0; j < layer.outerSize(); ++j) {
    for (SparseLayer::InnerIterator it(layer, j); it; ++it) {
      if (!std::isfinite(it.value()) || it.value() < 0.0) {
        throw InputError(fmt::format("layer {} has invalid weight {} at ({}, {})", m,
                                     it.value(), it.row(), it.col()));
      }
      scale = std::max(scale, it.value());
    }
  }
  const SparseLayer transposed = layer.transpose();
  const SparseLayer diff = layer - transposed;
  for (Index j = 0; j < diff.outerSize(); ++j) {
    for (SparseLayer::InnerIterator it(diff, j); it; ++it) {
      if (std::abs(it.value()) > 1e-12 * (1.0 + scale)) {
        throw InputError(fmt::format("layer {} is not symmetric at ({}, {})", m, it.row(),
                                     it.col()));
      }
    }
  }
}

}  // namespace

MultiLayerGraph::MultiLayerGraph(std::vector<SparseLayer> layers,
                                 std::vector<std::string> node_ids,
                                 std::vector<std::string> layer_names)
    : layers_(std::move(layers)),
      node_ids_(std::move(node_ids)),
      layer_names_(std::move(layer_names)) {
  if (layers_.empty()) throw InputError("a multi-layer graph needs at least one layer");
  n_nodes_ = layers_.front().rows();
  const Index n_layers = static_cast<Index>(layers_.size());
  for (Index m = 0; m < n_layers; ++m) {
    auto& layer = layers_[static_cast<std::size_t>(m)];
    layer.prune(0.0);
    layer.makeCompressed();
    validate_layer(layer, n_nodes_, m);
  }
  if (node_ids_.empty()) {
    node_ids_.reserve(static_cast<std::size_t>(n_nodes_));
    for (Index i = 0; i < n_nodes_; ++i) node_ids_.push_back(std::to_string(i));
  } else if (static_cast<Index>(node_ids_.size()) != n_nodes_) {
    throw InputError("node id count does not match the number of nodes");
  }
  if (layer_names_.empty()) {
    for (Index m = 0; m < n_layers; ++m) layer_names_.push_back(fmt::format("layer{}", m + 1));
  } else if (static_cast<Index>(layer_names_.size()) != n_layers) {
    throw InputError("layer name count does not match the number of layers");
  }

  degrees_.setZero(n_nodes_, n_layers);
  for (Index m = 0; m < n_layers; ++m) {
    const auto& layer = layers_[static_cast<std::size_t>(m)];
    for (Index j = 0; j < layer.outerSize(); ++j) {
      for (SparseLayer::InnerIterator it(layer, j); it; ++it) degrees_(j, m) += it.value();
    }
  }
  layer_totals_ = degrees_.colwise().sum().transpose();
  grand_total_ = layer_totals_.sum();
}

MultiLayerGraph MultiLayerGraph::from_edges(Index n_nodes, Index n_layers,
                                            std::span<const LayerEdge> edges,
                                            std::vector<std::string> node_ids,
                                            std::vector<std::string> layer_names) {
  if (n_layers < 1) throw InputError("a multi-layer graph needs at least one layer");
  std::vector<std::vector<Eigen::Triplet<double>>> triplets(static_cast<std::size_t>(n_layers));
  for (const auto& e : edges) {
    if (e.layer < 0 || e.layer >= n_layers || e.u < 0 || e.u >= n_nodes || e.v < 0 ||
        e.v >= n_nodes) {
      throw InputError(fmt::format("edge ({}, {}) in layer {} is out of range", e.u, e.v, e.layer));
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InputError(fmt::format("edge ({}, {}) has invalid weight {}", e.u, e.v, e.weight));
    }
    auto& t = triplets[static_cast<std::size_t>(e.layer)];
    if (e.u == e.v) {
      t.emplace_back(e.u, e.u, 2.0 * e.weight);
    } else {
      t.emplace_back(e.u, e.v, e.weight);
      t.emplace_back(e.v, e.u, e.weight);
    }
  }
  std::vector<SparseLayer> layers;
  layers.reserve(static_cast<std::size_t>(n_layers));
  for (auto& t : triplets) {
    SparseLayer layer(n_nodes, n_nodes);
    layer.setFromTriplets(t.begin(), t.end());
    layers.push_back(std::move(layer));
  }
  return MultiLayerGraph(std::move(layers), std::move(node_ids), std::move(layer_names));
}

double MultiLayerGraph::weight(Index m, Index i, Index j) const {
  const double stored = layer(m).coeff(i, j);
  return i == j ? stored / 2.0 : stored;
}

// ---- Partition ----

Partition::Partition(std::vector<int> labels_in, int k_in) : labels(std::move(labels_in)), k(k_in) {
  if (k < 1) throw InputError("a partition needs at least one community");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw InputError(fmt::format("label {} of node {} outside [1, {}]", labels[i] + 1, i, k));
    }
  }
}

Partition Partition::from_labels(std::vector<int> labels) {
  int k = 1;
  for (int l : labels) k = std::max(k, l + 1);
  return Partition(std::move(labels), k);
}

Partition Partition::singletons(Index n) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
  return Partition(std::move(labels), std::max<int>(1, static_cast<int>(n)));
}

Partition Partition::single_block(Index n) {
  return Partition(std::vector<int>(static_cast<std::size_t>(n), 0), 1);
}

int Partition::count_nonempty() const {
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  int count = 0;
  for (int l : labels) {
    if (!seen[static_cast<std::size_t>(l)]) {
      seen[static_cast<std::size_t>(l)] = 1;
      ++count;
    }
  }
  return count;
}

Partition Partition::compacted() const {
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& target = remap[static_cast<std::size_t>(labels[i])];
    if (target < 0) target = next++;
    out[i] = target;
  }
  return Partition(std::move(out), std::max(1, next));
}

void Partition::validate(Index n) const {
  if (size() != n) {
    throw InputError(fmt::format("partition has {} labels for {} nodes", size(), n));
  }
  for (int l : labels) {
    if (l < 0 || l >= k) throw InputError(fmt::format("label {} outside [1, {}]", l + 1, k));
  }
}

// ---- CommunityStats ----

CommunityStats::CommunityStats(const MultiLayerGraph& g, const Partition& z)
    : k_(z.k),
      layer_totals_(g.layer_totals()),
      grand_total_(g.grand_total()),
      labels_(z.labels),
      sizes_(static_cast<std::size_t>(z.k), 0) {
  z.validate(g.n_nodes());
  const Index n_layers = g.n_layers();
  between_.assign(static_cast<std::size_t>(n_layers), Eigen::MatrixXd::Zero(k_, k_));
  community_degrees_.setZero(k_, n_layers);
  for (int l : labels_) ++sizes_[static_cast<std::size_t>(l)];
  for (Index m = 0; m < n_layers; ++m) {
    auto& e = between_[static_cast<std::size_t>(m)];
    const auto& layer = g.layer(m);
    for (Index j = 0; j < layer.outerSize(); ++j) {
      const int zj = label(j);
      for (SparseLayer::InnerIterator it(layer, j); it; ++it) e(label(it.row()), zj) += it.value();
    }
    for (Index i = 0; i < g.n_nodes(); ++i) community_degrees_(label(i), m) += g.degrees()(i, m);
  }
}

CommunityStats init_stats(const MultiLayerGraph& g, const Partition& z) {
  return CommunityStats(g, z);
}

int CommunityStats::count_nonempty() const {
  return static_cast<int>(std::count_if(sizes_.begin(), sizes_.end(), [](int s) { return s > 0; }));
}

void CommunityStats::apply_move(const MultiLayerGraph& g, Index node, int from, int to) {
  if (node < 0 || node >= g.n_nodes()) throw InputError(fmt::format("node {} out of range", node));
  if (from < 0 || from >= k_ || to < 0 || to >= k_) {
    throw InputError(fmt::format("community out of range in move {} -> {}", from + 1, to + 1));
  }
  if (label(node) != from) {
    throw InputError(fmt::format("node {} is not in community {}", node, from + 1));
  }
  if (from == to) throw InputError("a move needs distinct source and target communities");
  NodeLinks links(k_, n_layers());
  links.gather(g, *this, node);
  apply_move(links, to);
}

void CommunityStats::apply_move(const NodeLinks& links, int to) {
  const int from = links.home();
  const Index node = links.node();
  for (Index m = 0; m < n_layers(); ++m) {
    auto& e = between_[static_cast<std::size_t>(m)];
    for (int c : links.neighbor_communities()) {
      const double w = links.to(c, m);
      if (w == 0.0) continue;
      e(from, c) -= w;
      e(c, from) -= w;
      e(to, c) += w;
      e(c, to) += w;
    }
    const double loop = links.loop(m);
    e(from, from) -= loop;
    e(to, to) += loop;
    community_degrees_(from, m) -= links.degree(m);
    community_degrees_(to, m) += links.degree(m);
  }
  labels_[static_cast<std::size_t>(node)] = to;
  --sizes_[static_cast<std::size_t>(from)];
  ++sizes_[static_cast<std::size_t>(to)];
}

// ---- NodeLinks ----

NodeLinks::NodeLinks(int k, Index n_layers)
    : weights_(Eigen::MatrixXd::Zero(k, n_layers)),
      loops_(Eigen::VectorXd::Zero(n_layers)),
      degrees_(Eigen::VectorXd::Zero(n_layers)),
      marked_(static_cast<std::size_t>(k), 0) {}

void NodeLinks::gather(const MultiLayerGraph& g, const CommunityStats& stats, Index node) {
  for (int c : touched_) {
    weights_.row(c).setZero();
    marked_[static_cast<std::size_t>(c)] = 0;
  }
  touched_.clear();
  node_ = node;
  home_ = stats.label(node);
  for (Index m = 0; m < g.n_layers(); ++m) {
    loops_(m) = 0.0;
    for (SparseLayer::InnerIterator it(g.layer(m), node); it; ++it) {
      const Index j = it.row();
      if (j == node) {
        loops_(m) = it.value();
        continue;
      }
      const int c = stats.label(j);
      weights_(c, m) += it.value();
      if (!marked_[static_cast<std::size_t>(c)]) {
        marked_[static_cast<std::size_t>(c)] = 1;
        touched_.push_back(c);
      }
    }
    degrees_(m) = g.degrees()(node, m);
  }
  total_degree_ = degrees_.sum();
  std::sort(touched_.begin(), touched_.end());
}

// ---- derived graphs ----

MultiLayerGraph induced_subgraph(const MultiLayerGraph& g, std::span<const Index> keep) {
  std::vector<Index> remap(static_cast<std::size_t>(g.n_nodes()), -1);
  std::vector<std::string> ids;
  ids.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    remap[static_cast<std::size_t>(keep[i])] = static_cast<Index>(i);
    ids.push_back(g.node_ids()[static_cast<std::size_t>(keep[i])]);
  }
  const Index n = static_cast<Index>(keep.size());
  std::vector<SparseLayer> layers;
  for (Index m = 0; m < g.n_layers(); ++m) {
    std::vector<Eigen::Triplet<double>> t;
    const auto& layer = g.layer(m);
    for (Index j = 0; j < layer.outerSize(); ++j) {
      const Index nj = remap[static_cast<std::size_t>(j)];
      if (nj < 0) continue;
      for (SparseLayer::InnerIterator it(layer, j); it; ++it) {
        const Index ni = remap[static_cast<std::size_t>(it.row())];
        if (ni >= 0) t.emplace_back(ni, nj, it.value());
      }
    }
    SparseLayer sub(n, n);
    sub.setFromTriplets(t.begin(), t.end());
    layers.push_back(std::move(sub));
  }
  return MultiLayerGraph(std::move(layers), std::move(ids), g.layer_names());
}

namespace {

template <typename Pred>
RestrictResult restrict_nodes(const MultiLayerGraph& g, Pred keep_node) {
  RestrictResult result;
  for (Index i = 0; i < g.n_nodes(); ++i) {
    if (keep_node(g.degrees().row(i))) {
      result.kept.push_back(i);
    } else {
      result.removed_ids.push_back(g.node_ids()[static_cast<std::size_t>(i)]);
    }
  }
  if (result.kept.empty()) throw PreconditionError("no nodes remain after restriction");
  result.graph = induced_subgraph(g, result.kept);
  return result;
}

}  // namespace

RestrictResult restrict_to_cross_layer_connected(const MultiLayerGraph& g) {
  return restrict_nodes(g, [](const auto& row) { return (row.array() > 0.0).all(); });
}

RestrictResult restrict_to_active_nodes(const MultiLayerGraph& g) {
  return restrict_nodes(g, [](const auto& row) { return (row.array() > 0.0).any(); });
}

MultiLayerGraph aggregate_layers(const MultiLayerGraph& g) {
  SparseLayer sum = g.layer(0);
  for (Index m = 1; m < g.n_layers(); ++m) sum += g.layer(m);
  std::vector<SparseLayer> layers{std::move(sum)};
  return MultiLayerGraph(std::move(layers), g.node_ids(), {"aggregate"});
}

MultiLayerGraph contract(const MultiLayerGraph& g, const Partition& z) {
  const Partition zc = z.compacted();
  const CommunityStats stats(g, zc);
  const int k = zc.k;
  std::vector<SparseLayer> layers;
  for (Index m = 0; m < g.n_layers(); ++m) {
    const auto& e = stats.between(m);
    std::vector<Eigen::Triplet<double>> t;
    for (int l = 0; l < k; ++l) {
      for (int q = 0; q <= l; ++q) {
        // mirror the upper triangle so the result is exactly symmetric
        const double w = e(q, l);
        if (w == 0.0) continue;
        t.emplace_back(q, l, w);
        if (q != l) t.emplace_back(l, q, w);
      }
    }
    SparseLayer layer(k, k);
    layer.setFromTriplets(t.begin(), t.end());
    layers.push_back(std::move(layer));
  }
  return MultiLayerGraph(std::move(layers), {}, g.layer_names());
}

}  // namespace mlcd
