#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mlcd {

using Index = Eigen::Index;
using SparseLayer = Eigen::SparseMatrix<double>;

/// One undirected weighted edge of a given layer. u == v is a self-loop.
struct LayerEdge {
  Index layer;
  Index u;
  Index v;
  double weight;
};

/// Weighted undirected multi-layer graph on a shared node set.
///
/// Each layer is stored as a full symmetric sparse matrix in "stored form":
/// off-diagonal entries are the edge weights A_ij^(m) and diagonal entries
/// hold twice the self-loop weight. Row sums of the stored form are the
/// degrees k_i^(m), which keeps the community accumulators closed under
/// Louvain contraction. The graph is immutable after construction.
class MultiLayerGraph {
 public:
  MultiLayerGraph() = default;

  /// Builds from stored-form layers. Throws InputError unless every layer is
  /// square, of identical size, symmetric, finite and nonnegative.
  explicit MultiLayerGraph(std::vector<SparseLayer> layers,
                           std::vector<std::string> node_ids = {},
                           std::vector<std::string> layer_names = {});

  /// Builds from an undirected edge list; parallel entries are summed.
  static MultiLayerGraph from_edges(Index n_nodes, Index n_layers,
                                    std::span<const LayerEdge> edges,
                                    std::vector<std::string> node_ids = {},
                                    std::vector<std::string> layer_names = {});

  Index n_nodes() const { return n_nodes_; }
  Index n_layers() const { return static_cast<Index>(layers_.size()); }

  const SparseLayer& layer(Index m) const { return layers_[static_cast<std::size_t>(m)]; }

  /// Edge weight A_ij^(m); for i == j the self-loop weight.
  double weight(Index m, Index i, Index j) const;

  /// N×M matrix of degrees k_i^(m).
  const Eigen::MatrixXd& degrees() const { return degrees_; }
  /// Per-layer totals 2L^(m).
  const Eigen::VectorXd& layer_totals() const { return layer_totals_; }
  /// 2L.
  double grand_total() const { return grand_total_; }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<std::string>& layer_names() const { return layer_names_; }

 private:
  Index n_nodes_ = 0;
  std::vector<SparseLayer> layers_;
  std::vector<std::string> node_ids_;
  std::vector<std::string> layer_names_;
  Eigen::MatrixXd degrees_;
  Eigen::VectorXd layer_totals_;
  double grand_total_ = 0.0;
};

/// Community assignment. Labels are 0-based internally, in [0, k).
struct Partition {
  std::vector<int> labels;
  int k = 1;

  Partition() = default;
  Partition(std::vector<int> labels, int k);

  /// k is taken as max(label) + 1.
  static Partition from_labels(std::vector<int> labels);
  static Partition singletons(Index n);
  static Partition single_block(Index n);

  Index size() const { return static_cast<Index>(labels.size()); }
  /// Number of communities with at least one member.
  int count_nonempty() const;
  /// Relabels to 0..k'-1 in order of first appearance, dropping empty labels.
  Partition compacted() const;
  /// Throws InputError if the size differs from n or a label is out of range.
  void validate(Index n) const;
};

class NodeLinks;

/// Incremental accumulators e_ql^(m), e_q^(m) for one partition of one graph.
///
/// e_ql^(m) = Σ_ij A_ij^(m) I(z_i=q, z_j=l) is kept as a dense K×K matrix per
/// layer, so memory is O(M·K²); e_qq^(m) is twice the within-community weight.
class CommunityStats {
 public:
  /// Equivalent to init_stats(g, z).
  CommunityStats(const MultiLayerGraph& g, const Partition& z);

  int k() const { return k_; }
  Index n_layers() const { return static_cast<Index>(between_.size()); }

  /// K×K matrix e_ql^(m).
  const Eigen::MatrixXd& between(Index m) const { return between_[static_cast<std::size_t>(m)]; }
  /// K×M matrix of community degrees e_q^(m).
  const Eigen::MatrixXd& community_degrees() const { return community_degrees_; }
  const Eigen::VectorXd& layer_totals() const { return layer_totals_; }
  double grand_total() const { return grand_total_; }

  const std::vector<int>& labels() const { return labels_; }
  int label(Index node) const { return labels_[static_cast<std::size_t>(node)]; }
  int community_size(int q) const { return sizes_[static_cast<std::size_t>(q)]; }
  int count_nonempty() const;
  Partition partition() const { return Partition(labels_, k_); }

  /// Moves `node` from community `from` to `to`. O(Σ_m deg_m(node) + K·M).
  void apply_move(const MultiLayerGraph& g, Index node, int from, int to);

  /// Same as apply_move, reusing weights already gathered into `links`.
  void apply_move(const NodeLinks& links, int to);

 private:
  int k_;
  std::vector<Eigen::MatrixXd> between_;
  Eigen::MatrixXd community_degrees_;
  Eigen::VectorXd layer_totals_;
  double grand_total_;
  std::vector<int> labels_;
  std::vector<int> sizes_;
};

CommunityStats init_stats(const MultiLayerGraph& g, const Partition& z);

/// Weights from one node to each community, per layer: e_{i,q}^(m) counted once
/// (not as ordered pairs). Reusable scratch buffer; gather() only clears the
/// entries touched by the previous node.
class NodeLinks {
 public:
  NodeLinks(int k, Index n_layers);

  void gather(const MultiLayerGraph& g, const CommunityStats& stats, Index node);

  Index node() const { return node_; }
  int home() const { return home_; }
  /// Weight from node to community q in layer m, self-loop excluded.
  double to(int q, Index m) const { return weights_(q, m); }
  /// Stored-form diagonal of the node in layer m (twice its loop weight).
  double loop(Index m) const { return loops_(m); }
  double degree(Index m) const { return degrees_(m); }
  double total_degree() const { return total_degree_; }
  /// Communities of the neighbors, ascending, without duplicates.
  std::span<const int> neighbor_communities() const { return touched_; }
  int k() const { return static_cast<int>(weights_.rows()); }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd loops_;
  Eigen::VectorXd degrees_;
  double total_degree_ = 0.0;
  std::vector<int> touched_;
  std::vector<char> marked_;
  Index node_ = -1;
  int home_ = -1;
};

/// Subgraph induced by `keep` (ascending node indices); ids are carried over.
MultiLayerGraph induced_subgraph(const MultiLayerGraph& g, std::span<const Index> keep);

struct RestrictResult {
  MultiLayerGraph graph;
  std::vector<Index> kept;
  std::vector<std::string> removed_ids;
};

/// Keeps nodes with k_i^(m) > 0 in every layer. Throws if nothing remains.
RestrictResult restrict_to_cross_layer_connected(const MultiLayerGraph& g);

/// Keeps nodes with positive degree in at least one layer.
RestrictResult restrict_to_active_nodes(const MultiLayerGraph& g);

/// Single-layer graph with A_ij = Σ_m A_ij^(m).
MultiLayerGraph aggregate_layers(const MultiLayerGraph& g);

/// Collapses every nonempty community of `z` into one node per layer: the
/// contracted stored-form layer is exactly e^(m) restricted to nonempty
/// communities (self-loop weight e_qq^(m)/2). Node q of the result is the
/// q-th community of z.compacted().
MultiLayerGraph contract(const MultiLayerGraph& g, const Partition& z);

// ---- edge-list I/O ----

/// Treatment of repeated (u,v)/(v,u) lines for the same undirected pair.
enum class DuplicatePolicy {
  SumHalved,  ///< both directions present: (w_uv + w_vu) / 2; else the one present
  Sum,        ///< w_uv + w_vu
  Max,        ///< max(w_uv, w_vu)
};

DuplicatePolicy parse_duplicate_policy(const std::string& name);

struct EdgeListOptions {
  DuplicatePolicy duplicates = DuplicatePolicy::SumHalved;
};

/// Reads `layer u v [weight]` lines (whitespace separated, `#` comments).
MultiLayerGraph load_multilayer_edgelist(std::istream& in, const EdgeListOptions& options = {});
MultiLayerGraph load_multilayer_edgelist(const std::string& path, const EdgeListOptions& options = {});

/// Reads one `u v [weight]` file per layer; the layer name is the file stem.
MultiLayerGraph load_layer_files(std::span<const std::string> paths, const EdgeListOptions& options = {});

/// Writes `layer <TAB> u <TAB> v <TAB> weight`, each undirected edge once.
void write_multilayer_edgelist(std::ostream& out, const MultiLayerGraph& g);

/// Writes `node_id <TAB> community` with 1-based communities.
void write_partition(std::ostream& out, const MultiLayerGraph& g, const Partition& z);

struct LabeledPartition {
  std::vector<std::string> node_ids;
  std::vector<int> communities;  // as written in the file
};

LabeledPartition read_partition(std::istream& in);
LabeledPartition read_partition(const std::string& path);

/// Partition over g's nodes from a labeled file; every node must appear.
Partition partition_for_graph(const MultiLayerGraph& g, const LabeledPartition& labeled);

}  // namespace mlcd
