#pragma once

#include "mlcd/graph.hpp"

#include <cstdint>
#include <vector>

namespace mlcd {

enum class DegreeMode {
  None,         ///< plain multi-layer SBM
  Shared,       ///< one propensity per node, reused in every layer
  Independent,  ///< one propensity per node and layer
};

enum class ClampPolicy {
  Clamp,   ///< edge probabilities above 1 are clamped and counted
  Strict,  ///< an edge probability above 1 is an error
};

/// Connectivity of one layer: ρ·λ_q on the diagonal, ρ·ε elsewhere.
struct LayerSpec {
  double rho = 0.0;
  Eigen::VectorXd lambda;
  double epsilon = 0.0;
};

struct GeneratorSpec {
  Index n = 0;
  int k = 1;
  Eigen::VectorXd class_probs;
  std::vector<LayerSpec> layers;
  DegreeMode degree_mode = DegreeMode::None;
  double powerlaw_exponent = 2.5;
  std::uint64_t seed = 0;
  ClampPolicy clamp = ClampPolicy::Clamp;

  Index m_layers() const { return static_cast<Index>(layers.size()); }
  /// K×K block probability matrix of layer m.
  Eigen::MatrixXd connectivity(Index m) const;
  void validate() const;
};

/// Number of edge probabilities that exceeded 1 and were clamped.
struct SampleStats {
  std::size_t clamped = 0;
};

/// i.i.d. multinomial labels in [0, k).
Partition sample_labels(const GeneratorSpec& spec);

/// A_ij^(m) ~ Bernoulli(Π^(m)_{z_i z_j}) for i < j.
MultiLayerGraph sample_mlsbm(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats = nullptr);

/// Pareto propensities with minimum 1, normalized to sum 1 within each
/// community. N×1 for shared degrees, N×M for independent degrees.
Eigen::MatrixXd draw_propensities(const Partition& labels, const GeneratorSpec& spec);

/// A_ij^(m) ~ Bernoulli(min(1, θ_i θ_j n_q n_l Π^(m)_ql)), q = z_i, l = z_j, where
/// n_q is the size of community q. Constant θ within communities gives back
/// sample_mlsbm's edge probabilities.
MultiLayerGraph sample_dcmlsbm(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats = nullptr);
MultiLayerGraph sample_dcmlsbm(const Partition& labels, const GeneratorSpec& spec, const Eigen::MatrixXd& theta,
                               SampleStats* stats = nullptr);

/// Dispatches on spec.degree_mode.
MultiLayerGraph sample_graph(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats = nullptr);

/// Expected average degree of layer m ignoring clamping: (N-1) Σ_ql p_q p_l Π_ql.
double expected_layer_degree(const GeneratorSpec& spec, Index m);

}  // namespace mlcd
