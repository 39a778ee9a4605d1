#pragma once

#include "mlcd/graph.hpp"

#include <cstdint>
#include <vector>

namespace mlcd {

/// Degree structure of a multi-layer expected-degree null model.
enum class DegreeSharing {
  Independent,  ///< P_ij^(m) = θ_i^(m) θ_j^(m)
  Shared,       ///< P_ij^(m) = θ_i θ_j β_m, Σ_m β_m = 1
};

/// Fitted parameters of an expected-degree null model.
struct NullParams {
  DegreeSharing variant = DegreeSharing::Shared;
  Eigen::MatrixXd theta_id;  ///< N×M, independent-degree model only
  Eigen::VectorXd theta_sd;  ///< N, shared-degree model only
  Eigen::VectorXd beta;      ///< M, shared-degree model only

  Index n_nodes() const;
  Index n_layers() const;
  /// Poisson rate of an (i, j) edge in layer m.
  double rate(Index i, Index j, Index m) const;
};

/// θ_i^(m) = k_i^(m) / sqrt(2L^(m)). Throws if a layer is empty.
NullParams fit_id(const MultiLayerGraph& g);

/// θ_i = Σ_m k_i^(m) / sqrt(2L), β_m = L^(m) / L. Throws on an empty graph.
NullParams fit_sd(const MultiLayerGraph& g);

/// Maximized independent-degree log-likelihood Λ1, up to the additive
/// constant Σ log(A_ij!) shared with Λ2.
double loglik_id(const MultiLayerGraph& g);

/// Maximized shared-degree log-likelihood Λ2, same constant omitted.
double loglik_sd(const MultiLayerGraph& g);

/// 2(Λ1 - Λ2).
double lrt_statistic(const MultiLayerGraph& g);

/// Degrees of freedom MN - (N + M - 1) of the chi-square reference.
double lrt_degrees_of_freedom(Index n_nodes, Index n_layers);

/// Upper tail P(X >= x) of a chi-square with `df` degrees of freedom; 1 if df <= 0.
double chi_square_sf(double x, double df);

/// Independent Poisson edges A_ij^(m), i < j, no self-loops.
MultiLayerGraph sample_from_null(const NullParams& params, Index n, Index m, std::uint64_t seed);

struct LrtResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double statistic = 0.0;
  std::vector<double> boot_stats;
  double p_boot = 1.0;
  double p_chi2 = 1.0;
  double df = 0.0;
  int replicates = 0;
};

/// Fits the shared-degree model, draws B replicates from it and compares the
/// observed 2(Λ1 - Λ2) against them. p_boot = (1 + #{boot >= observed}) / (B + 1).
/// A replicate with an empty layer is redrawn with the next sub-seed, at most 10 times.
LrtResult bootstrap_lrt(const MultiLayerGraph& g, int replicates, std::uint64_t seed, unsigned threads = 0);

}  // namespace mlcd
