#pragma once

#include "mlcd/graph.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace mlcd {

/// Normalizer of the mutual information: mean, geometric mean or max of the entropies.
enum class NmiVariant { Mean, Sqrt, Max };

NmiVariant parse_nmi_variant(std::string_view name);
std::string_view nmi_variant_name(NmiVariant variant);

/// Normalized mutual information, natural log. 1 when both partitions are single-cluster.
double nmi(const Partition& a, const Partition& b, NmiVariant variant = NmiVariant::Mean);

/// rows: labels of `a`, columns: labels of `b`.
Eigen::MatrixXi confusion_matrix(const Partition& a, const Partition& b);

/// Maximum-weight injective matching of rows to columns. Entry r is the
/// column matched to row r, or -1. Exact up to 20 rows/columns, greedy beyond.
std::vector<int> max_weight_matching(const Eigen::MatrixXi& weights, bool* exact = nullptr);

struct EvalReport {
  double nmi = 0.0;
  Eigen::MatrixXi confusion;  ///< detected × true
  std::vector<int> matching;  ///< detected community -> true community, -1 if unmatched
  Index agreement = 0;        ///< nodes on matched cells
  int k_detected = 0;
  int k_true = 0;
  bool exact_matching = true;
};

EvalReport optimal_assignment(const Partition& detected, const Partition& truth,
                              NmiVariant variant = NmiVariant::Mean);

/// (1/R) Σ_r (k_r - k_true)².
double mse_num_communities(std::span<const int> k_detected, int k_true);

}  // namespace mlcd
