#include "mlcd/eval.hpp"

#include "mlcd/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlcd {

namespace {

constexpr Index kExactMatchingLimit = 20;

void check_lengths(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw InputError(fmt::format("partitions have different lengths ({} vs {})", a.size(), b.size()));
  }
}

double entropy(const Eigen::VectorXd& counts, double n) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) h -= counts(i) / n * std::log(counts(i) / n);
  }
  return h;
}

// Hungarian algorithm on a square cost matrix, minimizing.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

NmiVariant parse_nmi_variant(std::string_view name) {
  if (name == "mean") return NmiVariant::Mean;
  if (name == "sqrt") return NmiVariant::Sqrt;
  if (name == "max") return NmiVariant::Max;
  throw InputError(fmt::format("unknown NMI variant '{}' (mean, sqrt, max)", name));
}

std::string_view nmi_variant_name(NmiVariant variant) {
  switch (variant) {
    case NmiVariant::Mean: return "mean";
    case NmiVariant::Sqrt: return "sqrt";
    case NmiVariant::Max: return "max";
  }
  return "";
}

Eigen::MatrixXi confusion_matrix(const Partition& a, const Partition& b) {
  check_lengths(a, b);
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(a.k, b.k);
  for (std::size_t i = 0; i < a.labels.size(); ++i) ++table(a.labels[i], b.labels[i]);
  return table;
}

double nmi(const Partition& a, const Partition& b, NmiVariant variant) {
  check_lengths(a, b);
  if (a.size() == 0) throw InputError("NMI of empty partitions is undefined");
  const Eigen::MatrixXd table = confusion_matrix(a, b).cast<double>();
  const double n = static_cast<double>(a.size());
  const Eigen::VectorXd rows = table.rowwise().sum();
  const Eigen::VectorXd cols = table.colwise().sum().transpose();
  const double h1 = entropy(rows, n);
  const double h2 = entropy(cols, n);
  if (h1 == 0.0 && h2 == 0.0) return 1.0;

  // sorted terms keep the sum independent of argument order
  std::vector<double> terms;
  for (Index q = 0; q < table.rows(); ++q) {
    for (Index l = 0; l < table.cols(); ++l) {
      const double c = table(q, l);
      if (c > 0.0) terms.push_back(c / n * std::log(c * n / (rows(q) * cols(l))));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;

  double norm = 0.0;
  switch (variant) {
    case NmiVariant::Mean: norm = (h1 + h2) / 2.0; break;
    case NmiVariant::Sqrt: norm = std::sqrt(h1 * h2); break;
    case NmiVariant::Max: norm = std::max(h1, h2); break;
  }
  if (norm <= 0.0) return 0.0;
  return std::clamp(mi / norm, 0.0, 1.0);
}

std::vector<int> max_weight_matching(const Eigen::MatrixXi& weights, bool* exact) {
  const Index rows = weights.rows();
  const Index cols = weights.cols();
  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) {
    if (exact) *exact = true;
    return match;
  }
  const Index size = std::max(rows, cols);
  if (size <= kExactMatchingLimit) {
    if (exact) *exact = true;
    const double top = weights.maxCoeff();
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(size, size, top);
    cost.topLeftCorner(rows, cols) = (top - weights.cast<double>().array()).matrix();
    const auto assigned = hungarian(cost);
    for (Index r = 0; r < rows; ++r) {
      const int c = assigned[static_cast<std::size_t>(r)];
      if (c < cols) match[static_cast<std::size_t>(r)] = c;
    }
    return match;
  }
  if (exact) *exact = false;
  std::vector<char> row_used(static_cast<std::size_t>(rows), 0), col_used(static_cast<std::size_t>(cols), 0);
  while (true) {
    int best = -1;
    Index br = -1, bc = -1;
    for (Index r = 0; r < rows; ++r) {
      if (row_used[static_cast<std::size_t>(r)]) continue;
      for (Index c = 0; c < cols; ++c) {
        if (!col_used[static_cast<std::size_t>(c)] && weights(r, c) > best) {
          best = weights(r, c);
          br = r;
          bc = c;
        }
      }
    }
    if (br < 0) break;
    match[static_cast<std::size_t>(br)] = static_cast<int>(bc);
    row_used[static_cast<std::size_t>(br)] = col_used[static_cast<std::size_t>(bc)] = 1;
  }
  return match;
}

EvalReport optimal_assignment(const Partition& detected, const Partition& truth, NmiVariant variant) {
  check_lengths(detected, truth);
  EvalReport report;
  report.nmi = nmi(detected, truth, variant);
  report.confusion = confusion_matrix(detected, truth);
  report.matching = max_weight_matching(report.confusion, &report.exact_matching);
  for (std::size_t r = 0; r < report.matching.size(); ++r) {
    if (report.matching[r] >= 0) report.agreement += report.confusion(static_cast<Index>(r), report.matching[r]);
  }
  report.k_detected = detected.count_nonempty();
  report.k_true = truth.count_nonempty();
  return report;
}

double mse_num_communities(std::span<const int> k_detected, int k_true) {
  if (k_detected.empty()) throw InputError("MSE of the community count needs at least one replicate");
  double sum = 0.0;
  for (int k : k_detected) sum += static_cast<double>(k - k_true) * (k - k_true);
  return sum / static_cast<double>(k_detected.size());
}

}  // namespace mlcd
