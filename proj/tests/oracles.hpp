#pragma once

// Literal summation formulas over the dense adjacency matrices, independent of
// CommunityStats and of the library's algebraic rewrites.

#include "mlcd/graph.hpp"
#include "mlcd/modularity.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using mlcd::Index;
using Dense = std::vector<Eigen::MatrixXd>;

inline Dense dense_layers(const mlcd::MultiLayerGraph& g) {
  Dense out;
  for (Index m = 0; m < g.n_layers(); ++m) out.emplace_back(Eigen::MatrixXd(g.layer(m)));
  return out;
}

inline double row_sum(const Eigen::MatrixXd& a, Index i) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) s += a(i, j);
  return s;
}

inline double total(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) s += row_sum(a, i);
  return s;
}

// e_ql^(m) = Σ_ij A_ij^(m) I(z_i = q, z_j = l)
inline double e_between(const Eigen::MatrixXd& a, const std::vector<int>& z, int q, int l) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (z[std::size_t(i)] == q && z[std::size_t(j)] == l) s += a(i, j);
    }
  }
  return s;
}

// e_q^(m) = Σ_i k_i^(m) I(z_i = q)
inline double e_degree(const Eigen::MatrixXd& a, const std::vector<int>& z, int q) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    if (z[std::size_t(i)] == q) s += row_sum(a, i);
  }
  return s;
}

inline int n_labels(const std::vector<int>& z) {
  int k = 0;
  for (int v : z) k = std::max(k, v + 1);
  return k;
}

inline double ng(const Eigen::MatrixXd& a, const std::vector<int>& z) {
  const double two_l = total(a);
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (z[std::size_t(i)] != z[std::size_t(j)]) continue;
      s += a(i, j) - row_sum(a, i) * row_sum(a, j) / two_l;
    }
  }
  return s / two_l;
}

// Configuration-model measures in their node-pair form.
inline double configuration(mlcd::MeasureKind kind, const Dense& layers, const std::vector<int>& z) {
  using mlcd::MeasureKind;
  const Index n = layers.front().rows();
  const std::size_t m_count = layers.size();
  if (kind == MeasureKind::NgAggregate) {
    Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : layers) agg += a;
    return ng(agg, z);
  }
  double two_l = 0.0;
  for (const auto& a : layers) two_l += total(a);
  std::vector<double> shared_k(std::size_t(n), 0.0);
  for (const auto& a : layers) {
    for (Index i = 0; i < n; ++i) shared_k[std::size_t(i)] += row_sum(a, i);
  }
  double q_sum = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto& a = layers[m];
    const double two_lm = total(a);
    const double lm = two_lm / 2.0;
    double layer_sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const int zi = z[std::size_t(i)];
        const int zj = z[std::size_t(j)];
        if (zi != zj) continue;
        const double ki = shared_k[std::size_t(i)];
        const double kj = shared_k[std::size_t(j)];
        double expected = 0.0;
        switch (kind) {
          case MeasureKind::MNavrg:
            expected = row_sum(a, i) * row_sum(a, j) / two_lm;
            break;
          case MeasureKind::SDavrg:
            expected = lm * ki * kj / (2.0 * (two_l / 2.0) * (two_l / 2.0));
            break;
          case MeasureKind::SDlocal: {
            const double num = e_degree(a, z, zi) + e_degree(a, z, zj);
            double den = 0.0;
            for (const auto& b : layers) den += e_degree(b, z, zi) + e_degree(b, z, zj);
            expected = ki * kj > 0.0 ? num * ki * kj / (den * two_l) : 0.0;
            break;
          }
          case MeasureKind::SDratio: {
            const double num = e_degree(a, z, zi) * e_degree(a, z, zj);
            double den = 0.0;
            for (const auto& b : layers) den += e_degree(b, z, zi) * e_degree(b, z, zj);
            expected = ki * kj > 0.0 ? num * ki * kj / (den * two_l) : 0.0;
            break;
          }
          default:
            break;
        }
        layer_sum += (a(i, j) - expected) / two_lm;
      }
    }
    q_sum += layer_sum;
  }
  return q_sum / static_cast<double>(m_count);
}

// Block-model measures summed over m and q <= l as printed.
inline double block_model(mlcd::MeasureKind kind, const Dense& layers, const std::vector<int>& z) {
  using mlcd::MeasureKind;
  const int k = n_labels(z);
  const bool restricted = kind == MeasureKind::DCRMLSBM || kind == MeasureKind::SDRMLSBM;
  const bool shared = kind == MeasureKind::SDMLSBM || kind == MeasureKind::SDRMLSBM;
  double q_sum = 0.0;
  for (const auto& a : layers) {
    const double two_lm = total(a);
    for (int q = 0; q < k; ++q) {
      for (int l = q; l < k; ++l) {
        const double p = e_between(a, z, q, l) / two_lm;
        if (p == 0.0) continue;
        double num = p;
        if (restricted) {
          num = 0.0;
          for (const auto& b : layers) num += e_between(b, z, q, l) / total(b);
        }
        double den = 0.0;
        if (shared) {
          double pq = 0.0, pl = 0.0;
          for (const auto& b : layers) {
            pq += e_degree(b, z, q) / total(b);
            pl += e_degree(b, z, l) / total(b);
          }
          den = pq * pl;
        } else {
          den = (e_degree(a, z, q) / two_lm) * (e_degree(a, z, l) / two_lm);
        }
        q_sum += p * std::log(num / den);
      }
    }
  }
  return q_sum;
}

inline double measure(mlcd::MeasureKind kind, const Dense& layers, const std::vector<int>& z) {
  return mlcd::is_configuration_measure(kind) ? configuration(kind, layers, z) : block_model(kind, layers, z);
}

// Λ1 and Λ2 as printed, constant omitted.
inline double lambda1(const Dense& layers) {
  double s = 0.0, l = 0.0;
  for (const auto& a : layers) {
    const double two_lm = total(a);
    l += two_lm / 2.0;
    for (Index i = 0; i < a.rows(); ++i) {
      const double k = row_sum(a, i);
      if (k > 0.0) s += k * std::log(k / std::sqrt(two_lm));
    }
  }
  return s - l;
}

inline double lambda2(const Dense& layers) {
  const Index n = layers.front().rows();
  double two_l = 0.0;
  for (const auto& a : layers) two_l += total(a);
  const double l = two_l / 2.0;
  double s = 0.0;
  for (Index i = 0; i < n; ++i) {
    double shared = 0.0;
    for (const auto& a : layers) shared += row_sum(a, i);
    for (const auto& a : layers) {
      const double k = row_sum(a, i);
      if (k > 0.0) s += k * std::log(shared / std::sqrt(two_l));
    }
  }
  for (const auto& a : layers) {
    const double lm = total(a) / 2.0;
    if (lm > 0.0) s += lm * std::log(lm / l);
  }
  return s - l;
}

// Plug-in entropies and mutual information of two labelings, natural log.
inline double plugin_nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  const int ka = n_labels(a), kb = n_labels(b);
  std::vector<double> pa(std::size_t(ka), 0.0), pb(std::size_t(kb), 0.0);
  std::vector<std::vector<double>> pab(std::size_t(ka), std::vector<double>(std::size_t(kb), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[std::size_t(a[i])] += 1.0 / n;
    pb[std::size_t(b[i])] += 1.0 / n;
    pab[std::size_t(a[i])][std::size_t(b[i])] += 1.0 / n;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (double p : pa) if (p > 0) ha -= p * std::log(p);
  for (double p : pb) if (p > 0) hb -= p * std::log(p);
  for (int x = 0; x < ka; ++x) {
    for (int y = 0; y < kb; ++y) {
      const double p = pab[std::size_t(x)][std::size_t(y)];
      if (p > 0) mi += p * std::log(p / (pa[std::size_t(x)] * pb[std::size_t(y)]));
    }
  }
  return 2.0 * mi / (ha + hb);
}

}  // namespace oracle
