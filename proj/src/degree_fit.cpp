#include "mlcd/error.hpp"
#include "mlcd/nullmodels.hpp"
#include "mlcd/sweep.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <cmath>

namespace mlcd {

namespace {

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double denom = std::sqrt((dx * dx).sum() * (dy * dy).sum());
  return denom > 0.0 ? (dx * dy).sum() / denom : std::nan("");
}

}  // namespace

DegreeFit emit_degree_fit(const MultiLayerGraph& g) {
  if (!(g.grand_total() > 0.0)) throw PreconditionError("degree fit needs a nonempty graph");
  const NullParams sd = fit_sd(g);
  const Eigen::MatrixXd& k = g.degrees();
  const Index n = g.n_nodes();
  const Index m_layers = g.n_layers();
  const Eigen::MatrixXd fitted = (sd.theta_sd * sd.beta.transpose()) * std::sqrt(g.grand_total());

  DegreeFit fit;
  fit.layer_names = g.layer_names();
  std::vector<Index> active;
  for (Index i = 0; i < n; ++i) {
    const bool zero = !(k.row(i).sum() > 0.0);
    if (!zero) active.push_back(i);
    for (Index m = 0; m < m_layers; ++m) {
      fit.rows.push_back({g.node_ids()[static_cast<std::size_t>(i)], m, k(i, m), fitted(i, m), zero});
    }
  }
  const auto count = static_cast<Index>(active.size());
  Eigen::MatrixXd obs(count, m_layers), fit_active(count, m_layers);
  for (Index r = 0; r < count; ++r) {
    obs.row(r) = k.row(active[static_cast<std::size_t>(r)]);
    fit_active.row(r) = fitted.row(active[static_cast<std::size_t>(r)]);
  }
  fit.fit_correlation.resize(m_layers);
  fit.layer_correlation.resize(m_layers, m_layers);
  for (Index m = 0; m < m_layers; ++m) {
    fit.fit_correlation(m) = pearson(obs.col(m), fit_active.col(m));
    for (Index l = 0; l < m_layers; ++l) fit.layer_correlation(m, l) = pearson(obs.col(m), obs.col(l));
  }
  return fit;
}

void write_degree_fit_csv(std::ostream& out, const DegreeFit& fit) {
  fmt::print(out, "node,layer,observed,fitted,zero_degree\n");
  for (const auto& row : fit.rows) {
    fmt::print(out, "{},{},{:.17g},{:.17g},{}\n", row.node, fit.layer_names[static_cast<std::size_t>(row.layer)],
               row.observed, row.fitted, row.zero_degree ? 1 : 0);
  }
}

}  // namespace mlcd
