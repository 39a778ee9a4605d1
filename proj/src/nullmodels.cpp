#include "mlcd/nullmodels.hpp"

#include "mlcd/error.hpp"
#include "mlcd/parallel.hpp"
#include "mlcd/random.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/core.h>

#include <cmath>

namespace mlcd {

namespace {

double xlogy(double x, double y) { return x > 0.0 ? x * std::log(y) : 0.0; }

void require_nonempty_layers(const MultiLayerGraph& g) {
  for (Index m = 0; m < g.n_layers(); ++m) {
    if (!(g.layer_totals()(m) > 0.0)) throw PreconditionError(fmt::format("layer {} has no edges", m + 1));
  }
}

}  // namespace

Index NullParams::n_nodes() const {
  return variant == DegreeSharing::Independent ? theta_id.rows() : theta_sd.size();
}

Index NullParams::n_layers() const {
  return variant == DegreeSharing::Independent ? theta_id.cols() : beta.size();
}

double NullParams::rate(Index i, Index j, Index m) const {
  if (variant == DegreeSharing::Independent) return theta_id(i, m) * theta_id(j, m);
  return theta_sd(i) * theta_sd(j) * beta(m);
}

NullParams fit_id(const MultiLayerGraph& g) {
  require_nonempty_layers(g);
  NullParams params;
  params.variant = DegreeSharing::Independent;
  params.theta_id = g.degrees() * g.layer_totals().cwiseSqrt().cwiseInverse().asDiagonal();
  return params;
}

NullParams fit_sd(const MultiLayerGraph& g) {
  if (!(g.grand_total() > 0.0)) throw PreconditionError("empty graph: total edge weight is 0");
  NullParams params;
  params.variant = DegreeSharing::Shared;
  params.theta_sd = g.degrees().rowwise().sum() / std::sqrt(g.grand_total());
  params.beta = g.layer_totals() / g.grand_total();
  return params;
}

double loglik_id(const MultiLayerGraph& g) {
  require_nonempty_layers(g);
  const auto& k = g.degrees();
  double value = 0.0;
  for (Index m = 0; m < g.n_layers(); ++m) {
    const double scale = std::sqrt(g.layer_totals()(m));
    for (Index i = 0; i < g.n_nodes(); ++i) value += xlogy(k(i, m), k(i, m) / scale);
  }
  return value - g.grand_total() / 2.0;
}

double loglik_sd(const MultiLayerGraph& g) {
  require_nonempty_layers(g);
  const auto& k = g.degrees();
  const double scale = std::sqrt(g.grand_total());
  double value = 0.0;
  for (Index i = 0; i < g.n_nodes(); ++i) {
    const double shared = k.row(i).sum();
    for (Index m = 0; m < g.n_layers(); ++m) value += xlogy(k(i, m), shared / scale);
  }
  const double total_half = g.grand_total() / 2.0;
  for (Index m = 0; m < g.n_layers(); ++m) {
    const double layer_half = g.layer_totals()(m) / 2.0;
    value += xlogy(layer_half, layer_half / total_half);
  }
  return value - total_half;
}

double lrt_statistic(const MultiLayerGraph& g) {
  // the two models coincide for one layer
  if (g.n_layers() == 1) {
    require_nonempty_layers(g);
    return 0.0;
  }
  return 2.0 * (loglik_id(g) - loglik_sd(g));
}

double lrt_degrees_of_freedom(Index n_nodes, Index n_layers) {
  return static_cast<double>(n_layers * n_nodes - (n_nodes + n_layers - 1));
}

double chi_square_sf(double x, double df) {
  if (df <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

MultiLayerGraph sample_from_null(const NullParams& params, Index n, Index m, std::uint64_t seed) {
  if (params.n_nodes() != n || params.n_layers() != m) {
    throw InputError(fmt::format("null parameters are {}x{}, requested {}x{}", params.n_nodes(),
                                 params.n_layers(), n, m));
  }
  std::vector<LayerEdge> edges;
  for (Index layer = 0; layer < m; ++layer) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(layer));
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double rate = params.rate(i, j, layer);
        if (!std::isfinite(rate) || rate < 0.0) {
          throw InputError(fmt::format("invalid Poisson rate {} for pair ({}, {})", rate, i, j));
        }
        if (rate == 0.0) continue;
        std::poisson_distribution<long> draw(rate);
        const long count = draw(rng);
        if (count > 0) edges.push_back({layer, i, j, static_cast<double>(count)});
      }
    }
  }
  return MultiLayerGraph::from_edges(n, m, edges);
}

LrtResult bootstrap_lrt(const MultiLayerGraph& g, int replicates, std::uint64_t seed, unsigned threads) {
  if (replicates < 1) throw InputError("bootstrap needs at least one replicate");
  LrtResult result;
  result.lambda1 = loglik_id(g);
  result.lambda2 = loglik_sd(g);
  result.statistic = lrt_statistic(g);
  result.df = lrt_degrees_of_freedom(g.n_nodes(), g.n_layers());
  result.p_chi2 = chi_square_sf(result.statistic, result.df);
  result.replicates = replicates;

  const NullParams params = fit_sd(g);
  constexpr int kMaxAttempts = 10;
  result.boot_stats.assign(static_cast<std::size_t>(replicates), 0.0);
  parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
    const std::uint64_t replicate_seed = derive_seed(seed, r);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const auto sample = sample_from_null(params, g.n_nodes(), g.n_layers(),
                                           derive_seed(replicate_seed, static_cast<std::uint64_t>(attempt)));
      if ((sample.layer_totals().array() > 0.0).all()) {
        result.boot_stats[r] = lrt_statistic(sample);
        return;
      }
    }
    throw PreconditionError(
        fmt::format("bootstrap replicate {} produced an empty layer {} times", r, kMaxAttempts));
  });

  std::size_t exceed = 0;
  for (double s : result.boot_stats) exceed += s >= result.statistic ? 1 : 0;
  result.p_boot = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates) + 1.0);
  return result;
}

}  // namespace mlcd
