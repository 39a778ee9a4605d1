#include "mlcd/generate.hpp"

#include "mlcd/error.hpp"
#include "mlcd/random.hpp"

#include <fmt/core.h>

#include <cmath>

namespace mlcd {

namespace {

constexpr std::uint64_t kLabelStream = 0;
constexpr std::uint64_t kPropensityStream = 1;
constexpr std::uint64_t kEdgeStream = 100;

std::vector<int> community_sizes(const Partition& labels) {
  std::vector<int> sizes(static_cast<std::size_t>(labels.k), 0);
  for (int z : labels.labels) ++sizes[static_cast<std::size_t>(z)];
  return sizes;
}

void check_labels(const Partition& labels, const GeneratorSpec& spec) {
  labels.validate(spec.n);
  if (labels.k > spec.k) throw InputError(fmt::format("labels use {} classes, spec has k = {}", labels.k, spec.k));
}

// Shared edge loop: prob(i, j, m) gives the unclamped Bernoulli rate.
template <typename Prob>
MultiLayerGraph sample_edges(const GeneratorSpec& spec, SampleStats* stats, Prob&& prob) {
  std::vector<LayerEdge> edges;
  std::size_t clamped = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index m = 0; m < spec.m_layers(); ++m) {
    Rng rng = make_rng(spec.seed, kEdgeStream + static_cast<std::uint64_t>(m));
    for (Index i = 0; i < spec.n; ++i) {
      for (Index j = i + 1; j < spec.n; ++j) {
        double p = prob(i, j, m);
        if (p > 1.0) {
          if (spec.clamp == ClampPolicy::Strict) {
            throw PreconditionError(
                fmt::format("edge probability {} > 1 for pair ({}, {}) in layer {}", p, i, j, m + 1));
          }
          ++clamped;
          p = 1.0;
        }
        if (p > 0.0 && unit(rng) < p) edges.push_back({m, i, j, 1.0});
      }
    }
  }
  if (stats) stats->clamped += clamped;
  return MultiLayerGraph::from_edges(spec.n, spec.m_layers(), edges);
}

}  // namespace

Eigen::MatrixXd GeneratorSpec::connectivity(Index m) const {
  const auto& layer = layers.at(static_cast<std::size_t>(m));
  Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(k, k, layer.rho * layer.epsilon);
  pi.diagonal() = layer.rho * layer.lambda;
  return pi;
}

void GeneratorSpec::validate() const {
  if (n < 1) throw InputError("generator needs n >= 1");
  if (k < 1) throw InputError("generator needs k >= 1");
  if (class_probs.size() != k) {
    throw InputError(fmt::format("class_probs has {} entries, expected k = {}", class_probs.size(), k));
  }
  if ((class_probs.array() < 0.0).any() || std::abs(class_probs.sum() - 1.0) > 1e-9) {
    throw InputError("class_probs must be a probability vector");
  }
  if (layers.empty()) throw InputError("generator needs at least one layer");
  for (std::size_t m = 0; m < layers.size(); ++m) {
    const auto& layer = layers[m];
    if (!(layer.rho > 0.0) || !std::isfinite(layer.rho)) throw InputError(fmt::format("layer {}: rho must be > 0", m + 1));
    if (layer.lambda.size() != k) throw InputError(fmt::format("layer {}: lambda needs k entries", m + 1));
    if ((layer.lambda.array() < 0.0).any() || !(layer.epsilon >= 0.0)) {
      throw InputError(fmt::format("layer {}: lambda and epsilon must be nonnegative", m + 1));
    }
  }
  if (degree_mode != DegreeMode::None && !(powerlaw_exponent > 1.0)) {
    throw InputError("power-law exponent must exceed 1");
  }
}

Partition sample_labels(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng = make_rng(spec.seed, kLabelStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (auto& z : labels) {
    const double u = unit(rng);
    double acc = 0.0;
    z = spec.k - 1;
    for (int q = 0; q < spec.k; ++q) {
      acc += spec.class_probs(q);
      if (u < acc) {
        z = q;
        break;
      }
    }
    while (spec.class_probs(z) == 0.0 && z > 0) --z;
  }
  return Partition(std::move(labels), spec.k);
}

MultiLayerGraph sample_mlsbm(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats) {
  spec.validate();
  check_labels(labels, spec);
  std::vector<Eigen::MatrixXd> pi;
  for (Index m = 0; m < spec.m_layers(); ++m) pi.push_back(spec.connectivity(m));
  const auto& z = labels.labels;
  return sample_edges(spec, stats, [&](Index i, Index j, Index m) {
    return pi[static_cast<std::size_t>(m)](z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
  });
}

Eigen::MatrixXd draw_propensities(const Partition& labels, const GeneratorSpec& spec) {
  spec.validate();
  check_labels(labels, spec);
  if (spec.degree_mode == DegreeMode::None) throw InputError("propensities need a degree mode");
  const Index cols = spec.degree_mode == DegreeMode::Shared ? 1 : spec.m_layers();
  Rng rng = make_rng(spec.seed, kPropensityStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double shape = 1.0 / (spec.powerlaw_exponent - 1.0);
  Eigen::MatrixXd theta(spec.n, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index i = 0; i < spec.n; ++i) theta(i, c) = std::pow(1.0 - unit(rng), -shape);
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(labels.k, cols);
  for (Index i = 0; i < spec.n; ++i) sums.row(labels.labels[static_cast<std::size_t>(i)]) += theta.row(i);
  for (Index i = 0; i < spec.n; ++i) {
    theta.row(i).array() /= sums.row(labels.labels[static_cast<std::size_t>(i)]).array();
  }
  return theta;
}

MultiLayerGraph sample_dcmlsbm(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats) {
  return sample_dcmlsbm(labels, spec, draw_propensities(labels, spec), stats);
}

MultiLayerGraph sample_dcmlsbm(const Partition& labels, const GeneratorSpec& spec, const Eigen::MatrixXd& theta,
                               SampleStats* stats) {
  spec.validate();
  check_labels(labels, spec);
  if (theta.rows() != spec.n || (theta.cols() != 1 && theta.cols() != spec.m_layers())) {
    throw InputError(fmt::format("propensities are {}x{}, expected {}x1 or {}x{}", theta.rows(), theta.cols(),
                                 spec.n, spec.n, spec.m_layers()));
  }
  if (!(theta.array() >= 0.0).all() || !theta.allFinite()) throw InputError("propensities must be finite and >= 0");
  const auto sizes = community_sizes(labels);
  std::vector<Eigen::MatrixXd> pi;
  for (Index m = 0; m < spec.m_layers(); ++m) {
    Eigen::MatrixXd scaled = spec.connectivity(m);
    for (int q = 0; q < labels.k; ++q) {
      for (int l = 0; l < labels.k; ++l) scaled(q, l) *= double(sizes[std::size_t(q)]) * sizes[std::size_t(l)];
    }
    pi.push_back(std::move(scaled));
  }
  const bool shared = theta.cols() == 1;
  const auto& z = labels.labels;
  return sample_edges(spec, stats, [&](Index i, Index j, Index m) {
    const Index c = shared ? 0 : m;
    return theta(i, c) * theta(j, c) *
           pi[static_cast<std::size_t>(m)](z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
  });
}

MultiLayerGraph sample_graph(const Partition& labels, const GeneratorSpec& spec, SampleStats* stats) {
  return spec.degree_mode == DegreeMode::None ? sample_mlsbm(labels, spec, stats)
                                              : sample_dcmlsbm(labels, spec, stats);
}

double expected_layer_degree(const GeneratorSpec& spec, Index m) {
  const Eigen::MatrixXd pi = spec.connectivity(m);
  return static_cast<double>(spec.n - 1) * spec.class_probs.dot(pi * spec.class_probs);
}

}  // namespace mlcd
