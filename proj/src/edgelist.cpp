#include "mlcd/error.hpp"
#include "mlcd/graph.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace mlcd {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool is_comment_or_blank(const std::vector<std::string_view>& fields) {
  return fields.empty() || fields.front().starts_with('#');
}

double parse_weight(std::string_view token, std::size_t line_no) {
  double w = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), w);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(w)) {
    throw InputError(fmt::format("line {}: cannot parse weight '{}'", line_no, token));
  }
  if (w < 0.0) throw InputError(fmt::format("line {}: negative weight {}", line_no, w));
  return w;
}

class Interner {
 public:
  Index operator()(std::string_view name) {
    auto [it, inserted] = index_.try_emplace(std::string(name), static_cast<Index>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
  }
  std::vector<std::string>& names() { return names_; }
  Index size() const { return static_cast<Index>(names_.size()); }

 private:
  std::unordered_map<std::string, Index> index_;
  std::vector<std::string> names_;
};

/// Per-layer accumulation of directed observations of undirected pairs.
class PairAccumulator {
 public:
  void add(Index layer, Index u, Index v, double w) {
    if (static_cast<std::size_t>(layer) >= layers_.size()) layers_.resize(static_cast<std::size_t>(layer) + 1);
    const bool forward = u <= v;
    auto& entry = layers_[static_cast<std::size_t>(layer)][{std::min(u, v), std::max(u, v)}];
    if (forward) {
      entry.forward += w;
      entry.has_forward = true;
    } else {
      entry.backward += w;
      entry.has_backward = true;
    }
  }

  std::vector<LayerEdge> resolve(DuplicatePolicy policy) const {
    std::vector<LayerEdge> edges;
    for (std::size_t m = 0; m < layers_.size(); ++m) {
      for (const auto& [key, entry] : layers_[m]) {
        double w = 0.0;
        switch (policy) {
          case DuplicatePolicy::SumHalved:
            w = (entry.has_forward && entry.has_backward) ? (entry.forward + entry.backward) / 2.0
                                                          : entry.forward + entry.backward;
            break;
          case DuplicatePolicy::Sum:
            w = entry.forward + entry.backward;
            break;
          case DuplicatePolicy::Max:
            w = std::max(entry.forward, entry.backward);
            break;
        }
        if (w > 0.0) edges.push_back({static_cast<Index>(m), key.first, key.second, w});
      }
    }
    return edges;
  }

  Index n_layers() const { return static_cast<Index>(layers_.size()); }

 private:
  struct Entry {
    double forward = 0.0;
    double backward = 0.0;
    bool has_forward = false;
    bool has_backward = false;
  };
  std::vector<std::map<std::pair<Index, Index>, Entry>> layers_;
};

MultiLayerGraph finish(const PairAccumulator& acc, Interner& nodes, std::vector<std::string> layer_names,
                       const EdgeListOptions& options) {
  if (layer_names.empty() || nodes.size() == 0) throw InputError("edge list contains no edges");
  const auto edges = acc.resolve(options.duplicates);
  const Index n_layers = static_cast<Index>(layer_names.size());
  const Index n_nodes = nodes.size();
  auto g = MultiLayerGraph::from_edges(n_nodes, n_layers, edges, std::move(nodes.names()),
                                       std::move(layer_names));
  for (Index m = 0; m < g.n_layers(); ++m) {
    if (g.layer_totals()(m) == 0.0) {
      throw InputError(fmt::format("layer '{}' has no edges", g.layer_names()[static_cast<std::size_t>(m)]));
    }
  }
  return g;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  return in;
}

}  // namespace

DuplicatePolicy parse_duplicate_policy(const std::string& name) {
  if (name == "sum-halved") return DuplicatePolicy::SumHalved;
  if (name == "sum") return DuplicatePolicy::Sum;
  if (name == "max") return DuplicatePolicy::Max;
  throw InputError(fmt::format("unknown duplicate policy '{}'", name));
}

MultiLayerGraph load_multilayer_edgelist(std::istream& in, const EdgeListOptions& options) {
  Interner nodes;
  Interner layers;
  PairAccumulator acc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (is_comment_or_blank(fields)) continue;
    if (fields.size() != 3 && fields.size() != 4) {
      throw InputError(fmt::format("line {}: expected 'layer u v [weight]', got {} fields", line_no,
                                   fields.size()));
    }
    const double w = fields.size() == 4 ? parse_weight(fields[3], line_no) : 1.0;
    const Index m = layers(fields[0]);
    const Index u = nodes(fields[1]);
    const Index v = nodes(fields[2]);
    acc.add(m, u, v, w);
  }
  return finish(acc, nodes, std::move(layers.names()), options);
}

MultiLayerGraph load_multilayer_edgelist(const std::string& path, const EdgeListOptions& options) {
  auto in = open_input(path);
  return load_multilayer_edgelist(in, options);
}

MultiLayerGraph load_layer_files(std::span<const std::string> paths, const EdgeListOptions& options) {
  if (paths.empty()) throw InputError("no layer files given");
  Interner nodes;
  PairAccumulator acc;
  std::vector<std::string> layer_names;
  for (std::size_t m = 0; m < paths.size(); ++m) {
    auto in = open_input(paths[m]);
    layer_names.push_back(std::filesystem::path(paths[m]).stem().string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_fields(line);
      if (is_comment_or_blank(fields)) continue;
      if (fields.size() != 2 && fields.size() != 3) {
        throw InputError(fmt::format("{}:{}: expected 'u v [weight]'", paths[m], line_no));
      }
      const double w = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
      acc.add(static_cast<Index>(m), nodes(fields[0]), nodes(fields[1]), w);
    }
  }
  return finish(acc, nodes, std::move(layer_names), options);
}

void write_multilayer_edgelist(std::ostream& out, const MultiLayerGraph& g) {
  for (Index m = 0; m < g.n_layers(); ++m) {
    const auto& layer = g.layer(m);
    const auto& name = g.layer_names()[static_cast<std::size_t>(m)];
    for (Index j = 0; j < layer.outerSize(); ++j) {
      for (SparseLayer::InnerIterator it(layer, j); it; ++it) {
        const Index i = it.row();
        if (i > j) continue;
        const double w = i == j ? it.value() / 2.0 : it.value();
        fmt::print(out, "{}\t{}\t{}\t{:.17g}\n", name, g.node_ids()[static_cast<std::size_t>(i)],
                   g.node_ids()[static_cast<std::size_t>(j)], w);
      }
    }
  }
}

void write_partition(std::ostream& out, const MultiLayerGraph& g, const Partition& z) {
  z.validate(g.n_nodes());
  for (Index i = 0; i < g.n_nodes(); ++i) {
    fmt::print(out, "{}\t{}\n", g.node_ids()[static_cast<std::size_t>(i)],
               z.labels[static_cast<std::size_t>(i)] + 1);
  }
}

LabeledPartition read_partition(std::istream& in) {
  LabeledPartition result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (is_comment_or_blank(fields)) continue;
    if (fields.size() != 2) {
      throw InputError(fmt::format("line {}: expected 'node community'", line_no));
    }
    int c = 0;
    const auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), c);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() || c < 1) {
      throw InputError(fmt::format("line {}: community must be a positive integer", line_no));
    }
    result.node_ids.emplace_back(fields[0]);
    result.communities.push_back(c);
  }
  return result;
}

LabeledPartition read_partition(const std::string& path) {
  auto in = open_input(path);
  return read_partition(in);
}

Partition partition_for_graph(const MultiLayerGraph& g, const LabeledPartition& labeled) {
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < labeled.node_ids.size(); ++i) {
    by_id[labeled.node_ids[i]] = labeled.communities[i] - 1;
  }
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(g.n_nodes()));
  for (const auto& id : g.node_ids()) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError(fmt::format("node '{}' has no community", id));
    labels.push_back(it->second);
  }
  return Partition::from_labels(std::move(labels));
}

}  // namespace mlcd
