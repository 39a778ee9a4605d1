#include "mlcd/scenario.hpp"

#include "mlcd/error.hpp"

#include <fmt/core.h>

#include <cmath>
#include <fstream>

namespace mlcd {

namespace {

constexpr const char* kSchema = "mlcd.scenario/1";

DegreeMode parse_degree_mode(const std::string& name) {
  if (name == "none") return DegreeMode::None;
  if (name == "shared") return DegreeMode::Shared;
  if (name == "independent") return DegreeMode::Independent;
  throw InputError(fmt::format("unknown degree_mode '{}' (none, shared, independent)", name));
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "avg_degree") return SweepAxis::AvgDegree;
  if (name == "n") return SweepAxis::N;
  if (name == "k") return SweepAxis::K;
  throw InputError(fmt::format("unknown sweep axis '{}' (avg_degree, n, k)", name));
}

double parse_signal(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  const auto name = value.get<std::string>();
  if (name == "strong") return kStrongSignal;
  if (name == "weak") return kWeakSignal;
  throw InputError(fmt::format("unknown signal '{}' (strong, weak, or a ratio)", name));
}

bool is_integral(double v) { return std::floor(v) == v; }

}  // namespace

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::AvgDegree: return "avg_degree";
    case SweepAxis::N: return "n";
    case SweepAxis::K: return "k";
  }
  return "";
}

std::string_view degree_mode_name(DegreeMode mode) {
  switch (mode) {
    case DegreeMode::None: return "none";
    case DegreeMode::Shared: return "shared";
    case DegreeMode::Independent: return "independent";
  }
  return "";
}

void Scenario::validate() const {
  if (n < 2) throw InputError("scenario needs n >= 2");
  if (k < 1) throw InputError("scenario needs k >= 1");
  if (!(avg_degree > 0.0)) throw InputError("scenario needs avg_degree > 0");
  if (layers.empty()) throw InputError("scenario needs at least one layer");
  for (const auto& layer : layers) {
    if (!(layer.share > 0.0)) throw InputError("layer share must be > 0");
    if (layer.lambda && static_cast<int>(layer.lambda->size()) != k) {
      throw InputError(fmt::format("layer lambda has {} entries, expected k = {}", layer.lambda->size(), k));
    }
  }
  if (class_probs && static_cast<int>(class_probs->size()) != k) {
    throw InputError(fmt::format("class_probs has {} entries, expected k = {}", class_probs->size(), k));
  }
  if (axis) {
    if (axis_values.empty()) throw InputError("sweep axis needs at least one value");
    for (double v : axis_values) {
      if (!(v > 0.0)) throw InputError("sweep axis values must be positive");
      if (*axis != SweepAxis::AvgDegree && !is_integral(v)) throw InputError("n and k axis values must be integers");
    }
  }
}

Scenario Scenario::at_axis(double value) const {
  if (!axis) throw InputError("scenario has no sweep axis");
  Scenario out = *this;
  switch (*axis) {
    case SweepAxis::AvgDegree: out.avg_degree = value; break;
    case SweepAxis::N: out.n = static_cast<Index>(value); break;
    case SweepAxis::K: out.k = static_cast<int>(value); break;
  }
  out.axis.reset();
  out.axis_values.clear();
  out.validate();
  return out;
}

GeneratorSpec Scenario::to_spec(std::uint64_t seed) const {
  validate();
  GeneratorSpec spec;
  spec.n = n;
  spec.k = k;
  spec.class_probs = class_probs ? Eigen::Map<const Eigen::VectorXd>(class_probs->data(), k).eval()
                                 : Eigen::VectorXd::Constant(k, 1.0 / k);
  spec.degree_mode = degree_mode;
  spec.powerlaw_exponent = powerlaw_exponent;
  spec.seed = seed;
  spec.clamp = clamp;

  double share_total = 0.0;
  for (const auto& layer : layers) share_total += layer.share;
  for (const auto& preset : layers) {
    LayerSpec layer;
    layer.lambda = preset.lambda ? Eigen::Map<const Eigen::VectorXd>(preset.lambda->data(), k).eval()
                                 : Eigen::VectorXd::Constant(k, preset.signal_ratio * preset.epsilon);
    layer.epsilon = preset.epsilon;
    layer.rho = 1.0;
    spec.layers.push_back(layer);
  }
  for (Index m = 0; m < spec.m_layers(); ++m) {
    const double base = expected_layer_degree(spec, m);
    if (!(base > 0.0)) throw InputError(fmt::format("layer {} has an all-zero connectivity pattern", m + 1));
    const double target = avg_degree * layers[static_cast<std::size_t>(m)].share / share_total;
    spec.layers[static_cast<std::size_t>(m)].rho = target / base;
  }
  spec.validate();
  return spec;
}

Scenario parse_scenario(const nlohmann::json& doc) {
  try {
    if (doc.value("schema", std::string(kSchema)) != kSchema) {
      throw InputError(fmt::format("unsupported scenario schema '{}'", doc.at("schema").get<std::string>()));
    }
    Scenario s;
    s.name = doc.value("name", std::string("scenario"));
    s.n = doc.at("n").get<Index>();
    s.k = doc.at("k").get<int>();
    if (doc.contains("class_probs")) s.class_probs = doc.at("class_probs").get<std::vector<double>>();
    s.degree_mode = parse_degree_mode(doc.value("degree_mode", std::string("none")));
    s.powerlaw_exponent = doc.value("powerlaw_exponent", 2.5);
    s.avg_degree = doc.at("avg_degree").get<double>();
    const std::string clamp = doc.value("clamp", std::string("clamp"));
    if (clamp != "clamp" && clamp != "strict") throw InputError("clamp must be 'clamp' or 'strict'");
    s.clamp = clamp == "strict" ? ClampPolicy::Strict : ClampPolicy::Clamp;
    for (const auto& entry : doc.at("layers")) {
      LayerPreset layer;
      layer.share = entry.value("share", 1.0);
      if (entry.contains("signal")) layer.signal_ratio = parse_signal(entry.at("signal"));
      if (entry.contains("lambda")) layer.lambda = entry.at("lambda").get<std::vector<double>>();
      layer.epsilon = entry.value("epsilon", 1.0);
      s.layers.push_back(layer);
    }
    if (doc.contains("axis")) {
      const auto& axis = doc.at("axis");
      s.axis = parse_axis(axis.at("name").get<std::string>());
      s.axis_values = axis.at("values").get<std::vector<double>>();
      if (*s.axis == SweepAxis::K && s.class_probs) throw InputError("a k axis requires balanced classes");
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed scenario: {}", e.what()));
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open scenario file '{}'", path));
  try {
    return parse_scenario(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json doc = {{"schema", kSchema},
                        {"name", s.name},
                        {"n", s.n},
                        {"k", s.k},
                        {"degree_mode", degree_mode_name(s.degree_mode)},
                        {"powerlaw_exponent", s.powerlaw_exponent},
                        {"avg_degree", s.avg_degree},
                        {"clamp", s.clamp == ClampPolicy::Strict ? "strict" : "clamp"}};
  if (s.class_probs) doc["class_probs"] = *s.class_probs;
  auto& layers = doc["layers"] = nlohmann::json::array();
  for (const auto& layer : s.layers) {
    nlohmann::json entry = {{"share", layer.share}, {"epsilon", layer.epsilon}};
    if (layer.lambda) {
      entry["lambda"] = *layer.lambda;
    } else {
      entry["signal"] = layer.signal_ratio;
    }
    layers.push_back(entry);
  }
  if (s.axis) doc["axis"] = {{"name", axis_name(*s.axis)}, {"values", s.axis_values}};
  return doc;
}

nlohmann::json spec_to_json(const GeneratorSpec& spec) {
  nlohmann::json doc = {{"n", spec.n},
                        {"k", spec.k},
                        {"class_probs", std::vector<double>(spec.class_probs.data(),
                                                            spec.class_probs.data() + spec.class_probs.size())},
                        {"degree_mode", degree_mode_name(spec.degree_mode)},
                        {"powerlaw_exponent", spec.powerlaw_exponent},
                        {"seed", spec.seed}};
  auto& layers = doc["layers"] = nlohmann::json::array();
  for (Index m = 0; m < spec.m_layers(); ++m) {
    const auto& layer = spec.layers[static_cast<std::size_t>(m)];
    layers.push_back({{"rho", layer.rho},
                      {"lambda", std::vector<double>(layer.lambda.data(), layer.lambda.data() + layer.lambda.size())},
                      {"epsilon", layer.epsilon},
                      {"expected_avg_degree", expected_layer_degree(spec, m)}});
  }
  return doc;
}

}  // namespace mlcd
