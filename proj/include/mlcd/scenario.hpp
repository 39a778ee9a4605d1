#pragma once

#include "mlcd/generate.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mlcd {

inline constexpr double kStrongSignal = 3.5;
inline constexpr double kWeakSignal = 1.3;

/// One layer of a scenario. `share` is the layer's relative part of the
/// total average degree; λ_q = signal_ratio and ε = 1 unless lambda is given.
struct LayerPreset {
  double share = 1.0;
  double signal_ratio = kStrongSignal;
  std::optional<std::vector<double>> lambda;
  double epsilon = 1.0;
};

enum class SweepAxis { AvgDegree, N, K };

/// A generator family parameterized by average degree instead of ρ. ρ of
/// each layer is solved so the layer's expected average degree equals
/// avg_degree·share/Σshare.
struct Scenario {
  std::string name;
  Index n = 0;
  int k = 1;
  std::optional<std::vector<double>> class_probs;  ///< balanced when absent
  DegreeMode degree_mode = DegreeMode::None;
  double powerlaw_exponent = 2.5;
  double avg_degree = 0.0;  ///< across all layers combined
  std::vector<LayerPreset> layers;
  ClampPolicy clamp = ClampPolicy::Clamp;
  std::optional<SweepAxis> axis;
  std::vector<double> axis_values;

  GeneratorSpec to_spec(std::uint64_t seed) const;
  /// Copy with the sweep axis set to `value`.
  Scenario at_axis(double value) const;
  void validate() const;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& scenario);
nlohmann::json spec_to_json(const GeneratorSpec& spec);

std::string_view axis_name(SweepAxis axis);
std::string_view degree_mode_name(DegreeMode mode);

}  // namespace mlcd
