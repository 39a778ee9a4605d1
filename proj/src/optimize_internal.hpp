#pragma once

#include "mlcd/optimize.hpp"

namespace mlcd::detail {

/// Compacts `z`, scores it on `g` and fills the common result fields. If a
/// trace is present its last entry must agree with the final score.
DetectResult finalize_result(const MultiLayerGraph& g, MeasureKind measure, const Partition& z,
                             int sweeps, std::vector<double> trace);

/// Best restart by score; ties go to the lowest restart index.
DetectResult pick_best(std::vector<DetectResult> restarts);

}  // namespace mlcd::detail
