#pragma once

#include <vector>

#include "pilotcap/peakcap.hpp"

namespace pilotcap {

/// Optimizer core starting from a given support and weights.
OptimizedDist optimize_from(const InfoFunctional& fn, std::vector<double> pts, std::vector<double> probs,
                            const OptimizerOptions& opt);

}  // namespace pilotcap
