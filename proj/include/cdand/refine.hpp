#pragma once

#include <span>
#include <vector>

#include "cdand/detect.hpp"
#include "cdand/sdmap.hpp"

namespace cdand {

/// Reliability of one PEL: the probability that every gNB in its subset is
/// LoS, prod (1 - sd[n]).
double pel_weight(std::span<const double> sd_values, std::span<const int> subset);

struct RefineResult {
  std::vector<double> scores;      // refined for surviving gNBs, initial otherwise
  std::vector<double> sd;          // final per-gNB NLoS probability
  std::vector<std::uint8_t> refined;
  int iterations = 0;
  double convergence_sum = 0.0;
};

/// Iterative score refinement over the HD-surviving PEL set: reliability
/// weights from the current SD values, weighted-median representative points,
/// rescored projections, until the summed squared SD change over the
/// surviving gNBs falls below eps or t_max is reached. gNBs outside the
/// surviving set keep their initial score. Throws EmptyHdSet when no PEL
/// survives the HD restriction.
RefineResult refine_scores(const PelEnsemble& ensemble, const Snapshot& snapshot,
                           const ScoreReport& report, const HardDecision& hd,
                           const SigmoidParams& mapping, double eps = 1e-3, int t_max = 25);

/// SD values without refinement (fallback when the HD set is empty).
std::vector<double> unrefined_sd(const ScoreReport& report, const SigmoidParams& mapping);

}  // namespace cdand
