#pragma once

#include <span>
#include <string>
#include <vector>

#include "cdand/detect.hpp"

namespace cdand {

/// Fractions of the candidate PEL count kept by the residual-error and
/// range-sum stages. Both cut counts are computed against the set entering
/// the filter, then clamped to the current stage's size.
struct FilterConfig {
  double re_ratio = 1.0;
  double rs_ratio = 1.0;
};

enum class Method {
  ls,
  cda_rers,
  ls_nd_hd,
  cda_nd_hd,
  cda_nd_rers_hd,
  ls_nd_sd,
  cda_nd_sd,
  cda_nd_rers_sd,
};

const std::vector<Method>& all_methods();
std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct PositionEstimate {
  Point2 point;
  Method method = Method::ls;
  std::size_t pels_used = 0;  // 0 for the LS family
  bool fallback = false;      // degraded path was taken (too few gNBs / empty PEL set)
};

/// Sum of absolute range residuals of a PEL against its subset.
double residual_error(Point2 pel, std::span<const int> subset, const Snapshot& snapshot);

/// Sum of the subset's range measurements.
double rtt_sum(std::span<const int> subset, const Snapshot& snapshot);

/// Two-stage order-statistic filter; ties at the cut are retained, result is
/// never empty.
std::vector<int> filter_re_rs(const PelEnsemble& ensemble, std::span<const int> candidates,
                              const Snapshot& snapshot, const FilterConfig& cfg);

struct EstimateArtifacts {
  const PelEnsemble* ensemble = nullptr;
  const HardDecision* hd = nullptr;
  const std::vector<double>* sd_values = nullptr;  // final per-gNB NLoS probability
  FilterConfig filter;
};

PositionEstimate estimate(const Snapshot& snapshot, Method method,
                          const EstimateArtifacts& artifacts);

}  // namespace cdand
