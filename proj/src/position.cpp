#include "cdand/position.hpp"

#include <algorithm>
#include <cmath>

#include "cdand/errors.hpp"

namespace cdand {

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::ls,          Method::cda_rers,       Method::ls_nd_hd,  Method::cda_nd_hd,
      Method::cda_nd_rers_hd, Method::ls_nd_sd,    Method::cda_nd_sd, Method::cda_nd_rers_sd};
  return methods;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ls: return "ls";
    case Method::cda_rers: return "cda-rers";
    case Method::ls_nd_hd: return "ls-nd-hd";
    case Method::cda_nd_hd: return "cda-nd-hd";
    case Method::cda_nd_rers_hd: return "cda-nd-rers-hd";
    case Method::ls_nd_sd: return "ls-nd-sd";
    case Method::cda_nd_sd: return "cda-nd-sd";
    case Method::cda_nd_rers_sd: return "cda-nd-rers-sd";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw InvalidConfig("unknown method: " + name);
}

double residual_error(Point2 pel, std::span<const int> subset, const Snapshot& snapshot) {
  double sum = 0.0;
  for (int n : subset)
    sum += std::abs(snapshot.ranges[n] - distance(pel, snapshot.gnb_positions[n]));
  return sum;
}

double rtt_sum(std::span<const int> subset, const Snapshot& snapshot) {
  double sum = 0.0;
  for (int n : subset) sum += snapshot.ranges[n];
  return sum;
}

namespace {

std::size_t cut_count(double ratio, std::size_t base, std::size_t current) {
  if (!(ratio > 0.0) || ratio > 1.0) throw InvalidConfig("filter ratio must lie in (0,1]");
  const auto wanted = static_cast<std::size_t>(
      std::max(1.0, std::round(ratio * static_cast<double>(base))));
  return std::min(wanted, current);
}

std::vector<int> keep_smallest(const std::vector<int>& candidates,
                               const std::vector<double>& metric, std::size_t count) {
  std::vector<double> sorted(metric);
  std::nth_element(sorted.begin(), sorted.begin() + (count - 1), sorted.end());
  const double threshold = sorted[count - 1];
  std::vector<int> kept;
  kept.reserve(count);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (metric[i] <= threshold) kept.push_back(candidates[i]);
  return kept;
}

}  // namespace

std::vector<int> filter_re_rs(const PelEnsemble& ensemble, std::span<const int> candidates,
                              const Snapshot& snapshot, const FilterConfig& cfg) {
  if (candidates.empty()) throw EmptySet("filter_re_rs: empty candidate set");
  const std::size_t base = candidates.size();

  std::vector<int> current(candidates.begin(), candidates.end());
  std::vector<double> re(current.size());
  for (std::size_t i = 0; i < current.size(); ++i)
    re[i] = residual_error(ensemble.pels[current[i]], ensemble.subsets[current[i]], snapshot);
  current = keep_smallest(current, re, cut_count(cfg.re_ratio, base, current.size()));

  std::vector<double> rs(current.size());
  for (std::size_t i = 0; i < current.size(); ++i)
    rs[i] = rtt_sum(ensemble.subsets[current[i]], snapshot);
  current = keep_smallest(current, rs, cut_count(cfg.rs_ratio, base, current.size()));
  return current;
}

namespace {

PositionEstimate ls_estimate(const Snapshot& snapshot, Method method,
                             std::span<const int> gnbs, std::span<const double> weights,
                             bool fallback) {
  std::vector<Point2> anchors;
  std::vector<double> ranges, w;
  anchors.reserve(gnbs.size());
  for (std::size_t i = 0; i < gnbs.size(); ++i) {
    anchors.push_back(snapshot.gnb_positions[gnbs[i]]);
    ranges.push_back(snapshot.ranges[gnbs[i]]);
    w.push_back(weights.empty() ? 1.0 : weights[i]);
  }
  double mass = 0.0;
  for (double v : w) mass += v;
  if (mass < 1e-12) std::fill(w.begin(), w.end(), 1.0);
  PositionEstimate est;
  est.method = method;
  est.fallback = fallback;
  est.point = multilaterate_weighted(anchors, ranges, w);
  return est;
}

std::vector<int> all_gnbs(const Snapshot& snapshot) {
  std::vector<int> idx(snapshot.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

std::vector<double> pel_weights_for(const PelEnsemble& ensemble, std::span<const int> indices,
                                    const std::vector<double>& sd) {
  std::vector<double> w;
  w.reserve(indices.size());
  for (int ell : indices) {
    double v = 1.0;
    for (int n : ensemble.subsets[ell]) v *= 1.0 - sd[n];
    w.push_back(v);
  }
  double mass = 0.0;
  for (double v : w) mass += v;
  if (mass < 1e-12) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

}  // namespace

PositionEstimate estimate(const Snapshot& snapshot, Method method,
                          const EstimateArtifacts& art) {
  const bool needs_hd = method != Method::ls && method != Method::cda_rers;
  const bool needs_sd = method == Method::ls_nd_sd || method == Method::cda_nd_sd ||
                        method == Method::cda_nd_rers_sd;
  const bool is_ls = method == Method::ls || method == Method::ls_nd_hd ||
                     method == Method::ls_nd_sd;
  if (!is_ls && art.ensemble == nullptr)
    throw InvalidConfig("estimate: ensemble required for CDA methods");
  if (needs_hd && art.hd == nullptr) throw InvalidConfig("estimate: hard decision required");
  if (needs_sd && art.sd_values == nullptr) throw InvalidConfig("estimate: SD values required");

  if (method == Method::ls)
    return ls_estimate(snapshot, method, all_gnbs(snapshot), {}, false);

  if (method == Method::ls_nd_hd || method == Method::ls_nd_sd) {
    std::vector<int> survivors = art.hd->survivors();
    bool fallback = false;
    if (survivors.size() < 3) {  // too few usable gNBs, fall back to all
      survivors = all_gnbs(snapshot);
      fallback = true;
    }
    std::vector<double> weights;
    if (method == Method::ls_nd_sd) {
      weights.reserve(survivors.size());
      for (int n : survivors) weights.push_back(1.0 - (*art.sd_values)[n]);
    }
    return ls_estimate(snapshot, method, survivors, weights, fallback);
  }

  // CDA family
  const PelEnsemble& ensemble = *art.ensemble;
  std::vector<int> candidates;
  bool fallback = false;
  if (method == Method::cda_rers) {
    candidates = ensemble.valid_indices();
  } else {
    candidates = restrict_to_gnbs(ensemble, art.hd->survivors());
    if (candidates.empty()) {  // empty HD set, fall back to the full PEL set
      candidates = ensemble.valid_indices();
      fallback = true;
    }
  }
  if (candidates.empty()) throw EmptySet("estimate: no valid PELs");

  if (method == Method::cda_rers || method == Method::cda_nd_rers_hd ||
      method == Method::cda_nd_rers_sd)
    candidates = filter_re_rs(ensemble, candidates, snapshot, art.filter);

  PositionEstimate est;
  est.method = method;
  est.fallback = fallback;
  est.pels_used = candidates.size();
  if (method == Method::cda_nd_sd || method == Method::cda_nd_rers_sd) {
    const std::vector<double> w = pel_weights_for(ensemble, candidates, *art.sd_values);
    est.point = weighted_l1_median(gather_pels(ensemble, candidates), w);
  } else {
    est.point = coordinate_median(gather_pels(ensemble, candidates));
  }
  return est;
}

}  // namespace cdand
