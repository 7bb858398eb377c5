#include "cdand/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

// Weighted median with the all-zero-mass guard: uniform weights when the
// selected weights carry no mass.
Point2 guarded_weighted_median(const PelEnsemble& ensemble, std::span<const int> indices,
                               std::span<const double> weights_by_ell) {
  std::vector<Point2> pts;
  std::vector<double> w;
  pts.reserve(indices.size());
  w.reserve(indices.size());
  double total = 0.0;
  for (int ell : indices) {
    pts.push_back(ensemble.pels[ell]);
    w.push_back(weights_by_ell[ell]);
    total += weights_by_ell[ell];
  }
  if (total < 1e-12) std::fill(w.begin(), w.end(), 1.0);
  return weighted_l1_median(pts, w);
}

}  // namespace

double pel_weight(std::span<const double> sd_values, std::span<const int> subset) {
  double w = 1.0;
  for (int n : subset) w *= 1.0 - sd_values[n];
  return w;
}

std::vector<double> unrefined_sd(const ScoreReport& report, const SigmoidParams& mapping) {
  std::vector<double> sd(report.gnbs.size(), 0.0);
  for (std::size_t n = 0; n < report.gnbs.size(); ++n)
    if (report.gnbs[n].scored) sd[n] = evaluate_sd(mapping, report.gnbs[n].rho);
  return sd;
}

RefineResult refine_scores(const PelEnsemble& ensemble, const Snapshot& snapshot,
                           const ScoreReport& report, const HardDecision& hd,
                           const SigmoidParams& mapping, double eps, int t_max) {
  if (!(eps > 0.0)) throw std::invalid_argument("refine_scores: eps must be positive");
  if (t_max < 1) throw std::invalid_argument("refine_scores: t_max must be >= 1");
  const std::size_t n_gnbs = snapshot.size();

  const std::vector<int> survivors = hd.survivors();
  const std::vector<int> hd_idx = restrict_to_gnbs(ensemble, survivors);
  if (hd_idx.empty()) throw EmptyHdSet("refine_scores: no PELs survive the HD restriction");

  // Partition of the HD-restricted set per surviving gNB.
  std::vector<std::vector<int>> with_gnb(n_gnbs), without_gnb(n_gnbs);
  for (int ell : hd_idx) {
    const auto& subset = ensemble.subsets[ell];
    for (int g : survivors) {
      const bool member = std::find(subset.begin(), subset.end(), g) != subset.end();
      (member ? with_gnb[g] : without_gnb[g]).push_back(ell);
    }
  }

  RefineResult result;
  result.scores.assign(n_gnbs, std::numeric_limits<double>::quiet_NaN());
  result.refined.assign(n_gnbs, 0);
  std::vector<std::uint8_t> active(n_gnbs, 0);  // refinable and not frozen
  for (int g : survivors) {
    if (!report.gnbs[g].scored) continue;
    result.scores[g] = report.gnbs[g].rho;
    if (with_gnb[g].empty() || without_gnb[g].empty()) continue;  // frozen from the start
    active[g] = 1;
    result.refined[g] = 1;
  }
  for (std::size_t g = 0; g < n_gnbs; ++g)
    if (!result.refined[g] && report.gnbs[g].scored) result.scores[g] = report.gnbs[g].rho;

  std::vector<std::uint8_t> surviving(n_gnbs, 0);
  for (int g : survivors) surviving[g] = 1;

  std::vector<double> sd_current(n_gnbs, 0.0);
  for (std::size_t g = 0; g < n_gnbs; ++g)
    if (report.gnbs[g].scored) sd_current[g] = evaluate_sd(mapping, result.scores[g]);

  std::vector<double> weights(ensemble.total(), 0.0);
  for (int t = 0; t < t_max; ++t) {
    for (int ell : hd_idx) weights[ell] = pel_weight(sd_current, ensemble.subsets[ell]);

    const Point2 pseudo = guarded_weighted_median(ensemble, hd_idx, weights);

    std::vector<double> next_scores = result.scores;
    for (std::size_t g = 0; g < n_gnbs; ++g) {
      if (!active[g]) continue;
      const Point2 rep_with = guarded_weighted_median(ensemble, with_gnb[g], weights);
      const Point2 rep_without = guarded_weighted_median(ensemble, without_gnb[g], weights);
      const Point2 nev = rep_with - rep_without;
      const Point2 reference = pseudo - snapshot.gnb_positions[g];
      const double ref_norm = norm(reference);
      if (ref_norm <= 0.0) {
        active[g] = 0;  // frozen at the current value
        continue;
      }
      next_scores[g] = dot(nev, reference) / ref_norm * std::sqrt(snapshot.ranges[g]);
    }

    double conv = 0.0;
    for (std::size_t g = 0; g < n_gnbs; ++g) {
      if (!surviving[g] || !report.gnbs[g].scored) continue;
      const double d = evaluate_sd(mapping, next_scores[g]) - evaluate_sd(mapping, result.scores[g]);
      conv += d * d;
    }

    result.scores = std::move(next_scores);
    for (std::size_t g = 0; g < n_gnbs; ++g)
      if (surviving[g] && report.gnbs[g].scored)
        sd_current[g] = evaluate_sd(mapping, result.scores[g]);
    result.iterations = t + 1;
    result.convergence_sum = conv;
    if (conv <= eps) break;
  }

  result.sd.assign(n_gnbs, 0.0);
  for (std::size_t g = 0; g < n_gnbs; ++g) {
    if (!report.gnbs[g].scored) continue;  // fail-open: unscored stays at 0
    result.sd[g] = surviving[g] ? evaluate_sd(mapping, result.scores[g])
                                : evaluate_sd(mapping, report.gnbs[g].rho);
  }
  return result;
}

}  // namespace cdand
