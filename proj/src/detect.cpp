#include "cdand/detect.hpp"

#include <cmath>
#include <string>

#include "cdand/errors.hpp"

namespace cdand {

NevResult compute_nev(const PelEnsemble& ensemble, int gnb) {
  const GnbPartition part = partition_by_gnb(ensemble, gnb);
  if (part.with_gnb.empty() || part.without_gnb.empty())
    throw EmptyPartition("compute_nev: empty partition for gNB " + std::to_string(gnb));
  NevResult r;
  r.rep_with = coordinate_median(gather_pels(ensemble, part.with_gnb));
  r.rep_without = coordinate_median(gather_pels(ensemble, part.without_gnb));
  r.nev = r.rep_with - r.rep_without;
  return r;
}

double score(Point2 nev, Point2 reference, double range) {
  const double ref_norm = norm(reference);
  if (ref_norm <= 0.0) throw ZeroReference("score: zero reference vector");
  if (range < 0.0) throw std::invalid_argument("score: negative range");
  return dot(nev, reference) / ref_norm * std::sqrt(range);
}

std::vector<double> ScoreReport::scored_values() const {
  std::vector<double> out;
  out.reserve(gnbs.size());
  for (const GnbScore& g : gnbs)
    if (g.scored) out.push_back(g.rho);
  return out;
}

ScoreReport score_snapshot(const PelEnsemble& ensemble, const Snapshot& snapshot) {
  ScoreReport report;
  report.gnbs.resize(snapshot.size());
  report.pseudo_location = coordinate_median(gather_pels(ensemble, ensemble.valid_indices()));

  for (std::size_t n = 0; n < snapshot.size(); ++n) {
    GnbScore& g = report.gnbs[n];
    try {
      const NevResult nev = compute_nev(ensemble, static_cast<int>(n));
      g.nev = nev.nev;
      g.rep_with = nev.rep_with;
      g.rep_without = nev.rep_without;
    } catch (const EmptyPartition&) {
      g.skip = SkipReason::empty_partition;
      continue;
    }
    g.reference = report.pseudo_location - snapshot.gnb_positions[n];
    try {
      g.rho = score(g.nev, g.reference, snapshot.ranges[n]);
      g.scored = true;
    } catch (const ZeroReference&) {
      g.skip = SkipReason::zero_reference;
    }
  }
  return report;
}

double adaptive_threshold(std::span<const double> scores, double lambda) {
  if (scores.empty()) throw EmptySet("adaptive_threshold: no scores");
  if (!(lambda > 0.0)) throw std::invalid_argument("adaptive_threshold: lambda must be > 0");
  const double med = scalar_median(scores);
  std::vector<double> dev(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) dev[i] = std::abs(scores[i] - med);
  return med + lambda * scalar_median(dev);
}

std::vector<LinkState> hard_decide(std::span<const double> scores, double eta) {
  std::vector<LinkState> labels(scores.size(), LinkState::los);
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= eta) labels[i] = LinkState::nlos;
  return labels;
}

HardDecision hard_decide(const ScoreReport& report, double lambda) {
  HardDecision hd;
  hd.lambda = lambda;
  hd.labels.assign(report.gnbs.size(), LinkState::los);
  const std::vector<double> scored = report.scored_values();
  if (scored.empty()) return hd;  // nothing to threshold, fail open
  hd.eta = adaptive_threshold(scored, lambda);
  for (std::size_t n = 0; n < report.gnbs.size(); ++n)
    if (report.gnbs[n].scored && report.gnbs[n].rho >= hd.eta) hd.labels[n] = LinkState::nlos;
  return hd;
}

std::vector<int> HardDecision::survivors() const {
  std::vector<int> out;
  for (std::size_t n = 0; n < labels.size(); ++n)
    if (labels[n] == LinkState::los) out.push_back(static_cast<int>(n));
  return out;
}

}  // namespace cdand
