#pragma once

#include <limits>
#include <span>
#include <vector>

#include "cdand/cda.hpp"

namespace cdand {

/// Displacement between the median of PELs built with gNB n and the median of
/// those built without it. Points away from a blocked gNB when n is NLoS.
struct NevResult {
  Point2 nev;          // rep_with - rep_without
  Point2 rep_with;     // med(X_n)
  Point2 rep_without;  // med(X_{-n})
};

NevResult compute_nev(const PelEnsemble& ensemble, int gnb);

/// rho = (nev . ref / |ref|) * sqrt(range). Throws ZeroReference when the
/// reference vector vanishes.
double score(Point2 nev, Point2 reference, double range);

enum class SkipReason { none, empty_partition, zero_reference };

struct GnbScore {
  bool scored = false;
  SkipReason skip = SkipReason::none;
  double rho = std::numeric_limits<double>::quiet_NaN();
  Point2 nev;
  Point2 reference;
  Point2 rep_with;
  Point2 rep_without;
};

struct ScoreReport {
  std::vector<GnbScore> gnbs;
  Point2 pseudo_location;  // median of all valid PELs

  std::vector<double> scored_values() const;
};

/// Score every gNB of the snapshot. Unscorable gNBs (empty partition or zero
/// reference) are flagged and excluded from threshold statistics.
ScoreReport score_snapshot(const PelEnsemble& ensemble, const Snapshot& snapshot);

/// eta = med(scores) + lambda * med(|score - med(scores)|).
double adaptive_threshold(std::span<const double> scores, double lambda);

struct HardDecision {
  std::vector<LinkState> labels;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;

  /// gNB indices kept as LoS (the surviving set).
  std::vector<int> survivors() const;
};

/// Label NLoS iff rho >= eta. Unscored gNBs default to LoS.
HardDecision hard_decide(const ScoreReport& report, double lambda);
std::vector<LinkState> hard_decide(std::span<const double> scores, double eta);

}  // namespace cdand
