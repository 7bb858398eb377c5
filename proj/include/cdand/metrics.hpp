#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cdand/snapshot.hpp"

namespace cdand {

struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;  // positive class = NLoS
  long long total() const { return tp + fp + tn + fn; }
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct DetectionSummary {
  Confusion confusion;
  double recall = 0.0;     // tp / (tp + fn)
  double precision = 0.0;  // tp / (tp + fp); NaN when no positive predictions
  double accuracy = 0.0;
  std::optional<double> auc;  // absent when one class is missing
  std::vector<RocPoint> roc;
};

/// Confusion/recall/precision/accuracy from predicted labels plus AUC from the
/// continuous scores (rho for hard decisions, the SD posterior for soft ones).
DetectionSummary detection_metrics(std::span<const double> scores,
                                   std::span<const LinkState> predicted,
                                   std::span<const LinkState> truth);

/// Trapezoidal ROC sweep over all distinct score values; ties contribute half.
std::optional<double> auc_from_scores(std::span<const double> scores,
                                      std::span<const LinkState> truth,
                                      std::vector<RocPoint>* roc = nullptr);

struct ErrorSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  double median = 0.0;
  double p95 = 0.0;     // nearest-rank ceil(0.95 n)
  std::vector<double> cdf;  // sorted errors
};

ErrorSummary error_stats(std::span<const double> errors);

/// Biased V-statistic MMD^2 with a Gaussian RBF kernel. The bandwidth is the
/// inverse median of pairwise squared distances over the union of both sets.
double mmd_squared(std::span<const Point2> a, std::span<const Point2> b);
double mmd_squared_fixed(std::span<const Point2> a, std::span<const Point2> b, double bandwidth);

/// MMD^2 between the PEL ensembles of the first N and first N-1 gNBs under
/// `order`, for N = n_min .. snapshot size.
std::vector<std::pair<int, double>> mmd_stabilization_curve(const Snapshot& snapshot,
                                                            std::span<const int> order,
                                                            int n_min);

}  // namespace cdand
