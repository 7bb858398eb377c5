#include "cdand/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cdand/cda.hpp"
#include "cdand/errors.hpp"

namespace cdand {

namespace {

double kahan_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

std::optional<double> auc_from_scores(std::span<const double> scores,
                                      std::span<const LinkState> truth,
                                      std::vector<RocPoint>* roc) {
  if (scores.size() != truth.size())
    throw std::invalid_argument("auc: score/label length mismatch");
  long long positives = 0, negatives = 0;
  for (LinkState t : truth) (t == LinkState::nlos ? positives : negatives)++;
  if (roc) roc->clear();
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double auc = 0.0;
  double tp = 0, fp = 0, prev_tpr = 0, prev_fpr = 0;
  if (roc) roc->push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    // consume the whole tie group at once so ties weigh half
    while (i < order.size() && scores[order[i]] == s) {
      (truth[order[i]] == LinkState::nlos ? tp : fp)++;
      ++i;
    }
    const double tpr = tp / static_cast<double>(positives);
    const double fpr = fp / static_cast<double>(negatives);
    auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    if (roc) roc->push_back({fpr, tpr, s});
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return auc;
}

DetectionSummary detection_metrics(std::span<const double> scores,
                                   std::span<const LinkState> predicted,
                                   std::span<const LinkState> truth) {
  if (predicted.size() != truth.size() || scores.size() != truth.size())
    throw std::invalid_argument("detection_metrics: length mismatch");
  DetectionSummary s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pos = predicted[i] == LinkState::nlos;
    const bool real = truth[i] == LinkState::nlos;
    if (pos && real) s.confusion.tp++;
    else if (pos && !real) s.confusion.fp++;
    else if (!pos && real) s.confusion.fn++;
    else s.confusion.tn++;
  }
  const auto& c = s.confusion;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : nan;
  s.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : nan;
  s.accuracy = c.total() > 0 ? static_cast<double>(c.tp + c.tn) / c.total() : nan;
  s.auc = auc_from_scores(scores, truth, &s.roc);
  return s;
}

ErrorSummary error_stats(std::span<const double> errors) {
  if (errors.empty()) throw EmptySet("error_stats: empty input");
  ErrorSummary s;
  s.cdf.assign(errors.begin(), errors.end());
  std::sort(s.cdf.begin(), s.cdf.end());
  const double n = static_cast<double>(errors.size());
  s.mean = kahan_sum(errors) / n;
  std::vector<double> sq(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double d = errors[i] - s.mean;
    sq[i] = d * d;
  }
  s.stddev = std::sqrt(kahan_sum(sq) / n);
  s.median = scalar_median(s.cdf);
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * n));
  s.p95 = s.cdf[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

double mmd_squared_fixed(std::span<const Point2> a, std::span<const Point2> b, double bandwidth) {
  if (a.empty() || b.empty()) throw EmptySet("mmd_squared: empty point set");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // self terms: diagonal kernels are exp(0) = 1, off-diagonal counted twice
  double saa = na;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      saa += 2.0 * std::exp(-bandwidth * norm_sq(a[i] - a[j]));
  double sbb = nb;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      sbb += 2.0 * std::exp(-bandwidth * norm_sq(b[i] - b[j]));
  double sab = 0.0;
  for (const Point2& pa : a)
    for (const Point2& pb : b) sab += std::exp(-bandwidth * norm_sq(pa - pb));

  return saa / (na * na) + sbb / (nb * nb) - 2.0 * sab / (na * nb);
}

double mmd_squared(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw EmptySet("mmd_squared: empty point set");
  std::vector<Point2> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::vector<double> dist_sq;
  dist_sq.reserve(all.size() * (all.size() - 1) / 2);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) dist_sq.push_back(norm_sq(all[i] - all[j]));
  if (dist_sq.empty()) return 0.0;  // two singletons at the same spot degenerate below

  double med = scalar_median(dist_sq);
  if (med <= 0.0) {
    std::vector<double> positive;
    for (double d : dist_sq)
      if (d > 0.0) positive.push_back(d);
    if (positive.empty()) return 0.0;  // all points identical
    med = scalar_median(positive);
  }
  return mmd_squared_fixed(a, b, 1.0 / med);
}

std::vector<std::pair<int, double>> mmd_stabilization_curve(const Snapshot& snapshot,
                                                            std::span<const int> order,
                                                            int n_min) {
  if (n_min < 4) throw std::invalid_argument("mmd_stabilization_curve: n_min must be >= 4");
  const int total = static_cast<int>(snapshot.size());
  if (static_cast<int>(order.size()) != total)
    throw std::invalid_argument("mmd_stabilization_curve: order must permute all gNBs");
  if (n_min > total) throw std::invalid_argument("mmd_stabilization_curve: n_min exceeds N");

  // Grow the ensemble with the insertion order, reusing solved PELs: the
  // triples of the first N gNBs extend those of the first N-1.
  std::vector<Point2> pels;
  std::vector<Point2> anchors(3);
  std::vector<double> ranges(3);
  auto add_triples_with = [&](int newest) {
    // newest = position of the just-added gNB in `order`
    for (int i = 0; i < newest; ++i)
      for (int j = i + 1; j < newest; ++j) {
        const int ga = order[i], gb = order[j], gc = order[newest];
        anchors[0] = snapshot.gnb_positions[ga];
        anchors[1] = snapshot.gnb_positions[gb];
        anchors[2] = snapshot.gnb_positions[gc];
        ranges[0] = snapshot.ranges[ga];
        ranges[1] = snapshot.ranges[gb];
        ranges[2] = snapshot.ranges[gc];
        try {
          pels.push_back(multilaterate(anchors, ranges));
        } catch (const DegenerateGeometry&) {
        } catch (const NoConvergence&) {
        }
      }
  };

  std::vector<std::pair<int, double>> curve;
  std::vector<Point2> prev;
  for (int n = 0; n < total; ++n) {
    if (n >= 2) add_triples_with(n);
    const int count = n + 1;
    if (count == n_min - 1) prev = pels;
    if (count >= n_min) {
      if (prev.empty() || pels.empty())
        throw TooFewValidPels("mmd_stabilization_curve: empty ensemble at N=" +
                              std::to_string(count));
      curve.emplace_back(count, mmd_squared(pels, prev));
      prev = pels;
    }
  }
  return curve;
}

}  // namespace cdand
