#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cdand/errors.hpp"
#include "cdand/metrics.hpp"

using namespace cdand;

namespace {

// Rank-statistic AUC: concordant pairs with half weight for ties.
double pairwise_auc(const std::vector<double>& scores, const std::vector<LinkState>& truth) {
  double concordant = 0.0;
  long long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != LinkState::nlos) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != LinkState::los) continue;
      ++pairs;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) concordant += 0.5;
    }
  }
  return concordant / static_cast<double>(pairs);
}

// Direct triple-loop evaluation of the V-statistic with an explicit bandwidth.
double naive_mmd(const std::vector<Point2>& a, const std::vector<Point2>& b, double bw) {
  auto k = [&](Point2 p, Point2 q) { return std::exp(-bw * norm_sq(p - q)); };
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (const auto& x : a)
    for (const auto& y : a) saa += k(x, y);
  for (const auto& x : b)
    for (const auto& y : b) sbb += k(x, y);
  for (const auto& x : a)
    for (const auto& y : b) sab += k(x, y);
  const double na = a.size(), nb = b.size();
  return saa / (na * na) + sbb / (nb * nb) - 2.0 * sab / (na * nb);
}

double union_median_bandwidth(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  std::vector<Point2> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::vector<double> d;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) d.push_back(norm_sq(all[i] - all[j]));
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size() / 2;
  const double med = d.size() % 2 ? d[m] : (d[m - 1] + d[m]) / 2.0;
  return 1.0 / med;
}

}  // namespace

TEST_CASE("AUC trivial cases") {
  std::vector<double> separated{0.1, 0.2, 0.8, 0.9};
  std::vector<LinkState> truth{LinkState::los, LinkState::los, LinkState::nlos, LinkState::nlos};
  CHECK(*auc_from_scores(separated, truth) == doctest::Approx(1.0));

  std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
  CHECK(*auc_from_scores(ties, truth) == doctest::Approx(0.5));

  std::vector<LinkState> single(4, LinkState::los);
  CHECK(!auc_from_scores(separated, single).has_value());
}

TEST_CASE("ROC-sweep AUC equals the pairwise-count oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> quantize(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 20;
    std::vector<double> scores(n);
    std::vector<LinkState> truth(n);
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      scores[i] = quantize(rng) / 10.0;  // force ties
      truth[i] = u(rng) < 0.4 ? LinkState::nlos : LinkState::los;
      (truth[i] == LinkState::nlos ? pos : neg) = true;
    }
    if (!pos || !neg) { --trial; continue; }
    CHECK(*auc_from_scores(scores, truth) == doctest::Approx(pairwise_auc(scores, truth)).epsilon(1e-12));
  }
}

TEST_CASE("detection metrics confusion consistency") {
  std::vector<double> scores{0.9, 0.8, 0.3, 0.2, 0.6};
  std::vector<LinkState> pred{LinkState::nlos, LinkState::nlos, LinkState::los, LinkState::los,
                              LinkState::los};
  std::vector<LinkState> truth{LinkState::nlos, LinkState::los, LinkState::los, LinkState::nlos,
                               LinkState::los};
  const DetectionSummary s = detection_metrics(scores, pred, truth);
  CHECK(s.confusion.tp == 1);
  CHECK(s.confusion.fp == 1);
  CHECK(s.confusion.fn == 1);
  CHECK(s.confusion.tn == 2);
  CHECK(s.accuracy == doctest::Approx((1.0 + 2.0) / 5.0));
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(s.confusion.total() == 5);
}

TEST_CASE("error_stats hand cases") {
  std::vector<double> v{1, 2, 3, 4, 5};
  const ErrorSummary s = error_stats(v);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.p95 == doctest::Approx(5.0));
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.0)));

  std::vector<double> flat{2.5, 2.5, 2.5};
  CHECK(error_stats(flat).stddev == doctest::Approx(0.0));
  CHECK_THROWS_AS(error_stats(std::vector<double>{}), EmptySet);
}

TEST_CASE("percentile matches the sort-index oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(1000);
  for (double& x : v) x = u(rng);
  const ErrorSummary s = error_stats(v);
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  CHECK(s.p95 == sorted[949]);  // ceil(0.95*1000) = 950, 1-based
  CHECK(s.median == doctest::Approx((sorted[499] + sorted[500]) / 2.0));
}

TEST_CASE("mmd of identical sets is zero") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Point2> pts(30);
  for (Point2& p : pts) p = {u(rng), u(rng)};
  CHECK(std::abs(mmd_squared(pts, pts)) < 1e-12);
}

TEST_CASE("mmd of two singletons has the closed form") {
  std::vector<Point2> a{{0.0, 0.0}};
  std::vector<Point2> b{{3.0, 4.0}};
  const double d_sq = 25.0;
  // median heuristic over the union gives 1/d^2
  CHECK(mmd_squared(a, b) == doctest::Approx(2.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(mmd_squared_fixed(a, b, 0.07) ==
        doctest::Approx(2.0 - 2.0 * std::exp(-0.07 * d_sq)).epsilon(1e-12));
}

TEST_CASE("mmd matches the naive triple loop") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point2> a(50), b(50);
    for (Point2& p : a) p = {u(rng), u(rng)};
    for (Point2& p : b) p = {u(rng) + 1.0, u(rng)};
    const double bw = union_median_bandwidth(a, b);
    CHECK(mmd_squared(a, b) == doctest::Approx(naive_mmd(a, b, bw)).epsilon(1e-10));
  }
}

TEST_CASE("mmd is symmetric and rigid-motion invariant") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Point2> a(20), b(25);
  for (Point2& p : a) p = {u(rng), u(rng)};
  for (Point2& p : b) p = {u(rng) + 2.0, u(rng) - 1.0};
  CHECK(mmd_squared(a, b) == doctest::Approx(mmd_squared(b, a)).epsilon(1e-12));

  const double th = 0.83;
  auto rot = [&](Point2 p) {
    return Point2{p.x * std::cos(th) - p.y * std::sin(th) + 11.0,
                  p.x * std::sin(th) + p.y * std::cos(th) - 4.0};
  };
  std::vector<Point2> ar, br;
  for (const Point2& p : a) ar.push_back(rot(p));
  for (const Point2& p : b) br.push_back(rot(p));
  CHECK(mmd_squared(ar, br) == doctest::Approx(mmd_squared(a, b)).epsilon(1e-9));
}

TEST_CASE("mmd of identical point clouds reports zero without a usable bandwidth") {
  std::vector<Point2> a(5, Point2{1.0, 1.0});
  std::vector<Point2> b(7, Point2{1.0, 1.0});
  CHECK(mmd_squared(a, b) == 0.0);
}

TEST_CASE("stabilization curve on a noiseless snapshot is flat and complete") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.0, 100.0), uy(0.0, 50.0);
  Snapshot snap;
  const Point2 ue{42.0, 17.0};
  for (int i = 0; i < 10; ++i) snap.gnb_positions.push_back({ux(rng), uy(rng)});
  for (const Point2& z : snap.gnb_positions) snap.ranges.push_back(distance(z, ue));

  std::vector<int> order{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto curve = mmd_stabilization_curve(snap, order, 5);
  CHECK(curve.size() == 6);  // N = 5..10
  for (const auto& [n, v] : curve) CHECK(v < 1e-10);
}
