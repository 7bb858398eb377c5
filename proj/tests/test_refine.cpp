#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cdand/errors.hpp"
#include "cdand/refine.hpp"

using namespace cdand;

namespace {

Snapshot biased_snapshot(int n, std::vector<int> blocked, double bias, double noise_std,
                         unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 120.0), uy(0.0, 60.0);
  Snapshot s;
  for (int i = 0; i < n; ++i) s.gnb_positions.push_back({ux(rng), uy(rng)});
  const Point2 ue{ux(rng), uy(rng)};
  s.truth_position = ue;
  s.truth_labels.emplace(n, LinkState::los);
  std::normal_distribution<double> noise(0.0, noise_std);
  for (int i = 0; i < n; ++i) {
    double d = distance(s.gnb_positions[i], ue) + (noise_std > 0 ? noise(rng) : 0.0);
    for (int b : blocked)
      if (b == i) {
        d += bias;
        (*s.truth_labels)[i] = LinkState::nlos;
      }
    s.ranges.push_back(std::max(0.0, d));
  }
  return s;
}

}  // namespace

TEST_CASE("pel_weight products") {
  std::vector<double> sd{0.0, 0.0, 0.0, 1.0, 0.5};
  CHECK(pel_weight(sd, std::vector<int>{0, 1, 2}) == doctest::Approx(1.0));
  CHECK(pel_weight(sd, std::vector<int>{0, 1, 3}) == doctest::Approx(0.0));
  std::vector<double> half{0.5, 0.5, 0.5};
  CHECK(pel_weight(half, std::vector<int>{0, 1, 2}) == doctest::Approx(0.125));
}

TEST_CASE("an all-zero SD mapping is a fixed point reached at iteration 1") {
  const Snapshot snap = biased_snapshot(8, {}, 0.0, 0.5, 61);
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  HardDecision hd;
  hd.labels.assign(8, LinkState::los);  // keep everything
  const SigmoidParams zero{0.0, 1.0, 0.0, 0.0};
  const RefineResult r = refine_scores(ensemble, snap, report, hd, zero, 1e-3, 25);
  CHECK(r.iterations == 1);
  CHECK(r.convergence_sum == 0.0);
  for (double v : r.sd) CHECK(v == 0.0);
}

TEST_CASE("an infinite tolerance stops after one iteration") {
  const Snapshot snap = biased_snapshot(8, {2}, 20.0, 0.5, 62);
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  const HardDecision hd = hard_decide(report, 0.5);
  const SigmoidParams phi{0.9, 0.8, 2.0, 0.05};
  const RefineResult r = refine_scores(ensemble, snap, report, hd, phi,
                                       std::numeric_limits<double>::infinity(), 25);
  CHECK(r.iterations == 1);
}

TEST_CASE("refinement stays within bounds and is deterministic") {
  const Snapshot snap = biased_snapshot(10, {1, 5}, 22.0, 1.0, 63);
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  const HardDecision hd = hard_decide(report, 0.5);
  const SigmoidParams phi{0.9, 0.6, 3.0, 0.05};
  const RefineResult a = refine_scores(ensemble, snap, report, hd, phi, 1e-3, 25);
  const RefineResult b = refine_scores(ensemble, snap, report, hd, phi, 1e-3, 25);
  CHECK(a.iterations <= 25);
  for (double v : a.sd) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(a.iterations == b.iterations);
  CHECK(a.convergence_sum == b.convergence_sum);
  for (std::size_t i = 0; i < a.sd.size(); ++i) CHECK(a.sd[i] == b.sd[i]);
}

TEST_CASE("unequal SD values produce unequal PEL weights") {
  std::vector<double> sd{0.1, 0.4, 0.1, 0.1};
  const double w0 = pel_weight(sd, std::vector<int>{0, 2, 3});
  const double w1 = pel_weight(sd, std::vector<int>{1, 2, 3});
  CHECK(w0 != w1);
}

TEST_CASE("a missed NLoS gNB gains SD mass through refinement") {
  // One blocked gNB among ten, moderate bias, low noise. Force it into the
  // surviving set: refinement must push its SD value up, not down.
  const Snapshot snap = biased_snapshot(10, {3}, 20.0, 0.5, 64);
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  HardDecision hd;
  hd.labels.assign(10, LinkState::los);  // everyone escapes the hard decision
  hd.lambda = 0.5;

  const SigmoidParams phi{0.95, 0.25, 6.0, 0.02};
  const RefineResult r = refine_scores(ensemble, snap, report, hd, phi, 1e-6, 25);
  const double before = evaluate_sd(phi, report.gnbs[3].rho);
  const double after = r.sd[3];
  CHECK(after > before);
  // regression pin for the constructed scenario (first correct run)
  CHECK(after > 0.9);
}

TEST_CASE("empty HD set raises and the fallback covers all gNBs") {
  const Snapshot snap = biased_snapshot(6, {0, 1, 2, 3, 4, 5}, 15.0, 0.5, 65);
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  HardDecision hd;
  hd.labels.assign(6, LinkState::nlos);  // nothing survives
  const SigmoidParams phi{0.9, 0.5, 1.0, 0.05};
  CHECK_THROWS_AS(refine_scores(ensemble, snap, report, hd, phi, 1e-3, 25), EmptyHdSet);
  const std::vector<double> sd = unrefined_sd(report, phi);
  CHECK(sd.size() == 6);
  for (std::size_t g = 0; g < 6; ++g)
    if (report.gnbs[g].scored) CHECK(sd[g] == evaluate_sd(phi, report.gnbs[g].rho));
}
