#include "cdand/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

double normal_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

// Hazard of the standard normal, phi(u) / (1 - Phi(u)).
double mills_inverse(double u) {
  const double tail = 1.0 - normal_cdf(u);
  if (tail > 0.0) return normal_pdf(u) / tail;
  return u + 1.0 / u;  // asymptotic, u large positive
}

// CV^2 of a Gaussian truncated at zero, parameterized by u = -m/s.
double truncated_cv_sq(double u) {
  const double lam = mills_inverse(u);
  const double mean = lam - u;
  const double var = 1.0 + u * lam - lam * lam;
  return var / (mean * mean);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

bool segment_hits_disk(Point2 a, Point2 b, Point2 center, double radius) {
  const Point2 ab = b - a;
  const double len_sq = norm_sq(ab);
  double t = len_sq > 0.0 ? dot(center - a, ab) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(a + ab * t, center) <= radius;
}

}  // namespace

double NoiseSpec::stddev() const {
  double wsum = 0.0, var = 0.0;
  for (const NoiseComponent& c : components) {
    wsum += c.weight;
    var += c.weight * c.stddev * c.stddev;
  }
  return wsum > 0.0 ? std::sqrt(var / wsum) : 0.0;
}

void ScenarioConfig::validate() const {
  if (gnb_count < 4) throw InvalidConfig("scenario: need at least 4 gNBs");
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidConfig("scenario: area must be positive");
  if (nlos_prob < 0.0 || nlos_prob > 1.0) throw InvalidConfig("scenario: nlos_prob outside [0,1]");
  if (drops < 1) throw InvalidConfig("scenario: drops must be >= 1");
  if (layout == LayoutKind::explicit_coords &&
      static_cast<int>(explicit_gnbs.size()) != gnb_count)
    throw InvalidConfig("scenario: explicit layout needs exactly gnb_count coordinates");
  if (noise_los.components.empty()) throw InvalidConfig("scenario: empty noise spec");
  double wsum = 0.0;
  for (const NoiseComponent& c : noise_los.components) {
    if (c.weight < 0.0 || c.stddev < 0.0) throw InvalidConfig("scenario: bad noise component");
    wsum += c.weight;
  }
  if (wsum <= 0.0) throw InvalidConfig("scenario: noise weights sum to zero");
  if (nlos_prob > 0.0 || nlos_model == NlosModel::disks) {
    if (!(nlos_bias.mean > 0.0)) throw InvalidConfig("scenario: NLoS bias mean must be positive");
    const double noise_var = noise_los.stddev() * noise_los.stddev();
    if (nlos_bias.stddev * nlos_bias.stddev <= noise_var)
      throw InvalidConfig("scenario: NLoS class std must exceed the LoS noise std");
  }
  if (nlos_model == NlosModel::disks && (disk_count < 1 || !(disk_radius > 0.0)))
    throw InvalidConfig("scenario: disk model needs disk_count >= 1 and a positive radius");
}

BiasSampler::BiasSampler(BiasFamily family, double mean, double stddev)
    : family_(family), mean_(mean), stddev_(stddev) {
  if (!(mean > 0.0) || !(stddev >= 0.0)) throw InvalidConfig("bias: mean must be positive");
  switch (family_) {
    case BiasFamily::truncated_gaussian: {
      if (stddev == 0.0) {
        param_a_ = mean;
        param_b_ = 0.0;
        break;
      }
      const double cv_sq = (stddev / mean) * (stddev / mean);
      if (cv_sq >= 0.98)
        throw InvalidConfig(
            "bias: coefficient of variation too large for a zero-truncated Gaussian; "
            "use the lognormal family");
      if (cv_sq <= truncated_cv_sq(-37.0)) {
        // truncation is negligible this far from zero
        param_a_ = mean;
        param_b_ = stddev;
        break;
      }
      // invert CV(u) by bisection, then scale
      double lo = -37.0, hi = 34.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        (truncated_cv_sq(mid) < cv_sq ? lo : hi) = mid;
      }
      const double u = (lo + hi) / 2.0;
      const double lam = mills_inverse(u);
      const double unit_std = std::sqrt(1.0 + u * lam - lam * lam);
      param_b_ = stddev / unit_std;       // s
      param_a_ = -u * param_b_;           // m
      break;
    }
    case BiasFamily::exponential:
      param_a_ = mean;  // matches the mean; std equals mean by construction
      break;
    case BiasFamily::lognormal: {
      const double cv_sq = (stddev / mean) * (stddev / mean);
      param_b_ = std::sqrt(std::log1p(cv_sq));          // sigma
      param_a_ = std::log(mean) - 0.5 * param_b_ * param_b_;  // mu
      break;
    }
  }
}

double BiasSampler::draw(std::mt19937_64& rng) const {
  switch (family_) {
    case BiasFamily::truncated_gaussian: {
      if (param_b_ == 0.0) return param_a_;
      std::normal_distribution<double> dist(param_a_, param_b_);
      for (int tries = 0; tries < 100000; ++tries) {
        const double v = dist(rng);
        if (v >= 0.0) return v;
      }
      throw InvalidConfig("bias: truncated Gaussian rejection failed");
    }
    case BiasFamily::exponential: {
      std::exponential_distribution<double> dist(1.0 / param_a_);
      return dist(rng);
    }
    case BiasFamily::lognormal: {
      if (param_b_ == 0.0) return std::exp(param_a_);
      std::normal_distribution<double> dist(param_a_, param_b_);
      return std::exp(dist(rng));
    }
  }
  return 0.0;
}

std::vector<Point2> grid_layout(int n, double width, double height) {
  int rows = static_cast<int>(std::lround(std::sqrt(n * height / width)));
  rows = std::clamp(rows, 1, n);
  while (rows > 1 && (n + rows - 1) / rows * (rows - 1) >= n) --rows;  // avoid empty rows
  const int cols = (n + rows - 1) / rows;
  std::vector<Point2> out;
  out.reserve(n);
  for (int idx = 0; idx < n; ++idx) {
    const int r = idx / cols;
    const int c = idx % cols;
    const int row_count = std::min(cols, n - r * cols);
    const double dx = width / row_count;
    out.push_back({(c + 0.5) * dx, (r + 0.5) * height / rows});
  }
  return out;
}

SnapshotBatch generate(const ScenarioConfig& config) {
  config.validate();

  SnapshotBatch batch;
  batch.config = config;
  batch.snapshots.reserve(config.drops);
  batch.truth.reserve(config.drops);

  std::vector<Point2> gnbs;
  switch (config.layout) {
    case LayoutKind::grid:
      gnbs = grid_layout(config.gnb_count, config.width, config.height);
      break;
    case LayoutKind::explicit_coords:
      gnbs = config.explicit_gnbs;
      break;
    case LayoutKind::uniform_random: {
      auto rng = substream(config.seed, 0xffffffffffffffffull);
      std::uniform_real_distribution<double> ux(0.0, config.width), uy(0.0, config.height);
      gnbs.resize(config.gnb_count);
      for (Point2& z : gnbs) z = {ux(rng), uy(rng)};
      break;
    }
  }

  std::vector<std::pair<Point2, double>> disks;
  if (config.nlos_model == NlosModel::disks) {
    auto rng = substream(config.seed, 0xfffffffffffffffeull);
    std::uniform_real_distribution<double> ux(0.0, config.width), uy(0.0, config.height);
    for (int i = 0; i < config.disk_count; ++i)
      disks.emplace_back(Point2{ux(rng), uy(rng)}, config.disk_radius);
  }

  const double noise_std = config.noise_los.stddev();
  const bool has_nlos = config.nlos_prob > 0.0 || config.nlos_model == NlosModel::disks;
  std::optional<BiasSampler> bias;
  if (has_nlos) {
    const double bias_var =
        config.nlos_bias.stddev * config.nlos_bias.stddev - noise_std * noise_std;
    bias.emplace(config.nlos_bias.family, config.nlos_bias.mean, std::sqrt(bias_var));
  }

  double noise_total_weight = 0.0;
  for (const NoiseComponent& c : config.noise_los.components) noise_total_weight += c.weight;

  for (int drop = 0; drop < config.drops; ++drop) {
    auto rng = substream(config.seed, static_cast<std::uint64_t>(drop));
    Snapshot snap;
    SnapshotTruth truth;
    const int n = config.gnb_count;
    snap.gnb_positions = gnbs;
    snap.ranges.resize(n);
    snap.truth_labels.emplace(n, LinkState::los);
    truth.noise.resize(n);
    truth.bias.assign(n, 0.0);
    truth.clamped.assign(n, 0);

    std::uniform_real_distribution<double> ux(0.0, config.width), uy(0.0, config.height);
    const Point2 ue{ux(rng), uy(rng)};
    snap.truth_position = ue;

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      bool nlos = false;
      if (config.nlos_model == NlosModel::iid) {
        nlos = coin(rng) < config.nlos_prob;
      } else {
        for (const auto& [center, radius] : disks)
          if (segment_hits_disk(ue, gnbs[i], center, radius)) { nlos = true; break; }
      }
      (*snap.truth_labels)[i] = nlos ? LinkState::nlos : LinkState::los;

      // mixture component pick, then the zero-mean draw
      double pick = coin(rng) * noise_total_weight;
      double sigma = config.noise_los.components.back().stddev;
      for (const NoiseComponent& c : config.noise_los.components) {
        if (pick < c.weight) { sigma = c.stddev; break; }
        pick -= c.weight;
      }
      std::normal_distribution<double> noise_dist(0.0, sigma);
      const double w = sigma > 0.0 ? noise_dist(rng) : 0.0;
      const double b = nlos ? bias->draw(rng) : 0.0;

      truth.noise[i] = w;
      truth.bias[i] = b;
      double d = distance(gnbs[i], ue) + b + w;
      if (d < 0.0) {
        d = 0.0;
        truth.clamped[i] = 1;
      }
      snap.ranges[i] = d;
    }
    batch.snapshots.push_back(std::move(snap));
    batch.truth.push_back(std::move(truth));
  }
  return batch;
}

}  // namespace cdand
