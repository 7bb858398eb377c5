#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cdand/snapshot.hpp"

namespace cdand {

enum class BiasFamily { truncated_gaussian, exponential, lognormal };

/// Target mean/std of the total NLoS-class range error (bias plus noise). The
/// generator deconvolves the configured LoS noise variance to get the bias
/// distribution, so empirical per-class moments match the spec directly.
struct BiasSpec {
  BiasFamily family = BiasFamily::truncated_gaussian;
  double mean = 0.0;
  double stddev = 0.0;
};

struct NoiseComponent {
  double weight = 1.0;
  double stddev = 0.0;
};

/// Zero-mean Gaussian mixture for LoS ranging noise.
struct NoiseSpec {
  std::vector<NoiseComponent> components{{1.0, 0.0}};
  double stddev() const;
};

enum class LayoutKind { grid, uniform_random, explicit_coords };
enum class NlosModel { iid, disks };

struct ScenarioConfig {
  double width = 120.0;
  double height = 60.0;
  int gnb_count = 18;
  double nlos_prob = 0.0;
  NoiseSpec noise_los;
  BiasSpec nlos_bias;
  LayoutKind layout = LayoutKind::grid;
  std::vector<Point2> explicit_gnbs;
  NlosModel nlos_model = NlosModel::iid;
  int disk_count = 0;
  double disk_radius = 0.0;
  std::uint64_t seed = 0;
  int drops = 100;
  std::string preset_name;

  void validate() const;
};

/// Per-snapshot generator internals kept for consistency checks.
struct SnapshotTruth {
  std::vector<double> noise;
  std::vector<double> bias;
  std::vector<std::uint8_t> clamped;  // range clipped at zero
};

struct SnapshotBatch {
  ScenarioConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<SnapshotTruth> truth;
};

/// Regular grid of n points scaled to the area, row-major at cell centers.
std::vector<Point2> grid_layout(int n, double width, double height);

/// Deterministic batch generation; snapshot i draws from a sub-stream of the
/// master seed so parallel generation matches sequential output.
SnapshotBatch generate(const ScenarioConfig& config);

/// Nonnegative bias sampler moment-matched to the requested mean/std.
class BiasSampler {
 public:
  BiasSampler(BiasFamily family, double mean, double stddev);
  double draw(std::mt19937_64& rng) const;
  double configured_mean() const { return mean_; }
  double configured_stddev() const { return stddev_; }

 private:
  BiasFamily family_;
  double mean_ = 0.0;
  double stddev_ = 0.0;
  double param_a_ = 0.0;  // family-specific
  double param_b_ = 0.0;
};

}  // namespace cdand
