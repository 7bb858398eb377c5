#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdand/metrics.hpp"
#include "cdand/position.hpp"
#include "cdand/presets.hpp"
#include "cdand/refine.hpp"
#include "cdand/sdmap.hpp"

namespace cdand {

struct ExperimentPlan {
  std::string preset;                       // optional base for defaults
  std::optional<ScenarioConfig> scenario;   // synthetic source
  std::optional<std::string> data_path;     // ingestion source (csv/json)
  double lambda = 1.0;
  FilterConfig filter_plain{1.0, 1.0};
  FilterConfig filter_hd{1.0, 1.0};
  FilterConfig filter_sd{1.0, 1.0};
  int gmm_components = 8;
  double cem_eps = 1e-3;
  int cem_max_iter = 200;
  double refine_eps = 1e-3;
  int refine_t_max = 25;
  int folds = 10;
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware default

  void validate() const;
};

/// Plan from flat JSON keys; unknown keys are rejected. Preset values fill
/// anything the document leaves unset.
ExperimentPlan plan_from_json(const std::string& text);
std::string plan_to_json(const ExperimentPlan& plan);

/// FNV-1a of the canonical plan serialization; embedded in every output.
std::string plan_hash(const ExperimentPlan& plan);

struct SurveyDiagnostics {
  CemDiagnostics cem;
  double sigmoid_residual = 0.0;
  std::size_t score_count = 0;
};

/// Fit the score-to-probability mapping from labeled training snapshots:
/// collect HD scores as the sample set, estimate pi from label frequencies,
/// then run the constrained EM and the sigmoid fit.
SdMapping survey_fit(const SnapshotBatch& batch, std::span<const int> snapshot_indices,
                     int gmm_components, std::uint64_t seed, double cem_eps = 1e-3,
                     int cem_max_iter = 200, SurveyDiagnostics* diag = nullptr);

struct ScoreHistogram {
  std::vector<double> edges;  // bin edges, size bins+1
  std::vector<long long> los;
  std::vector<long long> nlos;
};

struct RunResult {
  std::map<std::string, ErrorSummary> errors;           // by method name
  std::map<std::string, long long> fallback_counts;     // degraded estimates per method
  std::optional<DetectionSummary> hd_detection;
  std::optional<DetectionSummary> sd_detection;
  std::vector<SdMapping> fold_mappings;
  ScoreHistogram score_histogram;                        // HD scores by truth class
  int refine_converged = 0;                              // snapshots meeting eps within t_max
  int refine_total = 0;
  std::string plan_json;
  std::string hash;
  std::string version;
};

RunResult run(const ExperimentPlan& plan);

std::string run_result_to_json(const RunResult& result);

/// Deterministic fold assignment: indices shuffled under the seed, then
/// dealt round-robin. Returns fold id per snapshot.
std::vector<int> fold_assignment(std::size_t count, int folds, std::uint64_t seed);

}  // namespace cdand
