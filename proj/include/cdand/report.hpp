#pragma once

#include <string>
#include <vector>

#include "cdand/pipeline.hpp"

namespace cdand {

/// Figure-data emitters. Every file starts with a comment line carrying the
/// plan hash and seed so outputs can be traced back to their run.
void write_run_outputs(const RunResult& result, const std::string& output_dir);

std::string cdf_csv(const ErrorSummary& summary, const std::string& provenance);
std::string roc_csv(const DetectionSummary& detection, const std::string& provenance);
std::string confusion_csv(const RunResult& result, const std::string& provenance);
std::string score_histogram_csv(const ScoreHistogram& hist, const std::string& provenance);

/// MMD stabilization curves: medians over the given snapshots and random gNB
/// insertion orders, one row per N.
std::string mmd_curve_csv(const SnapshotBatch& batch, int orders, int n_min, std::uint64_t seed,
                          int threads, const std::string& provenance);

}  // namespace cdand
