#include "cdand/report.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "cdand/batch_io.hpp"
#include "cdand/parallel.hpp"

namespace cdand {

namespace {

std::string header_line(const std::string& provenance) {
  return "# " + provenance + "\n";
}

}  // namespace

std::string cdf_csv(const ErrorSummary& summary, const std::string& provenance) {
  std::ostringstream out;
  out << header_line(provenance) << "error_m,cdf\n";
  const std::size_t n = summary.cdf.size();
  for (std::size_t i = 0; i < n; ++i)
    out << format_double(summary.cdf[i]) << ','
        << format_double(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
  return out.str();
}

std::string roc_csv(const DetectionSummary& detection, const std::string& provenance) {
  std::ostringstream out;
  out << header_line(provenance) << "fpr,tpr,threshold\n";
  for (const RocPoint& p : detection.roc)
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
        << format_double(p.threshold) << "\n";
  return out.str();
}

std::string confusion_csv(const RunResult& result, const std::string& provenance) {
  std::ostringstream out;
  out << header_line(provenance) << "mode,tp,fp,tn,fn,recall,precision,accuracy,auc\n";
  auto row = [&](const char* mode, const DetectionSummary& d) {
    out << mode << ',' << d.confusion.tp << ',' << d.confusion.fp << ',' << d.confusion.tn << ','
        << d.confusion.fn << ',' << format_double(d.recall) << ',' << format_double(d.precision)
        << ',' << format_double(d.accuracy) << ','
        << (d.auc ? format_double(*d.auc) : std::string("nan")) << "\n";
  };
  if (result.hd_detection) row("hd", *result.hd_detection);
  if (result.sd_detection) row("sd", *result.sd_detection);
  return out.str();
}

std::string score_histogram_csv(const ScoreHistogram& hist, const std::string& provenance) {
  std::ostringstream out;
  out << header_line(provenance) << "bin_lo,bin_hi,los_count,nlos_count\n";
  for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b)
    out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1]) << ','
        << hist.los[b] << ',' << hist.nlos[b] << "\n";
  return out.str();
}

void write_run_outputs(const RunResult& result, const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const std::string provenance = "plan_hash=" + result.hash + " version=" + result.version;

  write_text_file_atomic((fs::path(output_dir) / "run_result.json").string(),
                         run_result_to_json(result));
  for (const auto& [name, summary] : result.errors)
    write_text_file_atomic((fs::path(output_dir) / ("cdf_" + name + ".csv")).string(),
                           cdf_csv(summary, provenance));
  if (result.hd_detection)
    write_text_file_atomic((fs::path(output_dir) / "roc_hd.csv").string(),
                           roc_csv(*result.hd_detection, provenance));
  if (result.sd_detection)
    write_text_file_atomic((fs::path(output_dir) / "roc_sd.csv").string(),
                           roc_csv(*result.sd_detection, provenance));
  if (result.hd_detection || result.sd_detection)
    write_text_file_atomic((fs::path(output_dir) / "confusion.csv").string(),
                           confusion_csv(result, provenance));
  if (!result.score_histogram.edges.empty())
    write_text_file_atomic((fs::path(output_dir) / "score_hist.csv").string(),
                           score_histogram_csv(result.score_histogram, provenance));
}

std::string mmd_curve_csv(const SnapshotBatch& batch, int orders, int n_min, std::uint64_t seed,
                          int threads, const std::string& provenance) {
  const int n = batch.config.gnb_count;
  const std::size_t snapshots = batch.snapshots.size();
  const std::size_t total = snapshots * static_cast<std::size_t>(orders);

  std::vector<std::vector<double>> curves(total);
  parallel_for(total, threads, [&](std::size_t task) {
    const std::size_t snap_idx = task / orders;
    const std::size_t order_idx = task % orders;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed + 0x51ab1e * order_idx + 7919 * snap_idx);
    std::shuffle(order.begin(), order.end(), rng);
    const auto curve = mmd_stabilization_curve(batch.snapshots[snap_idx], order, n_min);
    curves[task].reserve(curve.size());
    for (const auto& [count, value] : curve) curves[task].push_back(value);
  });

  std::ostringstream out;
  out << header_line(provenance) << "N,mmd_sq_median\n";
  const std::size_t steps = curves.empty() ? 0 : curves.front().size();
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<double> column;
    column.reserve(total);
    for (const auto& c : curves) column.push_back(c[s]);
    out << (n_min + static_cast<int>(s)) << ',' << format_double(scalar_median(column)) << "\n";
  }
  return out.str();
}

}  // namespace cdand
