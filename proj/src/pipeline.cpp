#include "cdand/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cdand/batch_io.hpp"
#include "cdand/errors.hpp"
#include "cdand/parallel.hpp"
#include "cdand/version.hpp"

namespace cdand {

namespace {

using nlohmann::json;

bool needs_sd(const std::vector<Method>& methods) {
  for (Method m : methods)
    if (m == Method::ls_nd_sd || m == Method::cda_nd_sd || m == Method::cda_nd_rers_sd)
      return true;
  return false;
}

BiasFamily bias_family_from_name(const std::string& name) {
  if (name == "truncated-gaussian") return BiasFamily::truncated_gaussian;
  if (name == "exponential") return BiasFamily::exponential;
  if (name == "lognormal") return BiasFamily::lognormal;
  throw InvalidConfig("unknown bias family: " + name);
}

std::string bias_family_name(BiasFamily f) {
  switch (f) {
    case BiasFamily::truncated_gaussian: return "truncated-gaussian";
    case BiasFamily::exponential: return "exponential";
    case BiasFamily::lognormal: return "lognormal";
  }
  return "unknown";
}

json summary_to_json(const ErrorSummary& s) {
  return json{{"mean", s.mean},
              {"std", s.stddev},
              {"median", s.median},
              {"p95", s.p95},
              {"cdf", s.cdf}};
}

json detection_to_json(const DetectionSummary& d) {
  json roc = json::array();
  for (const RocPoint& p : d.roc) roc.push_back({p.fpr, p.tpr, p.threshold});
  json j{{"recall", d.recall},
         {"precision", d.precision},
         {"accuracy", d.accuracy},
         {"confusion", {{"tp", d.confusion.tp}, {"fp", d.confusion.fp},
                        {"tn", d.confusion.tn}, {"fn", d.confusion.fn}}},
         {"roc", std::move(roc)}};
  if (d.auc) j["auc"] = *d.auc;
  else j["auc"] = nullptr;
  return j;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (scenario.has_value() == data_path.has_value())
    throw InvalidConfig("plan: exactly one of scenario or data path must be set");
  if (scenario) scenario->validate();
  if (!(lambda > 0.0)) throw InvalidConfig("plan: lambda must be positive");
  if (methods.empty()) throw InvalidConfig("plan: no methods requested");
  for (const FilterConfig& f : {filter_plain, filter_hd, filter_sd})
    if (!(f.re_ratio > 0.0) || f.re_ratio > 1.0 || !(f.rs_ratio > 0.0) || f.rs_ratio > 1.0)
      throw InvalidConfig("plan: filter ratios must lie in (0,1]");
  if (gmm_components < 2) throw InvalidConfig("plan: K must be >= 2");
  if (!(cem_eps > 0.0) || !(refine_eps > 0.0)) throw InvalidConfig("plan: eps must be positive");
  if (cem_max_iter < 1 || refine_t_max < 1) throw InvalidConfig("plan: iteration caps must be >= 1");
  if (needs_sd(methods) && folds < 2)
    throw InvalidConfig("plan: SD methods need at least 2 folds for survey fitting");
}

ExperimentPlan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  if (!j.is_object()) throw SchemaMismatch("plan: expected an object");

  static const std::vector<std::string> known = {
      "preset",     "data",       "drops",      "seed",     "lambda",     "re_ratio",
      "rs_ratio",   "K",          "cem_eps",    "cem_max_iter", "eps",    "t_max",
      "folds",      "methods",    "threads",    "gnb_count", "width",    "height",
      "nlos_prob",  "noise_std",  "bias_mean",  "bias_std", "bias_family", "layout",
      "nlos_model", "disk_count", "disk_radius"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw SchemaMismatch("plan: unknown key '" + it.key() + "'");

  ExperimentPlan plan;
  if (j.contains("preset")) {
    plan.preset = j["preset"].get<std::string>();
    const Preset& p = preset_by_name(plan.preset);
    plan.scenario = p.scenario;
    plan.lambda = p.lambda;
    plan.filter_plain = p.rers_plain;
    plan.filter_hd = p.rers_hd;
    plan.filter_sd = p.rers_sd;
  }
  if (j.contains("data")) {
    plan.data_path = j["data"].get<std::string>();
    plan.scenario.reset();
  }

  try {
    if (plan.scenario) {
      ScenarioConfig& sc = *plan.scenario;
      if (j.contains("drops")) sc.drops = j["drops"].get<int>();
      if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("gnb_count")) sc.gnb_count = j["gnb_count"].get<int>();
      if (j.contains("width")) sc.width = j["width"].get<double>();
      if (j.contains("height")) sc.height = j["height"].get<double>();
      if (j.contains("nlos_prob")) sc.nlos_prob = j["nlos_prob"].get<double>();
      if (j.contains("noise_std"))
        sc.noise_los = NoiseSpec{{{1.0, j["noise_std"].get<double>()}}};
      if (j.contains("bias_mean")) sc.nlos_bias.mean = j["bias_mean"].get<double>();
      if (j.contains("bias_std")) sc.nlos_bias.stddev = j["bias_std"].get<double>();
      if (j.contains("bias_family"))
        sc.nlos_bias.family = bias_family_from_name(j["bias_family"].get<std::string>());
      if (j.contains("layout")) {
        const std::string l = j["layout"].get<std::string>();
        if (l == "grid") sc.layout = LayoutKind::grid;
        else if (l == "uniform-random") sc.layout = LayoutKind::uniform_random;
        else throw InvalidConfig("plan: unknown layout '" + l + "'");
      }
      if (j.contains("nlos_model")) {
        const std::string m = j["nlos_model"].get<std::string>();
        if (m == "iid") sc.nlos_model = NlosModel::iid;
        else if (m == "disks") sc.nlos_model = NlosModel::disks;
        else throw InvalidConfig("plan: unknown nlos model '" + m + "'");
      }
      if (j.contains("disk_count")) sc.disk_count = j["disk_count"].get<int>();
      if (j.contains("disk_radius")) sc.disk_radius = j["disk_radius"].get<double>();
    }
    if (j.contains("seed")) plan.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("lambda")) plan.lambda = j["lambda"].get<double>();
    if (j.contains("re_ratio")) {
      const double r = j["re_ratio"].get<double>();
      plan.filter_plain.re_ratio = plan.filter_hd.re_ratio = plan.filter_sd.re_ratio = r;
    }
    if (j.contains("rs_ratio")) {
      const double r = j["rs_ratio"].get<double>();
      plan.filter_plain.rs_ratio = plan.filter_hd.rs_ratio = plan.filter_sd.rs_ratio = r;
    }
    if (j.contains("K")) plan.gmm_components = j["K"].get<int>();
    if (j.contains("cem_eps")) plan.cem_eps = j["cem_eps"].get<double>();
    if (j.contains("cem_max_iter")) plan.cem_max_iter = j["cem_max_iter"].get<int>();
    if (j.contains("eps")) plan.refine_eps = j["eps"].get<double>();
    if (j.contains("t_max")) plan.refine_t_max = j["t_max"].get<int>();
    if (j.contains("folds")) plan.folds = j["folds"].get<int>();
    if (j.contains("threads")) plan.threads = j["threads"].get<int>();
    if (j.contains("methods")) {
      plan.methods.clear();
      if (j["methods"].is_string() && j["methods"].get<std::string>() == "all") {
        plan.methods = all_methods();
      } else {
        for (const auto& m : j["methods"]) plan.methods.push_back(method_from_name(m.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("plan: ") + e.what());
  }
  if (plan.methods.empty()) plan.methods = all_methods();
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["preset"] = plan.preset;
  if (plan.data_path) j["data"] = *plan.data_path;
  if (plan.scenario) {
    const ScenarioConfig& sc = *plan.scenario;
    json noise = json::array();
    for (const NoiseComponent& c : sc.noise_los.components) noise.push_back({c.weight, c.stddev});
    j["scenario"] = {{"width", sc.width},
                     {"height", sc.height},
                     {"gnb_count", sc.gnb_count},
                     {"nlos_prob", sc.nlos_prob},
                     {"noise_los", std::move(noise)},
                     {"bias_family", bias_family_name(sc.nlos_bias.family)},
                     {"bias_mean", sc.nlos_bias.mean},
                     {"bias_std", sc.nlos_bias.stddev},
                     {"layout", static_cast<int>(sc.layout)},
                     {"nlos_model", static_cast<int>(sc.nlos_model)},
                     {"disk_count", sc.disk_count},
                     {"disk_radius", sc.disk_radius},
                     {"seed", sc.seed},
                     {"drops", sc.drops}};
  }
  j["lambda"] = plan.lambda;
  j["filter_plain"] = {plan.filter_plain.re_ratio, plan.filter_plain.rs_ratio};
  j["filter_hd"] = {plan.filter_hd.re_ratio, plan.filter_hd.rs_ratio};
  j["filter_sd"] = {plan.filter_sd.re_ratio, plan.filter_sd.rs_ratio};
  j["K"] = plan.gmm_components;
  j["cem_eps"] = plan.cem_eps;
  j["cem_max_iter"] = plan.cem_max_iter;
  j["eps"] = plan.refine_eps;
  j["t_max"] = plan.refine_t_max;
  j["folds"] = plan.folds;
  json methods = json::array();
  for (Method m : plan.methods) methods.push_back(method_name(m));
  j["methods"] = std::move(methods);
  j["seed"] = plan.seed;
  return j.dump(2);
}

std::string plan_hash(const ExperimentPlan& plan) {
  const std::string canonical = plan_to_json(plan);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<int> fold_assignment(std::size_t count, int folds, std::uint64_t seed) {
  if (folds < 1) throw InvalidConfig("fold_assignment: folds must be >= 1");
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ 0xf01d5eedull);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(count, 0);
  for (std::size_t i = 0; i < count; ++i) fold_of[order[i]] = static_cast<int>(i % folds);
  return fold_of;
}

namespace {

struct SnapshotState {
  bool usable = false;
  PelEnsemble ensemble;
  ScoreReport report;
  HardDecision hd;
  std::vector<double> sd;  // filled when SD is requested
  bool refine_converged = false;
  bool sd_ready = false;
};

SdMapping survey_fit_from_states(const SnapshotBatch& batch, const std::vector<SnapshotState>& states,
                                 std::span<const int> indices, int gmm_components,
                                 std::uint64_t seed, double cem_eps, int cem_max_iter,
                                 SurveyDiagnostics* diag) {
  std::vector<double> samples;
  long long nlos = 0, total = 0;
  for (int idx : indices) {
    const Snapshot& snap = batch.snapshots[idx];
    if (!snap.truth_labels)
      throw InsufficientLabels("survey_fit: training snapshot " + std::to_string(idx) +
                               " lacks labels");
    if (!states[idx].usable) continue;
    for (const GnbScore& g : states[idx].report.gnbs)
      if (g.scored) samples.push_back(g.rho);
    for (LinkState s : *snap.truth_labels) {
      total++;
      if (s == LinkState::nlos) nlos++;
    }
  }
  if (total == 0 || nlos == 0 || nlos == total)
    throw InsufficientLabels("survey_fit: training labels must contain both classes");

  SurveyPrior prior;
  prior.samples = std::move(samples);
  prior.pi = static_cast<double>(nlos) / static_cast<double>(total);

  SdMapping mapping;
  mapping.pi = prior.pi;
  mapping.seed = seed;
  CemDiagnostics cem_diag;
  mapping.gmm = fit_cem(prior, gmm_components, seed, cem_eps, cem_max_iter, &cem_diag);
  double residual = 0.0;
  mapping.phi = fit_sigmoid(mapping.gmm, prior.samples, &residual);
  if (diag) {
    diag->cem = std::move(cem_diag);
    diag->sigmoid_residual = residual;
    diag->score_count = prior.samples.size();
  }
  return mapping;
}

}  // namespace

SdMapping survey_fit(const SnapshotBatch& batch, std::span<const int> snapshot_indices,
                     int gmm_components, std::uint64_t seed, double cem_eps, int cem_max_iter,
                     SurveyDiagnostics* diag) {
  std::vector<SnapshotState> states(batch.snapshots.size());
  for (int idx : snapshot_indices) {
    SnapshotState& st = states[idx];
    try {
      st.ensemble = build_ensemble(batch.snapshots[idx]);
      st.report = score_snapshot(st.ensemble, batch.snapshots[idx]);
      st.usable = true;
    } catch (const TooFewValidPels&) {
    }
  }
  std::vector<int> indices(snapshot_indices.begin(), snapshot_indices.end());
  return survey_fit_from_states(batch, states, indices, gmm_components, seed, cem_eps,
                                cem_max_iter, diag);
}

RunResult run(const ExperimentPlan& plan) {
  plan.validate();

  SnapshotBatch batch =
      plan.scenario ? generate(*plan.scenario) : read_batch_file(*plan.data_path);
  const std::size_t count = batch.snapshots.size();
  if (count == 0) throw InvalidConfig("run: empty snapshot batch");

  const bool want_sd = needs_sd(plan.methods);

  std::vector<SnapshotState> states(count);
  parallel_for(count, plan.threads, [&](std::size_t i) {
    SnapshotState& st = states[i];
    try {
      st.ensemble = build_ensemble(batch.snapshots[i]);
      st.report = score_snapshot(st.ensemble, batch.snapshots[i]);
      st.hd = hard_decide(st.report, plan.lambda);
      st.usable = true;
    } catch (const TooFewValidPels&) {
    }
  });

  RunResult result;

  if (want_sd) {
    const std::vector<int> fold_of = fold_assignment(count, plan.folds, plan.seed);
    result.fold_mappings.resize(plan.folds);
    for (int f = 0; f < plan.folds; ++f) {
      std::vector<int> train, eval;
      for (std::size_t i = 0; i < count; ++i) {
        if (!states[i].usable) continue;
        (fold_of[i] == f ? eval : train).push_back(static_cast<int>(i));
      }
      const SdMapping mapping = survey_fit_from_states(
          batch, states, train, plan.gmm_components, plan.seed, plan.cem_eps, plan.cem_max_iter,
          nullptr);
      result.fold_mappings[f] = mapping;

      parallel_for(eval.size(), plan.threads, [&](std::size_t k) {
        const int idx = eval[k];
        if (fold_of[idx] != f)
          throw std::logic_error("run: evaluation snapshot leaked into training fold");
        SnapshotState& st = states[idx];
        try {
          const RefineResult r =
              refine_scores(st.ensemble, batch.snapshots[idx], st.report, st.hd, mapping.phi,
                            plan.refine_eps, plan.refine_t_max);
          st.sd = r.sd;
          st.refine_converged = r.convergence_sum <= plan.refine_eps;
        } catch (const EmptyHdSet&) {
          st.sd = unrefined_sd(st.report, mapping.phi);
          st.refine_converged = true;  // nothing to iterate
        }
        st.sd_ready = true;
      });
    }
    for (const SnapshotState& st : states) {
      if (!st.usable) continue;
      result.refine_total++;
      if (st.refine_converged) result.refine_converged++;
    }
  }

  // positioning errors
  struct PerSnapshotErrors {
    std::vector<double> error;      // per method, NaN when not computed
    std::vector<std::uint8_t> fellback;
  };
  std::vector<PerSnapshotErrors> snap_errors(count);
  parallel_for(count, plan.threads, [&](std::size_t i) {
    PerSnapshotErrors& pe = snap_errors[i];
    pe.error.assign(plan.methods.size(), std::numeric_limits<double>::quiet_NaN());
    pe.fellback.assign(plan.methods.size(), 0);
    const SnapshotState& st = states[i];
    const Snapshot& snap = batch.snapshots[i];
    if (!st.usable || !snap.truth_position) return;
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      const Method method = plan.methods[m];
      EstimateArtifacts art;
      art.ensemble = &st.ensemble;
      art.hd = &st.hd;
      art.sd_values = st.sd_ready ? &st.sd : nullptr;
      art.filter = method == Method::cda_rers       ? plan.filter_plain
                   : method == Method::cda_nd_rers_sd ? plan.filter_sd
                                                      : plan.filter_hd;
      try {
        const PositionEstimate est = estimate(snap, method, art);
        pe.error[m] = distance(est.point, *snap.truth_position);
        pe.fellback[m] = est.fallback;
      } catch (const Error&) {
        // estimate unavailable for this snapshot; excluded from the stats
      }
    }
  });

  for (std::size_t m = 0; m < plan.methods.size(); ++m) {
    std::vector<double> errors;
    long long fallbacks = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (std::isnan(snap_errors[i].error[m])) continue;
      errors.push_back(snap_errors[i].error[m]);
      fallbacks += snap_errors[i].fellback[m];
    }
    const std::string name = method_name(plan.methods[m]);
    if (!errors.empty()) result.errors[name] = error_stats(errors);
    result.fallback_counts[name] = fallbacks;
  }

  // detection pooling over labeled snapshots
  std::vector<double> hd_scores, sd_scores;
  std::vector<LinkState> hd_pred, sd_pred, hd_truth, sd_truth;
  for (std::size_t i = 0; i < count; ++i) {
    const SnapshotState& st = states[i];
    const Snapshot& snap = batch.snapshots[i];
    if (!st.usable || !snap.truth_labels) continue;
    for (std::size_t g = 0; g < snap.size(); ++g) {
      if (!st.report.gnbs[g].scored) continue;
      hd_scores.push_back(st.report.gnbs[g].rho);
      hd_pred.push_back(st.hd.labels[g]);
      hd_truth.push_back((*snap.truth_labels)[g]);
      if (st.sd_ready) {
        sd_scores.push_back(st.sd[g]);
        sd_pred.push_back(st.sd[g] >= 0.5 ? LinkState::nlos : LinkState::los);
        sd_truth.push_back((*snap.truth_labels)[g]);
      }
    }
  }
  if (!hd_scores.empty()) {
    result.hd_detection = detection_metrics(hd_scores, hd_pred, hd_truth);
    // score histogram by truth class
    double lo = *std::min_element(hd_scores.begin(), hd_scores.end());
    double hi = *std::max_element(hd_scores.begin(), hd_scores.end());
    if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
    const int bins = 60;
    result.score_histogram.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b)
      result.score_histogram.edges[b] = lo + (hi - lo) * b / bins;
    result.score_histogram.los.assign(bins, 0);
    result.score_histogram.nlos.assign(bins, 0);
    for (std::size_t k = 0; k < hd_scores.size(); ++k) {
      int b = static_cast<int>((hd_scores[k] - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      (hd_truth[k] == LinkState::nlos ? result.score_histogram.nlos
                                      : result.score_histogram.los)[b]++;
    }
  }
  if (!sd_scores.empty())
    result.sd_detection = detection_metrics(sd_scores, sd_pred, sd_truth);

  result.plan_json = plan_to_json(plan);
  result.hash = plan_hash(plan);
  result.version = kVersion;
  return result;
}

std::string run_result_to_json(const RunResult& result) {
  json j;
  json errors = json::object();
  for (const auto& [name, summary] : result.errors) errors[name] = summary_to_json(summary);
  j["errors"] = std::move(errors);
  j["fallbacks"] = result.fallback_counts;
  j["hd_detection"] = result.hd_detection ? detection_to_json(*result.hd_detection) : json(nullptr);
  j["sd_detection"] = result.sd_detection ? detection_to_json(*result.sd_detection) : json(nullptr);
  json mappings = json::array();
  for (const SdMapping& m : result.fold_mappings)
    mappings.push_back(json::parse(sd_mapping_to_json(m)));
  j["fold_mappings"] = std::move(mappings);
  j["score_histogram"] = {{"edges", result.score_histogram.edges},
                          {"los", result.score_histogram.los},
                          {"nlos", result.score_histogram.nlos}};
  j["refine_converged"] = result.refine_converged;
  j["refine_total"] = result.refine_total;
  j["plan"] = json::parse(result.plan_json);
  j["plan_hash"] = result.hash;
  j["version"] = result.version;
  return j.dump(2);
}

}  // namespace cdand
