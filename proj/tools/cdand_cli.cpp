// Batch front end: scenario generation, experiment runs, survey fitting, and
// figure-data export. Exit codes: 0 success, 2 usage, 3 data, 4 numeric.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdand/batch_io.hpp"
#include "cdand/config.hpp"
#include "cdand/errors.hpp"
#include "cdand/pipeline.hpp"
#include "cdand/report.hpp"
#include "cdand/version.hpp"

namespace fs = std::filesystem;
using namespace cdand;

namespace {

struct PlanFlags {
  std::string config_path;
  std::string preset;
  std::string data;
  std::optional<int> drops;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::optional<double> lambda;
  std::optional<double> re_ratio;
  std::optional<double> rs_ratio;
  std::optional<int> gmm_k;
  std::optional<double> eps;
  std::optional<int> t_max;
  std::optional<std::vector<std::string>> methods;
  std::optional<int> threads;
};

void add_plan_flags(CLI::App* cmd, PlanFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Plan file (TOML or JSON)");
  cmd->add_option("--preset", flags.preset,
                  "Scenario preset: inf-sh-fr1, inf-sh-fr2, inf-dh-fr1, inf-dh-fr2");
  cmd->add_option("--data", flags.data, "Measurement file to ingest (csv or json)");
  cmd->add_option("--drops", flags.drops, "UE realizations to generate");
  cmd->add_option("--seed", flags.seed, "Master seed");
  cmd->add_option("--folds", flags.folds, "Cross-validation folds");
  cmd->add_option("--lambda", flags.lambda, "Adaptive threshold scale");
  cmd->add_option("--re-ratio", flags.re_ratio, "Residual-error retained fraction");
  cmd->add_option("--rs-ratio", flags.rs_ratio, "Range-sum retained fraction");
  cmd->add_option("--K", flags.gmm_k, "Mixture components for the SD mapping");
  cmd->add_option("--eps", flags.eps, "Refinement convergence threshold");
  cmd->add_option("--t-max", flags.t_max, "Refinement iteration cap");
  cmd->add_option("--methods", flags.methods, "Methods to evaluate (or 'all')");
  cmd->add_option("--threads", flags.threads, "Worker thread cap");
}

// Assemble the plan JSON from an optional config file plus flag overrides.
ExperimentPlan resolve_plan(const PlanFlags& flags) {
  nlohmann::json doc = nlohmann::json::object();
  if (!flags.config_path.empty())
    doc = nlohmann::json::parse(plan_text_to_json(read_text_file(flags.config_path)));
  if (!flags.preset.empty()) doc["preset"] = flags.preset;
  if (!flags.data.empty()) doc["data"] = flags.data;
  if (flags.drops) doc["drops"] = *flags.drops;
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.folds) doc["folds"] = *flags.folds;
  if (flags.lambda) doc["lambda"] = *flags.lambda;
  if (flags.re_ratio) doc["re_ratio"] = *flags.re_ratio;
  if (flags.rs_ratio) doc["rs_ratio"] = *flags.rs_ratio;
  if (flags.gmm_k) doc["K"] = *flags.gmm_k;
  if (flags.eps) doc["eps"] = *flags.eps;
  if (flags.t_max) doc["t_max"] = *flags.t_max;
  if (flags.threads) doc["threads"] = *flags.threads;
  if (flags.methods) {
    if (flags.methods->size() == 1 && flags.methods->front() == "all") doc["methods"] = "all";
    else doc["methods"] = *flags.methods;
  }
  return plan_from_json(doc.dump());
}

int run_command(const PlanFlags& flags, const std::string& output_dir) {
  const ExperimentPlan plan = resolve_plan(flags);
  const RunResult result = run(plan);
  write_run_outputs(result, output_dir);
  std::cout << "run complete: " << output_dir << " (plan " << result.hash << ")\n";
  return 0;
}

int generate_command(const PlanFlags& flags, const std::string& output_dir) {
  ExperimentPlan plan = resolve_plan(flags);
  if (!plan.scenario) throw InvalidConfig("generate: a preset or scenario is required");
  const SnapshotBatch batch = generate(*plan.scenario);
  fs::create_directories(output_dir);
  const std::string provenance =
      "plan_hash=" + plan_hash(plan) + " seed=" + std::to_string(plan.scenario->seed);
  write_batch_csv_file(batch, (fs::path(output_dir) / "batch.csv").string(), provenance);
  write_text_file_atomic((fs::path(output_dir) / "config.json").string(), plan_to_json(plan));
  std::cout << "generated " << batch.snapshots.size() << " snapshots in " << output_dir << "\n";
  return 0;
}

int fit_survey_command(const PlanFlags& flags, const std::string& output_dir) {
  const ExperimentPlan plan = resolve_plan(flags);
  const SnapshotBatch batch =
      plan.scenario ? generate(*plan.scenario) : read_batch_file(*plan.data_path);
  std::vector<int> idx(batch.snapshots.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  SurveyDiagnostics diag;
  const SdMapping mapping = survey_fit(batch, idx, plan.gmm_components, plan.seed, plan.cem_eps,
                                       plan.cem_max_iter, &diag);
  fs::create_directories(output_dir);
  write_text_file_atomic((fs::path(output_dir) / "sd_mapping.json").string(),
                         sd_mapping_to_json(mapping));
  std::cout << "fitted SD mapping from " << diag.score_count << " scores ("
            << diag.cem.iterations << " CEM iterations, residual " << diag.sigmoid_residual
            << ")\n";
  return 0;
}

int report_command(const PlanFlags& flags, const std::string& run_json, int mmd_orders,
                   int mmd_n_min, const std::string& output_dir) {
  bool did_something = false;
  if (!run_json.empty()) {
    const nlohmann::json doc = nlohmann::json::parse(read_text_file(run_json));
    // re-emit the figure CSVs stored in a run result
    RunResult result;
    result.hash = doc.value("plan_hash", "unknown");
    result.version = doc.value("version", kVersion);
    result.plan_json = doc.at("plan").dump(2);
    for (auto it = doc.at("errors").begin(); it != doc.at("errors").end(); ++it) {
      ErrorSummary s;
      s.mean = it.value()["mean"].get<double>();
      s.stddev = it.value()["std"].get<double>();
      s.median = it.value()["median"].get<double>();
      s.p95 = it.value()["p95"].get<double>();
      s.cdf = it.value()["cdf"].get<std::vector<double>>();
      result.errors[it.key()] = std::move(s);
    }
    auto load_detection = [&](const char* key) -> std::optional<DetectionSummary> {
      if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
      const auto& d = doc[key];
      DetectionSummary s;
      s.recall = d["recall"].is_null() ? 0.0 : d["recall"].get<double>();
      s.precision = d["precision"].is_null() ? 0.0 : d["precision"].get<double>();
      s.accuracy = d["accuracy"].is_null() ? 0.0 : d["accuracy"].get<double>();
      if (!d["auc"].is_null()) s.auc = d["auc"].get<double>();
      s.confusion = {d["confusion"]["tp"].get<long long>(), d["confusion"]["fp"].get<long long>(),
                     d["confusion"]["tn"].get<long long>(), d["confusion"]["fn"].get<long long>()};
      for (const auto& p : d["roc"])
        s.roc.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      return s;
    };
    result.hd_detection = load_detection("hd_detection");
    result.sd_detection = load_detection("sd_detection");
    if (doc.contains("score_histogram")) {
      result.score_histogram.edges = doc["score_histogram"]["edges"].get<std::vector<double>>();
      result.score_histogram.los = doc["score_histogram"]["los"].get<std::vector<long long>>();
      result.score_histogram.nlos = doc["score_histogram"]["nlos"].get<std::vector<long long>>();
    }
    write_run_outputs(result, output_dir);
    did_something = true;
  }
  if (mmd_orders > 0) {
    const ExperimentPlan plan = resolve_plan(flags);
    const SnapshotBatch batch =
        plan.scenario ? generate(*plan.scenario) : read_batch_file(*plan.data_path);
    const std::string provenance =
        "plan_hash=" + plan_hash(plan) + " seed=" + std::to_string(plan.seed);
    fs::create_directories(output_dir);
    write_text_file_atomic(
        (fs::path(output_dir) / "mmd_curve.csv").string(),
        mmd_curve_csv(batch, mmd_orders, mmd_n_min, plan.seed, plan.threads, provenance));
    did_something = true;
  }
  if (!did_something) throw InvalidConfig("report: nothing to do; pass --run or --mmd-orders");
  std::cout << "report written to " << output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snapshot NLoS detection and robust positioning toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  PlanFlags flags;
  std::string output_dir = "out";
  std::string run_json;
  int mmd_orders = 0;
  int mmd_n_min = 5;

  CLI::App* gen = app.add_subcommand("generate", "Generate a synthetic measurement batch");
  add_plan_flags(gen, flags);
  gen->add_option("-o,--output", output_dir, "Output directory");

  CLI::App* runc = app.add_subcommand("run", "Run the detection and positioning experiment");
  add_plan_flags(runc, flags);
  runc->add_option("-o,--output", output_dir, "Output directory");

  CLI::App* fit = app.add_subcommand("fit-survey", "Fit the SD mapping from labeled data");
  add_plan_flags(fit, flags);
  fit->add_option("-o,--output", output_dir, "Output directory");

  CLI::App* rep = app.add_subcommand("report", "Emit figure data from a run or a batch");
  add_plan_flags(rep, flags);
  rep->add_option("--run", run_json, "run_result.json to re-emit figure CSVs from");
  rep->add_option("--mmd-orders", mmd_orders, "Random insertion orders for the MMD curve");
  rep->add_option("--mmd-n-min", mmd_n_min, "First ensemble size of the MMD curve");
  rep->add_option("-o,--output", output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return generate_command(flags, output_dir);
    if (runc->parsed()) return run_command(flags, output_dir);
    if (fit->parsed()) return fit_survey_command(flags, output_dir);
    if (rep->parsed()) return report_command(flags, run_json, mmd_orders, mmd_n_min, output_dir);
  } catch (const ParseError& e) {
    std::cerr << "error:data:" << e.what() << "\n";
    return 3;
  } catch (const SchemaMismatch& e) {
    std::cerr << "error:data:" << e.what() << "\n";
    return 3;
  } catch (const InvalidConfig& e) {
    std::cerr << "error:data:" << e.what() << "\n";
    return 3;
  } catch (const InsufficientLabels& e) {
    std::cerr << "error:data:" << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error:numeric:" << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error:data:" << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error:internal:" << e.what() << "\n";
    return 4;
  }
  return 2;
}
