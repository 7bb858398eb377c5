// Python bindings for the main operations: scenario generation, ensemble
// construction, NLoS scoring, SD mapping, positioning, and full runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdand/batch_io.hpp"
#include "cdand/config.hpp"
#include "cdand/pipeline.hpp"
#include "cdand/refine.hpp"
#include "cdand/version.hpp"

namespace py = pybind11;
using namespace cdand;

namespace {

Snapshot snapshot_from_parts(const std::vector<std::pair<double, double>>& gnbs,
                             const std::vector<double>& ranges,
                             const std::optional<std::vector<int>>& labels,
                             const std::optional<std::pair<double, double>>& truth) {
  Snapshot s;
  for (const auto& [x, y] : gnbs) s.gnb_positions.push_back({x, y});
  s.ranges = ranges;
  if (labels) {
    s.truth_labels.emplace();
    for (int v : *labels) s.truth_labels->push_back(v ? LinkState::nlos : LinkState::los);
  }
  if (truth) s.truth_position = Point2{truth->first, truth->second};
  s.validate();
  return s;
}

py::dict score_dict(const Snapshot& snap, double lambda) {
  const PelEnsemble ensemble = build_ensemble(snap);
  const ScoreReport report = score_snapshot(ensemble, snap);
  const HardDecision hd = hard_decide(report, lambda);
  py::list scores, labels, scored;
  for (std::size_t g = 0; g < snap.size(); ++g) {
    scores.append(report.gnbs[g].rho);
    scored.append(report.gnbs[g].scored);
    labels.append(static_cast<int>(hd.labels[g]));
  }
  py::dict out;
  out["scores"] = scores;
  out["scored"] = scored;
  out["labels"] = labels;
  out["eta"] = hd.eta;
  out["pseudo_location"] = py::make_tuple(report.pseudo_location.x, report.pseudo_location.y);
  out["valid_pels"] = ensemble.valid_count();
  return out;
}

}  // namespace

PYBIND11_MODULE(cdand, m) {
  m.doc() = "Subset-multilateration NLoS detection and robust positioning";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "CdandError");

  py::class_<Snapshot>(m, "Snapshot")
      .def(py::init(&snapshot_from_parts), py::arg("gnb_positions"), py::arg("ranges"),
           py::arg("labels") = std::nullopt, py::arg("truth_position") = std::nullopt)
      .def_property_readonly("n", &Snapshot::size)
      .def_property_readonly("ranges", [](const Snapshot& s) { return s.ranges; })
      .def_property_readonly("gnb_positions", [](const Snapshot& s) {
        std::vector<std::pair<double, double>> out;
        for (const Point2& z : s.gnb_positions) out.emplace_back(z.x, z.y);
        return out;
      });

  py::class_<SnapshotBatch>(m, "SnapshotBatch")
      .def("__len__", [](const SnapshotBatch& b) { return b.snapshots.size(); })
      .def("snapshot", [](const SnapshotBatch& b, std::size_t i) { return b.snapshots.at(i); })
      .def("labels",
           [](const SnapshotBatch& b, std::size_t i) {
             std::vector<int> out;
             if (b.snapshots.at(i).truth_labels)
               for (LinkState s : *b.snapshots.at(i).truth_labels)
                 out.push_back(static_cast<int>(s));
             return out;
           })
      .def("truth_position",
           [](const SnapshotBatch& b, std::size_t i) {
             const auto& p = b.snapshots.at(i).truth_position;
             return p ? std::optional<std::pair<double, double>>({p->x, p->y}) : std::nullopt;
           })
      .def("to_csv", [](const SnapshotBatch& b) { return batch_to_csv(b); })
      .def("to_json", [](const SnapshotBatch& b) { return batch_to_json(b); });

  m.def("preset_names", &preset_names);
  m.def(
      "generate_batch",
      [](const std::string& preset, int drops, std::uint64_t seed) {
        ScenarioConfig cfg = preset_by_name(preset).scenario;
        cfg.drops = drops;
        cfg.seed = seed;
        return generate(cfg);
      },
      py::arg("preset"), py::arg("drops"), py::arg("seed") = 0);
  m.def("batch_from_csv", &batch_from_csv);
  m.def("batch_from_json", &batch_from_json);

  m.def("enumerate_subsets", &enumerate_subsets, py::arg("n"), py::arg("m") = 3);
  m.def(
      "multilaterate",
      [](const std::vector<std::pair<double, double>>& anchors, const std::vector<double>& ranges) {
        std::vector<Point2> pts;
        for (const auto& [x, y] : anchors) pts.push_back({x, y});
        const Point2 p = multilaterate(pts, ranges);
        return std::make_pair(p.x, p.y);
      },
      py::arg("anchors"), py::arg("ranges"));

  m.def("score_snapshot", &score_dict, py::arg("snapshot"), py::arg("lambda_") = 1.0,
        "Ensemble scores, adaptive threshold, and hard labels for one snapshot");

  m.def(
      "mmd_squared",
      [](const std::vector<std::pair<double, double>>& a,
         const std::vector<std::pair<double, double>>& b) {
        std::vector<Point2> pa, pb;
        for (const auto& [x, y] : a) pa.push_back({x, y});
        for (const auto& [x, y] : b) pb.push_back({x, y});
        return mmd_squared(pa, pb);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "fit_survey",
      [](const SnapshotBatch& batch, int k, std::uint64_t seed) {
        std::vector<int> idx(batch.snapshots.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        return sd_mapping_to_json(survey_fit(batch, idx, k, seed));
      },
      py::arg("batch"), py::arg("k") = 8, py::arg("seed") = 0,
      "Fit the score-to-probability mapping; returns its JSON document");
  m.def(
      "evaluate_sd",
      [](const std::string& mapping_json, double rho) {
        return evaluate_sd(sd_mapping_from_json(mapping_json).phi, rho);
      },
      py::arg("mapping_json"), py::arg("rho"));

  m.def(
      "run_plan",
      [](const std::string& plan_text) {
        return run_result_to_json(run(plan_from_json(plan_text_to_json(plan_text))));
      },
      py::arg("plan"), "Run a TOML or JSON experiment plan; returns the result JSON");
}
