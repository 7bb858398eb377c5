#include "cdand/batch_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cdand/errors.hpp"

namespace cdand {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string batch_to_csv(const SnapshotBatch& batch, const std::string& header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  const bool has_labels = !batch.snapshots.empty() &&
                          std::all_of(batch.snapshots.begin(), batch.snapshots.end(),
                                      [](const Snapshot& s) { return s.truth_labels.has_value(); });
  const bool has_truth = !batch.snapshots.empty() &&
                         std::all_of(batch.snapshots.begin(), batch.snapshots.end(),
                                     [](const Snapshot& s) { return s.truth_position.has_value(); });
  out << "snapshot_id,gnb_id,z_x,z_y,range_m";
  if (has_labels) out << ",label";
  if (has_truth) out << ",true_x,true_y";
  out << "\n";
  for (std::size_t s = 0; s < batch.snapshots.size(); ++s) {
    const Snapshot& snap = batch.snapshots[s];
    for (std::size_t g = 0; g < snap.size(); ++g) {
      out << s << ',' << g << ',' << format_double(snap.gnb_positions[g].x) << ','
          << format_double(snap.gnb_positions[g].y) << ',' << format_double(snap.ranges[g]);
      if (has_labels) out << ',' << static_cast<int>((*snap.truth_labels)[g]);
      if (has_truth)
        out << ',' << format_double(snap.truth_position->x) << ','
            << format_double(snap.truth_position->y);
      out << "\n";
    }
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& cell, int line_no, const std::string& field) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("csv line " + std::to_string(line_no) + ": bad " + field + " value '" +
                     cell + "'");
  return v;
}

long parse_long(const std::string& cell, int line_no, const std::string& field) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ParseError("csv line " + std::to_string(line_no) + ": bad " + field + " value '" +
                     cell + "'");
  return v;
}

}  // namespace

SnapshotBatch batch_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  std::map<std::string, int> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    for (std::size_t i = 0; i < cells.size(); ++i) columns[cells[i]] = static_cast<int>(i);
    break;
  }
  for (const char* required : {"snapshot_id", "gnb_id", "z_x", "z_y", "range_m"})
    if (!columns.count(required))
      throw SchemaMismatch(std::string("csv header missing column ") + required);
  const bool has_label = columns.count("label");
  const bool has_truth = columns.count("true_x") && columns.count("true_y");

  struct Row {
    long gnb;
    Point2 z;
    double range;
    int label;
    Point2 truth;
    int line;
  };
  std::map<long, std::vector<Row>> by_snapshot;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    auto cell = [&](const char* name) -> const std::string& {
      const int idx = columns.at(name);
      if (idx >= static_cast<int>(cells.size()))
        throw ParseError("csv line " + std::to_string(line_no) + ": missing column " + name);
      return cells[idx];
    };
    Row row;
    row.line = line_no;
    const long snap_id = parse_long(cell("snapshot_id"), line_no, "snapshot_id");
    row.gnb = parse_long(cell("gnb_id"), line_no, "gnb_id");
    row.z = {parse_double(cell("z_x"), line_no, "z_x"), parse_double(cell("z_y"), line_no, "z_y")};
    row.range = parse_double(cell("range_m"), line_no, "range_m");
    row.label = has_label ? static_cast<int>(parse_long(cell("label"), line_no, "label")) : -1;
    if (has_label && row.label != 0 && row.label != 1)
      throw ParseError("csv line " + std::to_string(line_no) + ": label must be 0 or 1");
    if (has_truth)
      row.truth = {parse_double(cell("true_x"), line_no, "true_x"),
                   parse_double(cell("true_y"), line_no, "true_y")};
    by_snapshot[snap_id].push_back(row);
  }
  if (by_snapshot.empty()) throw SchemaMismatch("csv: no data rows");

  SnapshotBatch batch;
  batch.config.preset_name = "ingested";
  batch.config.layout = LayoutKind::explicit_coords;
  std::size_t expected_n = by_snapshot.begin()->second.size();
  for (auto& [snap_id, rows] : by_snapshot) {
    if (rows.size() != expected_n)
      throw SchemaMismatch("snapshot " + std::to_string(snap_id) + ": " +
                           std::to_string(rows.size()) + " gNB rows, expected " +
                           std::to_string(expected_n));
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.gnb < b.gnb; });
    Snapshot snap;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].gnb != static_cast<long>(i))
        throw SchemaMismatch("snapshot " + std::to_string(snap_id) +
                             ": gnb_id values must cover 0..N-1");
      snap.gnb_positions.push_back(rows[i].z);
      snap.ranges.push_back(rows[i].range);
    }
    if (has_label) {
      snap.truth_labels.emplace();
      for (const Row& r : rows)
        snap.truth_labels->push_back(r.label == 1 ? LinkState::nlos : LinkState::los);
    }
    if (has_truth) snap.truth_position = rows.front().truth;
    try {
      snap.validate();
    } catch (const InvalidConfig& e) {
      throw SchemaMismatch("snapshot " + std::to_string(snap_id) + ": " + e.what());
    }
    batch.snapshots.push_back(std::move(snap));
  }
  batch.config.gnb_count = static_cast<int>(expected_n);
  batch.config.drops = static_cast<int>(batch.snapshots.size());
  batch.config.explicit_gnbs = batch.snapshots.front().gnb_positions;
  return batch;
}

std::string batch_to_json(const SnapshotBatch& batch) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Snapshot& snap : batch.snapshots) {
    nlohmann::json j;
    nlohmann::json pos = nlohmann::json::array();
    for (const Point2& z : snap.gnb_positions) pos.push_back({z.x, z.y});
    j["gnb_positions"] = std::move(pos);
    j["ranges"] = snap.ranges;
    if (snap.truth_labels) {
      std::vector<int> labels;
      for (LinkState s : *snap.truth_labels) labels.push_back(static_cast<int>(s));
      j["labels"] = labels;
    }
    if (snap.truth_position)
      j["true_position"] = {snap.truth_position->x, snap.truth_position->y};
    if (snap.rtt) j["rtt"] = *snap.rtt;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

SnapshotBatch batch_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json batch: ") + e.what());
  }
  if (!arr.is_array() || arr.empty()) throw SchemaMismatch("json batch: expected a non-empty array");
  SnapshotBatch batch;
  batch.config.preset_name = "ingested";
  batch.config.layout = LayoutKind::explicit_coords;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const nlohmann::json& j = arr[i];
    Snapshot snap;
    try {
      for (const auto& z : j.at("gnb_positions"))
        snap.gnb_positions.push_back({z.at(0).get<double>(), z.at(1).get<double>()});
      snap.ranges = j.at("ranges").get<std::vector<double>>();
      if (j.contains("labels")) {
        snap.truth_labels.emplace();
        for (int v : j.at("labels").get<std::vector<int>>())
          snap.truth_labels->push_back(v == 1 ? LinkState::nlos : LinkState::los);
      }
      if (j.contains("true_position"))
        snap.truth_position =
            Point2{j.at("true_position").at(0).get<double>(), j.at("true_position").at(1).get<double>()};
      if (j.contains("rtt")) snap.rtt = j.at("rtt").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaMismatch("snapshot " + std::to_string(i) + ": " + e.what());
    }
    try {
      snap.validate();
    } catch (const InvalidConfig& e) {
      throw SchemaMismatch("snapshot " + std::to_string(i) + ": " + e.what());
    }
    batch.snapshots.push_back(std::move(snap));
  }
  batch.config.gnb_count = static_cast<int>(batch.snapshots.front().size());
  batch.config.drops = static_cast<int>(batch.snapshots.size());
  batch.config.explicit_gnbs = batch.snapshots.front().gnb_positions;
  return batch;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

SnapshotBatch read_batch_file(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return batch_from_json(text);
  return batch_from_csv(text);
}

void write_batch_csv_file(const SnapshotBatch& batch, const std::string& path,
                          const std::string& header_comment) {
  write_text_file_atomic(path, batch_to_csv(batch, header_comment));
}

void write_batch_json_file(const SnapshotBatch& batch, const std::string& path) {
  write_text_file_atomic(path, batch_to_json(batch));
}

}  // namespace cdand
