#pragma once

#include <string>

#include "cdand/scenario.hpp"

namespace cdand {

/// CSV layout: one row per gNB, snapshots grouped by id. Columns are bound by
/// header name, so any column order parses. Lines starting with '#' are
/// comments. Truth columns are optional but must be present for every row of
/// a snapshot when used.
///   snapshot_id,gnb_id,z_x,z_y,range_m[,label,true_x,true_y]
std::string batch_to_csv(const SnapshotBatch& batch, const std::string& header_comment = "");
SnapshotBatch batch_from_csv(const std::string& text);

/// JSON layout: array of snapshot objects mirroring the Snapshot fields.
std::string batch_to_json(const SnapshotBatch& batch);
SnapshotBatch batch_from_json(const std::string& text);

SnapshotBatch read_batch_file(const std::string& path);   // dispatch on extension
void write_batch_csv_file(const SnapshotBatch& batch, const std::string& path,
                          const std::string& header_comment = "");
void write_batch_json_file(const SnapshotBatch& batch, const std::string& path);

/// Whole-file helpers with atomic replace (write to temp, then rename).
std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal formatting (17 significant digits).
std::string format_double(double v);

}  // namespace cdand
