#pragma once

#include <optional>
#include <vector>

#include "cdand/geometry.hpp"

namespace cdand {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

enum class LinkState : int { los = 0, nlos = 1 };

/// One UE realization: gNB coordinates with their range measurements, plus
/// optional ground truth carried along for evaluation.
struct Snapshot {
  std::vector<Point2> gnb_positions;
  std::vector<double> ranges;                         // meters
  std::optional<std::vector<LinkState>> truth_labels;
  std::optional<Point2> truth_position;
  std::optional<std::vector<double>> rtt;             // seconds, d = tau*c/2

  std::size_t size() const { return gnb_positions.size(); }

  /// Throws InvalidConfig when field lengths disagree, values are non-finite,
  /// ranges are negative, or rtt is inconsistent with ranges beyond 1e-9 m.
  void validate() const;
};

}  // namespace cdand
