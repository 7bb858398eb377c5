#include "cdand/snapshot.hpp"

#include <cmath>
#include <string>

#include "cdand/errors.hpp"

namespace cdand {

void Snapshot::validate() const {
  const std::size_t n = gnb_positions.size();
  if (ranges.size() != n)
    throw InvalidConfig("snapshot: " + std::to_string(ranges.size()) + " ranges for " +
                        std::to_string(n) + " gNBs");
  for (const Point2& z : gnb_positions)
    if (!is_finite(z)) throw InvalidConfig("snapshot: non-finite gNB coordinate");
  for (double d : ranges)
    if (!std::isfinite(d) || d < 0.0) throw InvalidConfig("snapshot: invalid range value");
  if (truth_labels && truth_labels->size() != n)
    throw InvalidConfig("snapshot: label count mismatch");
  if (truth_position && !is_finite(*truth_position))
    throw InvalidConfig("snapshot: non-finite truth position");
  if (rtt) {
    if (rtt->size() != n) throw InvalidConfig("snapshot: rtt count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double implied = (*rtt)[i] * kSpeedOfLight / 2.0;
      if (std::abs(implied - ranges[i]) > 1e-9)
        throw InvalidConfig("snapshot: rtt inconsistent with range at gNB " + std::to_string(i));
    }
  }
}

}  // namespace cdand
