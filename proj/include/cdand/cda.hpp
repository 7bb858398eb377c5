#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdand/snapshot.hpp"

namespace cdand {

/// All C(N,M) subset multilateration outputs for one snapshot. Subsets are
/// enumerated in lexicographic order so indices are stable across runs.
/// Entries whose solve failed (collinear anchors, no convergence) are kept in
/// place but marked invalid and excluded from every downstream statistic.
struct PelEnsemble {
  int subset_size = 3;                  // M
  std::size_t gnb_count = 0;            // N
  std::vector<std::vector<int>> subsets;
  std::vector<Point2> pels;
  std::vector<std::uint8_t> valid;

  std::size_t total() const { return subsets.size(); }
  std::size_t valid_count() const;
  std::vector<int> valid_indices() const;
};

std::uint64_t binomial(int n, int k);

/// All M-element subsets of {0..N-1} in lexicographic order.
/// Throws InvalidArity unless 3 <= M <= N.
std::vector<std::vector<int>> enumerate_subsets(int n, int m);

/// Multilaterate every subset of the snapshot. Throws TooFewValidPels when
/// fewer than two subsets produce a solution.
PelEnsemble build_ensemble(const Snapshot& snapshot, int subset_size = 3);

/// Valid PEL indices split by whether gNB n participated in the subset.
struct GnbPartition {
  std::vector<int> with_gnb;     // X_n
  std::vector<int> without_gnb;  // X_{-n}
};
GnbPartition partition_by_gnb(const PelEnsemble& ensemble, int gnb);

/// Points for a list of ensemble indices.
std::vector<Point2> gather_pels(const PelEnsemble& ensemble, std::span<const int> indices);

/// Valid PELs built solely from gNBs in `keep`.
std::vector<int> restrict_to_gnbs(const PelEnsemble& ensemble, std::span<const int> keep);

}  // namespace cdand
