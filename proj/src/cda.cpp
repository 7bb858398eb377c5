#include "cdand/cda.hpp"

#include <algorithm>
#include <string>

#include "cdand/errors.hpp"

namespace cdand {

std::size_t PelEnsemble::valid_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : valid) n += v;
  return n;
}

std::vector<int> PelEnsemble::valid_indices() const {
  std::vector<int> out;
  out.reserve(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i)
    if (valid[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

std::vector<std::vector<int>> enumerate_subsets(int n, int m) {
  if (m < 3 || m > n)
    throw InvalidArity("enumerate_subsets: need 3 <= M <= N, got M=" + std::to_string(m) +
                       " N=" + std::to_string(n));
  std::vector<std::vector<int>> out;
  out.reserve(binomial(n, m));
  std::vector<int> cur(m);
  for (int i = 0; i < m; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = m - 1;
    while (i >= 0 && cur[i] == n - m + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

PelEnsemble build_ensemble(const Snapshot& snapshot, int subset_size) {
  snapshot.validate();
  const int n = static_cast<int>(snapshot.size());

  PelEnsemble ensemble;
  ensemble.subset_size = subset_size;
  ensemble.gnb_count = snapshot.size();
  ensemble.subsets = enumerate_subsets(n, subset_size);
  ensemble.pels.assign(ensemble.subsets.size(), Point2{});
  ensemble.valid.assign(ensemble.subsets.size(), 0);

  std::vector<Point2> anchors(subset_size);
  std::vector<double> ranges(subset_size);
  for (std::size_t ell = 0; ell < ensemble.subsets.size(); ++ell) {
    const auto& subset = ensemble.subsets[ell];
    for (int i = 0; i < subset_size; ++i) {
      anchors[i] = snapshot.gnb_positions[subset[i]];
      ranges[i] = snapshot.ranges[subset[i]];
    }
    try {
      ensemble.pels[ell] = multilaterate(anchors, ranges);
      ensemble.valid[ell] = 1;
    } catch (const DegenerateGeometry&) {
    } catch (const NoConvergence&) {
    }
  }

  if (ensemble.valid_count() < 2)
    throw TooFewValidPels("build_ensemble: fewer than 2 valid PELs");
  return ensemble;
}

GnbPartition partition_by_gnb(const PelEnsemble& ensemble, int gnb) {
  GnbPartition part;
  for (std::size_t ell = 0; ell < ensemble.subsets.size(); ++ell) {
    if (!ensemble.valid[ell]) continue;
    const auto& subset = ensemble.subsets[ell];
    if (std::find(subset.begin(), subset.end(), gnb) != subset.end())
      part.with_gnb.push_back(static_cast<int>(ell));
    else
      part.without_gnb.push_back(static_cast<int>(ell));
  }
  return part;
}

std::vector<Point2> gather_pels(const PelEnsemble& ensemble, std::span<const int> indices) {
  std::vector<Point2> out;
  out.reserve(indices.size());
  for (int ell : indices) out.push_back(ensemble.pels[ell]);
  return out;
}

std::vector<int> restrict_to_gnbs(const PelEnsemble& ensemble, std::span<const int> keep) {
  std::vector<std::uint8_t> in_keep(ensemble.gnb_count, 0);
  for (int g : keep) in_keep[g] = 1;
  std::vector<int> out;
  for (std::size_t ell = 0; ell < ensemble.subsets.size(); ++ell) {
    if (!ensemble.valid[ell]) continue;
    bool all = true;
    for (int g : ensemble.subsets[ell])
      if (!in_keep[g]) { all = false; break; }
    if (all) out.push_back(static_cast<int>(ell));
  }
  return out;
}

}  // namespace cdand
