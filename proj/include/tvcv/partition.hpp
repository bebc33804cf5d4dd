#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "tvcv/tv.hpp"

namespace tvcv {

/// Disjoint-set with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

/// Active/killed split of the coordinates plus the locked-cluster structure
/// extracted from the near-vanishing TV terms.
struct Partition {
  std::vector<int> active;                  // S_A, ascending
  std::vector<int> killed;                  // S_K, ascending
  std::vector<std::vector<int>> clusters;   // each ascending, size >= 2
  std::vector<int> isolated;                // S_I, ascending
  std::vector<std::pair<int, int>> links;   // (term pixel, neighbor pixel)
  int removed_clusters = 0;  // components dropped for touching killed variables

  int dof() const { return static_cast<int>(clusters.size() + isolated.size()); }
};

inline std::pair<std::vector<int>, std::vector<int>> detect_active(const Vector& x_hat,
                                                                   double eps_active = 0.0) {
  std::vector<int> active, killed;
  for (int i = 0; i < x_hat.size(); ++i) {
    if (std::abs(x_hat[i]) <= eps_active)
      killed.push_back(i);
    else
      active.push_back(i);
  }
  return {std::move(active), std::move(killed)};
}

/// Links per variant. Isotropic: term i links {i} x neighbors when
/// t_i^delta <= delta + theta, tested as s_i^2 <= 2*delta*theta + theta^2 to
/// dodge the cancellation in t - delta. Anisotropic: |x_j - x_i| <= theta
/// per edge. Square TV never links (no sparsifying effect on differences).
inline std::vector<std::pair<int, int>> enumerate_links(const Vector& x_hat, const GridGraph& g,
                                                        const SoftParams& soft,
                                                        TVVariant variant) {
  check_length(x_hat, g, "enumerate_links");
  soft.validate();
  std::vector<std::pair<int, int>> links;
  if (variant == TVVariant::square) return links;
  if (variant == TVVariant::anisotropic) {
    for (int i : g.tv_terms)
      for (int j : g.neighbors[i])
        if (std::abs(x_hat[j] - x_hat[i]) <= soft.theta) links.emplace_back(i, j);
    return links;
  }
  const double s2_max = soft.theta * (2.0 * soft.delta + soft.theta);
  for (int i : g.tv_terms) {
    double s2 = 0.0;
    for (int j : g.neighbors[i]) s2 += (x_hat[j] - x_hat[i]) * (x_hat[j] - x_hat[i]);
    if (s2 <= s2_max)
      for (int j : g.neighbors[i]) links.emplace_back(i, j);
  }
  return links;
}

/// Connected components of the link graph. Components touching a killed
/// variable are dropped; their active members are reassigned to S_I.
inline std::tuple<std::vector<std::vector<int>>, std::vector<int>, int> enumerate_clusters(
    const std::vector<std::pair<int, int>>& links, const std::vector<int>& active,
    const std::vector<int>& killed, int n) {
  std::vector<char> is_killed(n, 0);
  for (int i : killed) is_killed[i] = 1;

  UnionFind uf(static_cast<std::size_t>(n));
  std::vector<char> in_links(n, 0);
  for (const auto& [a, b] : links) {
    uf.unite(a, b);
    in_links[a] = in_links[b] = 1;
  }

  // members per root, ascending by construction
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i)
    if (in_links[i]) members[uf.find(i)].push_back(i);

  std::vector<std::vector<int>> clusters;
  std::vector<char> clustered(n, 0);
  int removed = 0;
  for (auto& comp : members) {
    if (comp.empty()) continue;
    const bool touches_killed =
        std::any_of(comp.begin(), comp.end(), [&](int i) { return is_killed[i]; });
    if (touches_killed) {
      ++removed;
      continue;
    }
    for (int i : comp) clustered[i] = 1;
    clusters.push_back(std::move(comp));
  }
  std::sort(clusters.begin(), clusters.end());

  std::vector<int> isolated;
  for (int i : active)
    if (!clustered[i]) isolated.push_back(i);
  return {std::move(clusters), std::move(isolated), removed};
}

/// Steps 1-3 of the solution analysis in one call. With lambda_tv = 0 the TV
/// term is absent from the objective, so no links or clusters are formed.
inline Partition build_partition(const Vector& x_hat, const GridGraph& g, const SoftParams& soft,
                                 TVVariant variant, double eps_active = 0.0,
                                 double lambda_tv = 1.0) {
  Partition part;
  std::tie(part.active, part.killed) = detect_active(x_hat, eps_active);
  if (lambda_tv > 0) part.links = enumerate_links(x_hat, g, soft, variant);
  std::tie(part.clusters, part.isolated, part.removed_clusters) =
      enumerate_clusters(part.links, part.active, part.killed, g.size());
  return part;
}

}  // namespace tvcv
