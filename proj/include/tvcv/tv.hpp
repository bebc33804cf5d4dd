#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tvcv/grid.hpp"

namespace tvcv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Softening constant and link threshold used when analyzing a solution.
/// theta must stay well below delta: links are detected via
/// t_i^delta <= delta + theta, which collapses if the two scales mix.
struct SoftParams {
  double delta = 1e-4;
  double theta = 1e-12;

  void validate() const {
    if (!(delta > 0)) throw std::invalid_argument("SoftParams: delta must be > 0");
    if (!(theta > 0)) throw std::invalid_argument("SoftParams: theta must be > 0");
    if (!(theta < delta)) throw std::invalid_argument("SoftParams: theta must be < delta");
  }
  /// True when theta is uncomfortably close to delta (theta >= delta/10).
  bool scale_warning() const { return theta >= delta / 10.0; }
};

inline void check_length(const Vector& x, const GridGraph& g, const char* where) {
  if (x.size() != g.size())
    throw std::invalid_argument(std::string(where) + ": x has length " +
                                std::to_string(x.size()) + ", grid has " +
                                std::to_string(g.size()) + " pixels");
}

/// Exact TV penalty. Isotropic sums sqrt of the squared right/down
/// differences per pixel; anisotropic sums absolute differences; square sums
/// squared differences (equal to (1/2) x^T J x, see square_tv_matrix).
inline double tv_value(const Vector& x, const GridGraph& g, TVVariant variant) {
  check_length(x, g, "tv_value");
  double total = 0.0;
  for (int i : g.tv_terms) {
    const double xi = x[i];
    switch (variant) {
      case TVVariant::isotropic: {
        double s2 = 0.0;
        for (int j : g.neighbors[i]) s2 += (x[j] - xi) * (x[j] - xi);
        total += std::sqrt(s2);
        break;
      }
      case TVVariant::anisotropic:
        for (int j : g.neighbors[i]) total += std::abs(x[j] - xi);
        break;
      case TVVariant::square:
        for (int j : g.neighbors[i]) total += (x[j] - xi) * (x[j] - xi);
        break;
    }
  }
  return total;
}

/// Per-term softened values t_i^delta = sqrt(sum_j (x_j-x_i)^2 + delta^2),
/// indexed by pixel; pixels without a TV term hold 0.
inline std::vector<double> tv_soft_terms(const Vector& x, const GridGraph& g, double delta) {
  check_length(x, g, "tv_soft_terms");
  if (!(delta > 0)) throw std::invalid_argument("tv_soft_terms: delta must be > 0");
  std::vector<double> t(static_cast<std::size_t>(g.size()), 0.0);
  for (int i : g.tv_terms) {
    double s2 = 0.0;
    for (int j : g.neighbors[i]) s2 += (x[j] - x[i]) * (x[j] - x[i]);
    t[i] = std::sqrt(s2 + delta * delta);
  }
  return t;
}

/// Softened isotropic TV, sum of t_i^delta over TV terms.
inline double tv_soft_value(const Vector& x, const GridGraph& g, double delta) {
  const auto t = tv_soft_terms(x, g, delta);
  double total = 0.0;
  for (int i : g.tv_terms) total += t[i];
  return total;
}

/// Analytic gradient of the softened isotropic TV.
inline Vector tv_soft_gradient(const Vector& x, const GridGraph& g, double delta) {
  check_length(x, g, "tv_soft_gradient");
  if (!(delta > 0)) throw std::invalid_argument("tv_soft_gradient: delta must be > 0");
  Vector grad = Vector::Zero(x.size());
  for (int i : g.tv_terms) {
    double s2 = 0.0;
    for (int j : g.neighbors[i]) s2 += (x[j] - x[i]) * (x[j] - x[i]);
    const double t = std::sqrt(s2 + delta * delta);
    for (int j : g.neighbors[i]) {
      const double d = x[j] - x[i];
      grad[j] += d / t;
      grad[i] -= d / t;
    }
  }
  return grad;
}

/// Analytic Hessian of the softened isotropic TV, skipping the terms listed
/// in `exclude`. Each term block touches at most three pixels and
/// annihilates the uniform-shift direction, so every row sums to zero.
inline SparseMatrix tv_soft_hessian(const Vector& x, const GridGraph& g, double delta,
                                    const std::unordered_set<int>& exclude = {}) {
  check_length(x, g, "tv_soft_hessian");
  if (!(delta > 0)) throw std::invalid_argument("tv_soft_hessian: delta must be > 0");
  for (int i : exclude) {
    if (i < 0 || i >= g.size() || g.neighbors[i].empty())
      throw std::invalid_argument("tv_soft_hessian: exclude contains non-term index " +
                                  std::to_string(i));
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * g.tv_terms.size());
  for (int i : g.tv_terms) {
    if (exclude.count(i)) continue;
    const auto& nb = g.neighbors[i];
    double s2 = 0.0, dsum = 0.0;
    for (int j : nb) {
      const double d = x[j] - x[i];
      s2 += d * d;
      dsum += d;
    }
    const double t = std::sqrt(s2 + delta * delta);
    const double t3 = t * t * t;
    // d^2 t / dx_j dx_k = delta_jk/t - d_j d_k / t^3
    for (std::size_t a = 0; a < nb.size(); ++a) {
      const double da = x[nb[a]] - x[i];
      for (std::size_t b = 0; b < nb.size(); ++b) {
        const double db = x[nb[b]] - x[i];
        double v = -da * db / t3;
        if (a == b) v += 1.0 / t;
        trip.emplace_back(nb[a], nb[b], v);
      }
      // cross terms with the center pixel
      const double vcross = -1.0 / t + da * dsum / t3;
      trip.emplace_back(i, nb[a], vcross);
      trip.emplace_back(nb[a], i, vcross);
    }
    trip.emplace_back(i, i, static_cast<double>(nb.size()) / t - dsum * dsum / t3);
  }
  SparseMatrix h(g.size(), g.size());
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

/// J with square TV = (1/2) x^T J x; J is twice the neighbor-graph Laplacian.
inline SparseMatrix square_tv_matrix(const GridGraph& g) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(8 * g.tv_terms.size());
  for (int i : g.tv_terms) {
    for (int j : g.neighbors[i]) {
      trip.emplace_back(i, i, 2.0);
      trip.emplace_back(j, j, 2.0);
      trip.emplace_back(i, j, -2.0);
      trip.emplace_back(j, i, -2.0);
    }
  }
  SparseMatrix j(g.size(), g.size());
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

}  // namespace tvcv
