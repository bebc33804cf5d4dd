#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "tvcv/problem.hpp"

namespace tvcv {

inline Vector soft_threshold(const Vector& v, double t) {
  if (t <= 0) return v;
  return v.unaryExpr([t](double u) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
  });
}

/// Difference operator of the grid, one row per (term, neighbor) edge,
/// grouped by term so the isotropic dual projection can act per group.
struct EdgeSet {
  std::vector<int> from, to;     // edge e: x[to[e]] - x[from[e]]
  std::vector<int> group_start;  // per TV term, first edge index; +1 sentinel

  explicit EdgeSet(const GridGraph& g) {
    group_start.reserve(g.tv_terms.size() + 1);
    for (int i : g.tv_terms) {
      group_start.push_back(static_cast<int>(from.size()));
      for (int j : g.neighbors[i]) {
        from.push_back(i);
        to.push_back(j);
      }
    }
    group_start.push_back(static_cast<int>(from.size()));
  }

  int n_edges() const { return static_cast<int>(from.size()); }

  void apply(const Vector& x, Vector& out) const {  // out = D x
    for (int e = 0; e < n_edges(); ++e) out[e] = x[to[e]] - x[from[e]];
  }
  void apply_transpose(const Vector& p, Vector& out) const {  // out = D^T p
    out.setZero();
    for (int e = 0; e < n_edges(); ++e) {
      out[to[e]] += p[e];
      out[from[e]] -= p[e];
    }
  }
};

/// prox of w * TV via fast gradient projection on the dual
/// (min_p 1/2 ||b - w D^T p||^2 over the per-term unit balls; isotropic
/// projects each term group onto the Euclidean ball, anisotropic clamps each
/// component). ||D D^T|| <= 8 on the 2D lattice gives the 1/(8w) dual step.
inline Vector tv_prox(const Vector& b, const GridGraph& g, const EdgeSet& edges, double w,
                      TVVariant variant, int iters) {
  const int ne = edges.n_edges();
  if (w <= 0 || ne == 0) return b;

  Vector p = Vector::Zero(ne), p_prev = Vector::Zero(ne), q = Vector::Zero(ne);
  Vector r(b.size()), dtp(b.size()), dr(ne);
  double t = 1.0;
  const double step = 1.0 / (8.0 * w);

  for (int it = 0; it < iters; ++it) {
    edges.apply_transpose(q, dtp);
    r = b - w * dtp;
    edges.apply(r, dr);
    p_prev.swap(p);
    p = q + step * dr;
    if (variant == TVVariant::isotropic) {
      const auto& gs = edges.group_start;
      for (std::size_t k = 0; k + 1 < gs.size(); ++k) {
        double n2 = 0.0;
        for (int e = gs[k]; e < gs[k + 1]; ++e) n2 += p[e] * p[e];
        if (n2 > 1.0) {
          const double inv = 1.0 / std::sqrt(n2);
          for (int e = gs[k]; e < gs[k + 1]; ++e) p[e] *= inv;
        }
      }
    } else {  // anisotropic: box projection
      p = p.cwiseMax(-1.0).cwiseMin(1.0);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    q = p + ((t - 1.0) / t_next) * (p - p_prev);
    t = t_next;
  }
  edges.apply_transpose(p, dtp);
  return b - w * dtp;
}

/// Largest-eigenvalue estimate of a symmetric PSD operator by power iteration.
template <class Op>
double power_iteration(Op&& op, int n, int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  double nv = v.norm();
  if (nv == 0) v.setOnes(), nv = v.norm();
  v /= nv;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = op(v);
    lambda = v.dot(w);
    const double nw = w.norm();
    if (!(nw > 0) || !std::isfinite(nw)) break;
    v = w / nw;
  }
  return std::max(lambda, 0.0);
}

/// Monotone accelerated proximal-gradient solve of
///   min 1/2 ||y - Ax||^2 + lambda_l1 ||x||_1 + lambda_tv T(x).
/// Square TV is smooth and folded into the gradient; the other variants are
/// handled by composing the soft-threshold after an inexact dual TV prox.
/// The accepted objective never increases. Coordinates zeroed by the
/// soft-threshold are exact zeros.
///
/// Stopping: smooth objectives (no l1, and square TV or no TV) stop on
/// ||grad||_inf <= rel_tol * max(1, ||A^T y||_inf); otherwise on five
/// consecutive iterations whose objective decrease is below
/// rel_tol * max(1, |objective|).
inline Solution solve(const Problem& problem, const RegWeights& weights,
                      const SolverConfig& config = {},
                      const std::optional<Vector>& x0 = std::nullopt) {
  problem.validate();
  weights.validate();
  config.validate();

  const int n = problem.n_pixels();
  const Matrix& A = problem.A;
  const Vector& y = problem.y;
  const double l1 = weights.lambda_l1;
  const double ltv = weights.lambda_tv;
  const bool square = problem.variant == TVVariant::square;
  const bool smooth = l1 == 0.0 && (square || ltv == 0.0);

  const EdgeSet edges(problem.grid);
  SparseMatrix J;
  if (square && ltv > 0) J = square_tv_matrix(problem.grid);

  const Vector aty = A.transpose() * y;
  const double grad_scale = std::max(1.0, aty.lpNorm<Eigen::Infinity>());

  auto smooth_grad = [&](const Vector& x) -> Vector {
    Vector g = A.transpose() * (A * x - y);
    if (square && ltv > 0) g += ltv * (J * x);
    return g;
  };

  double lip = power_iteration(
      [&](const Vector& v) -> Vector {
        Vector w = A.transpose() * (A * v);
        if (square && ltv > 0) w += ltv * (J * v);
        return w;
      },
      n, 30, config.seed);
  lip *= config.lipschitz_margin;
  if (!(lip > 0) || !std::isfinite(lip)) lip = 1.0;
  const double eta = 1.0 / lip;

  auto prox = [&](const Vector& v) -> Vector {
    Vector z = v;
    if (!square && ltv > 0)
      z = tv_prox(z, problem.grid, edges, eta * ltv, problem.variant, config.inner_prox_iters);
    if (l1 > 0) z = soft_threshold(z, eta * l1);
    return z;
  };

  Vector x = x0 ? *x0 : Vector::Zero(n);
  if (x.size() != n) throw std::invalid_argument("solve: warm start has wrong length");
  double fx = objective(x, problem, weights);

  Solution sol;
  sol.objective_trace.reserve(config.max_outer_iters + 1);
  sol.objective_trace.push_back(fx);

  Vector yk = x, x_prev = x;
  double t = 1.0;
  int stall = 0;

  for (int k = 1; k <= config.max_outer_iters; ++k) {
    const Vector z = prox(yk - eta * smooth_grad(yk));
    const double fz = objective(z, problem, weights);

    x_prev = x;
    const double fx_prev = fx;
    if (fz <= fx) {
      x = z;
      fx = fz;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;

    sol.objective_trace.push_back(fx);
    sol.iters = k;

    if (smooth) {
      if (smooth_grad(x).lpNorm<Eigen::Infinity>() <= config.rel_tol * grad_scale) {
        sol.converged = true;
        break;
      }
    } else {
      if (fx_prev - fx <= config.rel_tol * std::max(1.0, std::abs(fx)))
        ++stall;
      else
        stall = 0;
      if (stall >= 5) {
        sol.converged = true;
        break;
      }
    }
  }
  sol.x_hat = x;
  return sol;
}

/// Max violation of the stationarity condition over active coordinates,
/// using the softened TV gradient for the isotropic variant. Meaningful when
/// no TV term is near its kink (t_i >> delta).
inline double optimality_residual(const Problem& problem, const RegWeights& weights,
                                  const Vector& x, double delta = 1e-8) {
  Vector g = problem.A.transpose() * (problem.A * x - problem.y);
  if (weights.lambda_tv > 0) {
    switch (problem.variant) {
      case TVVariant::isotropic:
        g += weights.lambda_tv * tv_soft_gradient(x, problem.grid, delta);
        break;
      case TVVariant::square:
        g += weights.lambda_tv * (square_tv_matrix(problem.grid) * x);
        break;
      case TVVariant::anisotropic:
        for (int i : problem.grid.tv_terms)
          for (int j : problem.grid.neighbors[i]) {
            const double s = x[j] - x[i] > 0 ? 1.0 : (x[j] - x[i] < 0 ? -1.0 : 0.0);
            g[j] += weights.lambda_tv * s;
            g[i] -= weights.lambda_tv * s;
          }
        break;
    }
  }
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const double r = g[i] + weights.lambda_l1 * (x[i] > 0 ? 1.0 : -1.0);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace tvcv
