#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tvcv/grid.hpp"
#include "tvcv/tv.hpp"

namespace tvcv {

/// One regression instance: measurements y = A x + noise over a pixel grid.
struct Problem {
  Matrix A;
  Vector y;
  GridGraph grid;
  TVVariant variant = TVVariant::isotropic;

  int n_samples() const { return static_cast<int>(A.rows()); }
  int n_pixels() const { return static_cast<int>(A.cols()); }

  void validate() const {
    if (A.rows() < 1) throw std::invalid_argument("Problem: A must have at least one row");
    if (A.cols() != grid.size())
      throw std::invalid_argument("Problem: A has " + std::to_string(A.cols()) +
                                  " columns, grid has " + std::to_string(grid.size()) +
                                  " pixels");
    if (y.size() != A.rows())
      throw std::invalid_argument("Problem: y length does not match rows of A");
    if (!A.allFinite() || !y.allFinite())
      throw std::invalid_argument("Problem: A and y must be finite");
  }
};

struct RegWeights {
  double lambda_l1 = 0.0;
  double lambda_tv = 0.0;

  void validate() const {
    if (!(lambda_l1 >= 0) || !(lambda_tv >= 0) || !std::isfinite(lambda_l1) ||
        !std::isfinite(lambda_tv))
      throw std::invalid_argument("RegWeights: weights must be finite and >= 0");
  }
};

struct SolverConfig {
  int max_outer_iters = 5000;
  double rel_tol = 1e-10;      // objective-decrease tolerance; also scales the
                               // gradient test used when the objective is smooth
  int inner_prox_iters = 50;   // dual gradient-projection steps per TV prox
  double lipschitz_margin = 1.1;
  std::uint64_t seed = 0;      // power-iteration start vector

  void validate() const {
    if (max_outer_iters < 1 || inner_prox_iters < 1 || !(rel_tol > 0) ||
        !(lipschitz_margin >= 1.0))
      throw std::invalid_argument("SolverConfig: invalid field");
  }
};

struct Solution {
  Vector x_hat;
  std::vector<double> objective_trace;  // accepted objective per outer iteration
  bool converged = false;
  int iters = 0;
};

/// (1/2)||y - Ax||^2 + lambda_l1 ||x||_1 + lambda_tv T(x).
inline double objective(const Vector& x, const Problem& p, const RegWeights& w) {
  if (x.size() != p.A.cols())
    throw std::invalid_argument("objective: x length does not match columns of A");
  const double rss = 0.5 * (p.y - p.A * x).squaredNorm();
  return rss + w.lambda_l1 * x.lpNorm<1>() + w.lambda_tv * tv_value(x, p.grid, p.variant);
}

}  // namespace tvcv
