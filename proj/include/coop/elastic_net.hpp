#pragma once

#include <vector>

#include "coop/common.hpp"

namespace coop {

// Penalty lambda * sum_j pf_j * (alpha*|b_j| + (1-alpha)*b_j^2/2) added to
// the unnormalized least squares loss (1/2)||y - X b||^2. alpha = 1 is the
// pure l1 penalty, alpha = 0 pure ridge. penalty_factors left empty means
// every column gets factor 1; a factor of 0 leaves a column unpenalized.
struct PenaltySpec {
  double lambda = 0.0;
  double alpha = 1.0;
  Vector penalty_factors;
};

struct Coefs {
  Vector beta;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = true;
  double kkt_violation = 0.0;
};

struct PathResult {
  Vector lambdas;  // decreasing
  std::vector<Coefs> fits;
  std::vector<int> df;  // nonzero count per lambda
};

double soft_threshold(double value, double threshold);

double elastic_net_objective(const Matrix& x, const Vector& y,
                             const Vector& beta, const PenaltySpec& spec);

// Largest subgradient-stationarity violation of `beta`; 0 at an exact
// optimum.
double kkt_violation(const Matrix& x, const Vector& y, const Vector& beta,
                     const PenaltySpec& spec);

// Cyclic coordinate descent. Starts from `warm` when given, else from
// zero. Declares convergence when the largest coefficient move in a sweep
// drops below tol * (1 + max|beta|) and the KKT residual is within
// tol * (1 + max|X'y|); returns converged=false (no throw) if max_sweeps
// runs out first.
Coefs coordinate_descent(const Matrix& x, const Vector& y,
                         const PenaltySpec& spec,
                         const Vector* warm = nullptr, double tol = 1e-7,
                         int max_sweeps = 10000);

// Log-spaced grid of n_lambda values from lambda_max down to
// lambda_max * min_ratio, where lambda_max = max_j |x_j'y| / (alpha*pf_j)
// over penalized columns is the smallest lambda zeroing every penalized
// coefficient. spec.lambda is ignored. alpha below 1e-3 is floored at
// 1e-3 for this computation so the grid stays finite.
Vector lambda_grid(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                   int n_lambda, double min_ratio);

// Fits the grid in decreasing order, warm-starting each solve from the
// previous solution.
PathResult fit_path(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                    const Vector& lambdas, double tol = 1e-7,
                    int max_sweeps = 10000);

}  // namespace coop
