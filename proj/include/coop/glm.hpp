#pragma once

#include "coop/cooperative.hpp"

namespace coop {

// One iteratively-reweighted least squares state for the binomial family.
struct IRLSState {
  Vector eta;
  Vector mu;
  Vector weights;           // mu(1-mu), floored at 1e-5
  Vector working_response;  // eta + (y - mu)/w
  double deviance = 0.0;    // 2 * negative log likelihood
  int iteration = 0;
};

// Recomputes mu, weights, working response and deviance from a linear
// predictor.
IRLSState irls_update(const Vector& eta, const Vector& y01, int iteration);

// Weighted stacked system: top block sqrt(W) X_m against sqrt(W) z, while
// the agreement contrast rows stay unweighted.
AugmentedSystem build_weighted_augmented(const std::vector<Matrix>& views,
                                         const IRLSState& state, double rho,
                                         const std::vector<std::string>& names = {});

// Negative log likelihood + (rho/2) agreement + penalty; the intercept is
// unpenalized.
double coop_logistic_objective(const std::vector<Matrix>& views,
                               const Vector& y01,
                               const std::vector<Vector>& thetas,
                               double intercept, double rho, double lambda,
                               double alpha = 1.0,
                               const std::vector<Vector>& penalty_factors = {});

struct LogisticOptions {
  double tol = 1e-8;
  int max_outer = 100;
  double alpha = 1.0;
  std::vector<Vector> penalty_factors;  // per view, optional
  double cd_tol = 1e-9;
  int cd_max_sweeps = 10000;
  int max_halvings = 10;
  int max_consecutive_increases = 5;
};

// Penalized cooperative logistic fit via IRLS with an explicit
// unpenalized intercept in the linear predictor. Step-halving guards each
// outer step; five consecutive objective increases raise NumericError.
CoopFit fit_coop_logistic(const MultiViewDataset& dataset, double rho,
                          double lambda, const LogisticOptions& opt = {});

}  // namespace coop
