#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coop/data_model.hpp"
#include "coop/elastic_net.hpp"

namespace coop {

// Agreement penalty tying selected feature columns across two views:
// each pair (view_a, col_a, view_b, col_b) contributes
// (rho2/2) * (theta_a[col_a] - theta_b[col_b])^2 to the objective,
// realized as one appended row in the stacked system.
struct FeaturePair {
  std::size_t view_a = 0;
  Index col_a = 0;
  std::size_t view_b = 0;
  Index col_b = 0;
};

struct PairPenalty {
  double rho2 = 0.0;
  std::vector<FeaturePair> pairs;
};

struct ViewSpan {
  std::string name;
  Index offset = 0;
  Index cols = 0;
};

// Row block encoding one view pair's agreement contrast: -sqrt(rho) times
// view `first` and +sqrt(rho) times view `second`.
struct ContrastBlock {
  std::size_t first = 0;
  std::size_t second = 0;
  Index row_start = 0;
  Index rows = 0;
};

// Stacked design whose plain penalized least squares solution equals the
// cooperative solution: top block holds the views side by side against the
// response, followed by one contrast block per view pair (pairs ordered
// (0,1), (0,2), ..., (M-2,M-1)), then any paired-feature rows.
struct AugmentedSystem {
  Matrix x_tilde;
  Vector y_tilde;
  double rho = 0.0;
  Index n_obs = 0;  // rows in the top block
  std::vector<ViewSpan> blocks;
  std::vector<ContrastBlock> contrasts;
  Index n_pair_rows = 0;
};

enum class CoopAlgorithm { direct, one_at_a_time };

struct CoopFit {
  std::vector<std::string> view_names;
  std::vector<Vector> thetas;
  double rho = 0.0;
  Vector lambda_per_view;  // objective-level l1 weight per view
  double alpha = 1.0;
  double intercept = 0.0;  // response mean (gaussian) or fitted intercept
  double objective = 0.0;
  int n_iter = 0;
  bool converged = true;
  CoopAlgorithm algorithm = CoopAlgorithm::direct;
  Family family = Family::gaussian;
  // Steps where the tracked objective rose beyond numerical slack.
  int monotonicity_violations = 0;
};

struct CoopPath {
  Vector lambdas;
  std::vector<CoopFit> fits;
  std::vector<std::vector<int>> df_per_view;  // [lambda][view]
};

AugmentedSystem build_augmented(const std::vector<Matrix>& views,
                                const Vector& y, double rho,
                                const std::vector<std::string>& names = {});

AugmentedSystem build_augmented(const MultiViewDataset& dataset, double rho);

// Appends one row per pair: +sqrt(rho2) at (view_a, col_a), -sqrt(rho2)
// at (view_b, col_b), response entry 0.
AugmentedSystem add_paired_rows(AugmentedSystem system,
                                const PairPenalty& pairs);

// (1/2)||y - sum_m X_m theta_m||^2
//   + (rho/2) sum_{m<m'} ||X_m theta_m - X_m' theta_m'||^2
//   + sum_m lambda_m sum_j pf_mj (alpha|t| + (1-alpha) t^2/2)
//   + (rho2/2) sum_pairs (theta_a - theta_b)^2.
double coop_objective(const std::vector<Matrix>& views, const Vector& y,
                      const std::vector<Vector>& thetas, double rho,
                      const Vector& lambda_per_view, double alpha = 1.0,
                      const std::vector<Vector>& penalty_factors = {},
                      const PairPenalty* pairs = nullptr);

double coop_objective(const MultiViewDataset& dataset,
                      const std::vector<Vector>& thetas, double rho,
                      const Vector& lambda_per_view, double alpha = 1.0,
                      const std::vector<Vector>& penalty_factors = {},
                      const PairPenalty* pairs = nullptr);

// Solves the stacked system over a decreasing lambda grid with warm
// starts. penalty_factors, when given, is one vector per view.
CoopPath coop_direct_fit(const MultiViewDataset& dataset, double rho,
                         const Vector& lambdas, double alpha = 1.0,
                         const std::vector<Vector>& penalty_factors = {},
                         const PairPenalty* pairs = nullptr,
                         double tol = 1e-7, int max_sweeps = 10000);

// Per-view fitter for the block-update algorithm. fit() receives the
// adjusted target for its view and a scale that multiplies the fitter's
// internal penalty so block updates minimize the joint objective; only
// linear fitters (coefficients out) ship here.
class ViewFitter {
 public:
  virtual ~ViewFitter() = default;
  virtual Vector fit(const Matrix& x, const Vector& target,
                     double penalty_scale) = 0;
};

class LassoViewFitter : public ViewFitter {
 public:
  LassoViewFitter(double lambda, double alpha = 1.0,
                  Vector penalty_factors = {}, double tol = 1e-7,
                  int max_sweeps = 10000)
      : lambda_(lambda), alpha_(alpha),
        penalty_factors_(std::move(penalty_factors)), tol_(tol),
        max_sweeps_(max_sweeps) {}

  Vector fit(const Matrix& x, const Vector& target,
             double penalty_scale) override;

  double lambda() const { return lambda_; }

 private:
  double lambda_;
  double alpha_;
  Vector penalty_factors_;
  double tol_;
  int max_sweeps_;
  Vector warm_;
};

// Cycles through the views from a zero start, refitting each against
// y/(1+(M-1)rho) - (1-rho)/(1+(M-1)rho) * (other views' fits); stops when
// the joint objective's relative change drops below tol. lambda_per_view
// are objective-level weights; the matching subproblem penalty is
// lambda_m / (1+(M-1)rho).
CoopFit coop_iterative_fit(const MultiViewDataset& dataset, double rho,
                           const Vector& lambda_per_view,
                           const std::vector<ViewFitter*>& fitters,
                           double tol = 1e-8, int max_iter = 200,
                           double alpha = 1.0);

// Convenience: iterative fit with lasso fitters at the given weights.
CoopFit coop_iterative_fit(const MultiViewDataset& dataset, double rho,
                           const Vector& lambda_per_view, double tol = 1e-8,
                           int max_iter = 200, double alpha = 1.0,
                           double cd_tol = 1e-9, int cd_max_sweeps = 10000);

// Prediction on new raw views, standardized with the training statistics
// recorded in `train`. Returns the linear predictor plus intercept
// (gaussian) or probabilities (binomial).
Vector predict(const CoopFit& fit, const MultiViewDataset& train,
               const std::vector<Matrix>& raw_views);

// Same, with explicit standardization statistics per view.
Vector predict_with_stats(const CoopFit& fit,
                          const std::vector<Vector>& column_means,
                          const std::vector<Vector>& column_sds,
                          const std::vector<Matrix>& raw_views);

// sum_pairs (theta_a[col_a] - theta_b[col_b])^2 at the fitted coefficients.
double paired_discrepancy(const CoopFit& fit, const PairPenalty& pairs);

// Agreement term sum_{m<m'} ||X_m theta_m - X_m' theta_m'||^2 evaluated on
// standardized training views.
double agreement_term(const MultiViewDataset& dataset,
                      const std::vector<Vector>& thetas);

}  // namespace coop
