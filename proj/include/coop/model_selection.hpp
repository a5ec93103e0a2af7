#pragma once

#include <cstdint>
#include <vector>

#include "coop/cooperative.hpp"

namespace coop {

// Balanced k-fold assignment over rows; sizes differ by at most one.
struct FoldPlan {
  Index n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignments;  // size n, values in [0, k)

  std::vector<Index> held_out_rows(int fold) const;
  std::vector<Index> training_rows(int fold) const;
};

FoldPlan make_folds(Index n, int k, std::uint64_t seed);

enum class SelectionRule { min_error, one_se };

struct CVOptions {
  Vector rho_grid;  // must be nonempty, nonnegative
  int n_lambda = 50;
  double min_ratio = 1e-3;
  double alpha = 1.0;
  int k_folds = 10;
  std::uint64_t seed = 1;
  SelectionRule rule = SelectionRule::min_error;
  std::vector<Vector> penalty_factors;  // per view, optional
  unsigned threads = 1;
  double tol = 1e-7;
  int max_sweeps = 10000;
};

// Per-rho record of the adaptive penalty-ratio search.
struct AdaptiveState {
  double rho = 0.0;
  // CV-selected subproblem penalties for the dataset's first and second
  // view (already mapped back if the swapped orientation won).
  double lambda_x = 0.0;
  double lambda_z = 0.0;
  double cv_error_x = 0.0;
  double cv_error_z = 0.0;
  double cv_error_sum = 0.0;
  int n_iter = 0;
  bool swapped = false;           // winning orientation fitted (z, x) first
  bool ratio_clamped = false;
  bool degenerate_target = false;  // a partial residual collapsed to zero
  double penalty_ratio = 1.0;      // clamped lambda_z / lambda_x
};

struct CVResult {
  Vector rho_grid;
  std::vector<Vector> lambda_grids;  // one grid per rho
  Matrix mean_error;                 // n_rho x n_lambda
  Matrix sd_error;                   // across folds
  int selected_rho_index = -1;
  int selected_lambda_index = -1;
  double selected_rho = 0.0;
  double selected_lambda = 0.0;
  SelectionRule rule = SelectionRule::min_error;
  FoldPlan folds;
  std::uint64_t seed = 0;
  CoopFit fit;  // refit on the full data at the selection
  std::vector<AdaptiveState> adaptive_states;  // empty for plain CV
};

// Cross-validates the direct cooperative fit over (rho, lambda). Lambda
// grids come from the full-data stacked system per rho so folds share
// grids. Each training fold is restandardized from raw rows; held-out
// error is the plain squared prediction error on the original response
// scale. Ties prefer smaller rho, then larger lambda. A caller-supplied
// plan overrides opt.k_folds/opt.seed.
CVResult cv_coop(const MultiViewDataset& dataset, const CVOptions& opt,
                 const FoldPlan* plan = nullptr);

struct AdaptiveOptions {
  int n_lambda = 50;
  double min_ratio = 1e-3;
  double obj_tol = 1e-5;
  int max_iter = 20;
  double tol = 1e-7;
  int max_sweeps = 10000;
  unsigned threads = 1;
};

// Alternates CV-tuned lasso fits on the two views' adjusted targets until
// the joint objective settles; `swapped` starts with the second view.
// Results are reported in dataset view order regardless of orientation.
AdaptiveState adaptive_one_at_a_time(const MultiViewDataset& dataset,
                                     double rho, const FoldPlan& folds,
                                     const AdaptiveOptions& opt,
                                     bool swapped = false);

// Runs both orientations per rho, keeps the one with the lower summed CV
// error, and cross-validates the direct fit with penalty factors
// (1, ..., 1, lambda_z*/lambda_x*, ...) where the ratio is clamped to
// [1e-6, 1e6].
CVResult adaptive_direct(const MultiViewDataset& dataset, const CVOptions& opt,
                         const AdaptiveOptions& adaptive_opt = {},
                         const FoldPlan* plan = nullptr);

struct LateFusionFit {
  std::vector<std::string> view_names;
  std::vector<Vector> per_view_thetas;  // full-data refits at per-view CV lambda
  Vector lambda_per_view;
  Vector weights;      // combiner weights on per-view predictions
  double intercept = 0.0;
  // weights[m] * per_view_thetas[m]; drives predict like a CoopFit.
  CoopFit combined;
};

// Per-view CV-tuned lasso, then a least squares combiner of the views'
// out-of-fold predictions (least-norm solve when degenerate).
LateFusionFit late_fusion_fit(const MultiViewDataset& dataset,
                              const CVOptions& opt,
                              const FoldPlan* plan = nullptr);

// Plain CV-tuned lasso on one view (or any single design matrix built
// from raw rows); used for separate-view baselines and inside late
// fusion. Returns coefficients refit on the full data and the CV curve.
struct SingleViewCV {
  Vector lambdas;
  Vector mean_error;
  Vector sd_error;
  int selected_index = -1;
  double selected_lambda = 0.0;
  Vector beta;        // refit at selection on standardized full data
  double intercept = 0.0;
  Vector oof_predictions;  // out-of-fold predictions at the selected lambda
};

SingleViewCV cv_lasso_single(const DataView& raw, const Vector& raw_y,
                             const FoldPlan& folds, int n_lambda,
                             double min_ratio, double alpha = 1.0,
                             double tol = 1e-7, int max_sweeps = 10000);

}  // namespace coop
