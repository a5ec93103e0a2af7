#include "coop/model_selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace coop {

namespace {

Matrix rows_subset(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

Vector vector_subset(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[rows[i]];
  return out;
}

Vector raw_response(const MultiViewDataset& dataset) {
  if (dataset.response.family == Family::gaussian)
    return dataset.response.values.array() + dataset.response.mean;
  return dataset.response.values;
}

// Everything a fold needs that does not depend on rho or lambda.
struct FoldData {
  std::vector<Matrix> train_views;  // standardized on training rows
  std::vector<Matrix> heldout_views;  // standardized with training stats
  Vector y_train_centered;
  double y_train_mean = 0.0;
  Vector y_heldout_raw;
};

FoldData make_fold_data(const MultiViewDataset& dataset,
                        const std::vector<Index>& train_rows,
                        const std::vector<Index>& heldout_rows) {
  FoldData fold;
  const Vector y_raw = raw_response(dataset);
  const Vector y_train = vector_subset(y_raw, train_rows);
  fold.y_train_mean = y_train.mean();
  fold.y_train_centered = y_train.array() - fold.y_train_mean;
  fold.y_heldout_raw = vector_subset(y_raw, heldout_rows);
  for (const auto& raw : dataset.raw_views) {
    DataView train_view{raw.name, rows_subset(raw.values, train_rows),
                        raw.column_names};
    StandardizedView std_view = standardize(train_view);
    fold.train_views.push_back(std_view.values);
    fold.heldout_views.push_back(apply_standardization(
        std_view, rows_subset(raw.values, heldout_rows)));
  }
  return fold;
}

// Held-out squared errors for one (fold, rho) pair across a lambda grid.
Vector heldout_errors(const FoldData& fold, double rho, const Vector& grid,
                      const PenaltySpec& spec,
                      const std::vector<ViewSpan>& blocks, double tol,
                      int max_sweeps) {
  AugmentedSystem sys =
      build_augmented(fold.train_views, fold.y_train_centered, rho);
  PathResult path =
      fit_path(sys.x_tilde, sys.y_tilde, spec, grid, tol, max_sweeps);

  Vector errors(grid.size());
  const Index n_heldout = fold.y_heldout_raw.size();
  for (Index i = 0; i < grid.size(); ++i) {
    Vector pred = Vector::Constant(n_heldout, fold.y_train_mean);
    const Vector& beta = path.fits[static_cast<std::size_t>(i)].beta;
    for (std::size_t m = 0; m < fold.heldout_views.size(); ++m)
      pred.noalias() +=
          fold.heldout_views[m] * beta.segment(blocks[m].offset, blocks[m].cols);
    errors[i] = (fold.y_heldout_raw - pred).squaredNorm() /
                static_cast<double>(n_heldout);
  }
  return errors;
}

struct GridSelection {
  int rho_index = -1;
  int lambda_index = -1;
};

// Ties prefer smaller rho then larger lambda (grids are stored
// decreasing, so the smaller lambda index).
GridSelection select_cell(const Matrix& mean_error, const Matrix& sd_error,
                          SelectionRule rule, int k_folds) {
  GridSelection best;
  double best_value = std::numeric_limits<double>::infinity();
  for (Index r = 0; r < mean_error.rows(); ++r)
    for (Index l = 0; l < mean_error.cols(); ++l)
      if (mean_error(r, l) < best_value) {
        best_value = mean_error(r, l);
        best.rho_index = static_cast<int>(r);
        best.lambda_index = static_cast<int>(l);
      }
  if (rule == SelectionRule::min_error) return best;

  const double se = sd_error(best.rho_index, best.lambda_index) /
                    std::sqrt(static_cast<double>(k_folds));
  const double threshold = best_value + se;
  for (Index r = 0; r < mean_error.rows(); ++r)
    for (Index l = 0; l < mean_error.cols(); ++l)
      if (mean_error(r, l) <= threshold)
        return {static_cast<int>(r), static_cast<int>(l)};
  return best;
}

void validate_cv_options(const MultiViewDataset& dataset,
                         const CVOptions& opt) {
  if (dataset.response.family != Family::gaussian)
    throw InputError("cross-validation supports the gaussian family only");
  if (opt.rho_grid.size() == 0) throw InputError("rho grid is empty");
  if ((opt.rho_grid.array() < 0).any())
    throw InputError("rho grid entries must be nonnegative");
  if (opt.n_lambda < 1) throw InputError("n_lambda must be at least 1");
}

FoldPlan resolve_plan(const MultiViewDataset& dataset, const CVOptions& opt,
                      const FoldPlan* plan) {
  if (plan != nullptr) {
    if (plan->n != dataset.n())
      throw InputError("fold plan does not match dataset rows");
    return *plan;
  }
  return make_folds(dataset.n(), opt.k_folds, opt.seed);
}

}  // namespace

std::vector<Index> FoldPlan::held_out_rows(int fold) const {
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (assignments[static_cast<std::size_t>(i)] == fold) out.push_back(i);
  return out;
}

std::vector<Index> FoldPlan::training_rows(int fold) const {
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (assignments[static_cast<std::size_t>(i)] != fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("need at least 2 folds");
  if (static_cast<Index>(k) > n)
    throw InputError("more folds than rows");
  FoldPlan plan;
  plan.n = n;
  plan.k = k;
  plan.seed = seed;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);
  plan.assignments.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    plan.assignments[static_cast<std::size_t>(order[i])] =
        static_cast<int>(i % static_cast<std::size_t>(k));
  return plan;
}

CVResult cv_coop(const MultiViewDataset& dataset, const CVOptions& opt,
                 const FoldPlan* plan) {
  validate_cv_options(dataset, opt);
  const FoldPlan folds = resolve_plan(dataset, opt, plan);
  const Index n_rho = opt.rho_grid.size();

  std::vector<Matrix> std_views;
  for (const auto& v : dataset.views) std_views.push_back(v.values);

  PenaltySpec spec;
  spec.alpha = opt.alpha;
  if (!opt.penalty_factors.empty()) {
    Index total = dataset.total_cols();
    spec.penalty_factors.resize(total);
    Index at = 0;
    for (const auto& pf : opt.penalty_factors) {
      spec.penalty_factors.segment(at, pf.size()) = pf;
      at += pf.size();
    }
  }

  CVResult result;
  result.rho_grid = opt.rho_grid;
  result.rule = opt.rule;
  result.folds = folds;
  result.seed = folds.seed;

  // Shared per-rho grids from the full-data stacked system.
  for (Index r = 0; r < n_rho; ++r) {
    AugmentedSystem sys = build_augmented(dataset, opt.rho_grid[r]);
    result.lambda_grids.push_back(lambda_grid(sys.x_tilde, sys.y_tilde, spec,
                                              opt.n_lambda, opt.min_ratio));
  }

  std::vector<FoldData> fold_data(static_cast<std::size_t>(folds.k));
  parallel_for(static_cast<std::size_t>(folds.k), opt.threads,
               [&](std::size_t f) {
                 const int fold = static_cast<int>(f);
                 fold_data[f] = make_fold_data(dataset,
                                               folds.training_rows(fold),
                                               folds.held_out_rows(fold));
               });

  const std::vector<ViewSpan> blocks = build_augmented(dataset, 0.0).blocks;
  // errors[r] is k x n_lambda.
  std::vector<Matrix> errors(static_cast<std::size_t>(n_rho),
                             Matrix(folds.k, opt.n_lambda));
  for (Index r = 0; r < n_rho; ++r) {
    parallel_for(static_cast<std::size_t>(folds.k), opt.threads,
                 [&](std::size_t f) {
                   errors[static_cast<std::size_t>(r)].row(
                       static_cast<Index>(f)) =
                       heldout_errors(fold_data[f], opt.rho_grid[r],
                                      result.lambda_grids[
                                          static_cast<std::size_t>(r)],
                                      spec, blocks, opt.tol, opt.max_sweeps)
                           .transpose();
                 });
  }

  result.mean_error.resize(n_rho, opt.n_lambda);
  result.sd_error.resize(n_rho, opt.n_lambda);
  for (Index r = 0; r < n_rho; ++r)
    for (Index l = 0; l < opt.n_lambda; ++l) {
      const Vector cell = errors[static_cast<std::size_t>(r)].col(l);
      const double mean = cell.mean();
      result.mean_error(r, l) = mean;
      result.sd_error(r, l) = folds.k > 1
          ? std::sqrt((cell.array() - mean).square().sum() / (folds.k - 1))
          : 0.0;
    }

  const GridSelection sel =
      select_cell(result.mean_error, result.sd_error, opt.rule, folds.k);
  result.selected_rho_index = sel.rho_index;
  result.selected_lambda_index = sel.lambda_index;
  result.selected_rho = opt.rho_grid[sel.rho_index];
  result.selected_lambda =
      result.lambda_grids[static_cast<std::size_t>(sel.rho_index)]
                         [sel.lambda_index];

  std::vector<Vector> pf_per_view;
  if (!opt.penalty_factors.empty()) pf_per_view = opt.penalty_factors;
  const Vector refit_grid =
      result.lambda_grids[static_cast<std::size_t>(sel.rho_index)].head(
          sel.lambda_index + 1);
  CoopPath refit = coop_direct_fit(dataset, result.selected_rho, refit_grid,
                                   opt.alpha, pf_per_view, nullptr, opt.tol,
                                   opt.max_sweeps);
  result.fit = refit.fits.back();
  return result;
}

SingleViewCV cv_lasso_single(const DataView& raw, const Vector& raw_y,
                             const FoldPlan& folds, int n_lambda,
                             double min_ratio, double alpha, double tol,
                             int max_sweeps) {
  if (raw.rows() != raw_y.size())
    throw InputError("cv_lasso_single: row count mismatch");
  SingleViewCV out;

  const StandardizedView full_std = standardize(raw);
  const double y_mean = raw_y.mean();
  const Vector y_centered = raw_y.array() - y_mean;

  PenaltySpec spec;
  spec.alpha = alpha;
  out.lambdas =
      lambda_grid(full_std.values, y_centered, spec, n_lambda, min_ratio);

  Matrix errors(folds.k, n_lambda);
  Matrix oof(raw.rows(), n_lambda);
  for (int fold = 0; fold < folds.k; ++fold) {
    const auto train_rows = folds.training_rows(fold);
    const auto heldout_rows = folds.held_out_rows(fold);
    DataView train_view{raw.name, rows_subset(raw.values, train_rows),
                        raw.column_names};
    const StandardizedView train_std = standardize(train_view);
    const Vector y_train = vector_subset(raw_y, train_rows);
    const double fold_mean = y_train.mean();
    const Vector y_train_centered = y_train.array() - fold_mean;
    const Matrix heldout_std = apply_standardization(
        train_std, rows_subset(raw.values, heldout_rows));
    const Vector y_heldout = vector_subset(raw_y, heldout_rows);

    PathResult path = fit_path(train_std.values, y_train_centered, spec,
                               out.lambdas, tol, max_sweeps);
    for (Index l = 0; l < out.lambdas.size(); ++l) {
      const Vector pred =
          (heldout_std * path.fits[static_cast<std::size_t>(l)].beta).array() +
          fold_mean;
      errors(fold, l) = (y_heldout - pred).squaredNorm() /
                        static_cast<double>(y_heldout.size());
      for (std::size_t i = 0; i < heldout_rows.size(); ++i)
        oof(heldout_rows[i], l) = pred[static_cast<Index>(i)];
    }
  }

  out.mean_error.resize(n_lambda);
  out.sd_error.resize(n_lambda);
  for (Index l = 0; l < out.lambdas.size(); ++l) {
    const Vector cell = errors.col(l);
    const double mean = cell.mean();
    out.mean_error[l] = mean;
    out.sd_error[l] = folds.k > 1
        ? std::sqrt((cell.array() - mean).square().sum() / (folds.k - 1))
        : 0.0;
  }

  out.selected_index = 0;
  for (Index l = 1; l < out.lambdas.size(); ++l)
    if (out.mean_error[l] < out.mean_error[out.selected_index])
      out.selected_index = static_cast<int>(l);
  out.selected_lambda = out.lambdas[out.selected_index];
  out.oof_predictions = oof.col(out.selected_index);
  out.intercept = y_mean;

  PathResult refit =
      fit_path(full_std.values, y_centered, spec,
               out.lambdas.head(out.selected_index + 1), tol, max_sweeps);
  out.beta = refit.fits.back().beta;
  return out;
}

LateFusionFit late_fusion_fit(const MultiViewDataset& dataset,
                              const CVOptions& opt, const FoldPlan* plan) {
  if (dataset.response.family != Family::gaussian)
    throw InputError("late_fusion_fit supports the gaussian family only");
  const FoldPlan folds = resolve_plan(dataset, opt, plan);
  const Vector y_raw = raw_response(dataset);
  const std::size_t n_views = dataset.n_views();

  LateFusionFit out;
  out.lambda_per_view.resize(static_cast<Index>(n_views));
  Matrix oof(dataset.n(), static_cast<Index>(n_views) + 1);
  oof.col(0).setOnes();
  for (std::size_t m = 0; m < n_views; ++m) {
    SingleViewCV cv =
        cv_lasso_single(dataset.raw_views[m], y_raw, folds, opt.n_lambda,
                        opt.min_ratio, opt.alpha, opt.tol, opt.max_sweeps);
    out.view_names.push_back(dataset.views[m].name);
    out.per_view_thetas.push_back(cv.beta);
    out.lambda_per_view[static_cast<Index>(m)] = cv.selected_lambda;
    oof.col(static_cast<Index>(m) + 1) = cv.oof_predictions;
  }

  // Least-norm least squares keeps degenerate prediction sets (identical
  // views, constant predictions) well defined.
  const Vector solution =
      oof.completeOrthogonalDecomposition().solve(y_raw);
  const double combiner_intercept = solution[0];
  out.weights = solution.tail(static_cast<Index>(n_views));

  out.combined.view_names = out.view_names;
  out.combined.family = Family::gaussian;
  out.combined.algorithm = CoopAlgorithm::direct;
  out.combined.rho = 0.0;
  out.combined.alpha = opt.alpha;
  out.combined.lambda_per_view = out.lambda_per_view;
  for (std::size_t m = 0; m < n_views; ++m)
    out.combined.thetas.push_back(out.weights[static_cast<Index>(m)] *
                                  out.per_view_thetas[m]);
  // Each per-view predictor carries the full-data response mean; fold the
  // combiner intercept and those means into one constant.
  out.intercept = combiner_intercept + out.weights.sum() * y_raw.mean();
  out.combined.intercept = out.intercept;
  Vector fitted = Vector::Constant(dataset.n(), out.combined.intercept);
  for (std::size_t m = 0; m < n_views; ++m)
    fitted += dataset.views[m].values * out.combined.thetas[m];
  out.combined.objective = (y_raw - fitted).squaredNorm() / 2.0;
  return out;
}

AdaptiveState adaptive_one_at_a_time(const MultiViewDataset& dataset,
                                     double rho, const FoldPlan& folds,
                                     const AdaptiveOptions& opt,
                                     bool swapped) {
  if (dataset.n_views() != 2)
    throw InputError("adaptive_one_at_a_time needs exactly two views");
  if (dataset.response.family != Family::gaussian)
    throw InputError("adaptive_one_at_a_time supports gaussian only");
  if (rho < 0) throw InputError("rho must be nonnegative");

  const std::size_t first = swapped ? 1 : 0;
  const std::size_t second = 1 - first;
  const Vector& y = dataset.response.values;
  const double denom = 1.0 + rho;

  // Per-view, per-fold standardized matrices; targets change per
  // iteration but these do not.
  struct SideFolds {
    std::vector<Matrix> train;
    std::vector<Matrix> heldout;
  };
  std::array<SideFolds, 2> side_folds;
  for (std::size_t m = 0; m < 2; ++m) {
    for (int fold = 0; fold < folds.k; ++fold) {
      const auto train_rows = folds.training_rows(fold);
      const auto heldout_rows = folds.held_out_rows(fold);
      DataView train_view{dataset.raw_views[m].name,
                          rows_subset(dataset.raw_views[m].values, train_rows),
                          dataset.raw_views[m].column_names};
      const StandardizedView train_std = standardize(train_view);
      side_folds[m].train.push_back(train_std.values);
      side_folds[m].heldout.push_back(apply_standardization(
          train_std, rows_subset(dataset.raw_views[m].values, heldout_rows)));
    }
  }

  PenaltySpec spec;  // pure l1 in the alternating subproblems
  std::array<Vector, 2> thetas{Vector::Zero(dataset.views[0].cols()),
                               Vector::Zero(dataset.views[1].cols())};
  std::array<Vector, 2> fitted{Vector::Zero(y.size()), Vector::Zero(y.size())};
  std::array<double, 2> lambdas{0.0, 0.0};
  std::array<double, 2> cv_errors{0.0, 0.0};

  AdaptiveState state;
  state.rho = rho;
  state.swapped = swapped;

  auto joint_objective = [&]() {
    double value = (y - fitted[0] - fitted[1]).squaredNorm() / 2.0 +
                   rho / 2.0 * (fitted[0] - fitted[1]).squaredNorm();
    for (std::size_t m = 0; m < 2; ++m)
      if (std::isfinite(lambdas[m]))
        value += (1.0 + rho) * lambdas[m] * thetas[m].lpNorm<1>();
    return value;
  };

  double obj = joint_objective();
  bool converged = false;
  for (int iter = 0; iter < opt.max_iter && !converged; ++iter) {
    for (const std::size_t m : {first, second}) {
      const std::size_t other = 1 - m;
      const Vector target = (y - (1.0 - rho) * fitted[other]) / denom;
      const Matrix& x_full = dataset.views[m].values;

      Vector grid;
      bool degenerate = false;
      try {
        grid = lambda_grid(x_full, target, spec, opt.n_lambda, opt.min_ratio);
      } catch (const NumericError&) {
        degenerate = true;
      }

      if (degenerate) {
        // Partial residual carries no penalized signal; record a zero fit.
        state.degenerate_target = true;
        thetas[m].setZero();
        fitted[m].setZero();
        lambdas[m] = std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (int fold = 0; fold < folds.k; ++fold) {
          const auto train_rows = folds.training_rows(fold);
          const auto heldout_rows = folds.held_out_rows(fold);
          const Vector t_train = vector_subset(target, train_rows);
          const Vector t_heldout = vector_subset(target, heldout_rows);
          err += (t_heldout.array() - t_train.mean()).square().mean();
        }
        cv_errors[m] = err / folds.k;
        continue;
      }

      Matrix errors(folds.k, grid.size());
      for (int fold = 0; fold < folds.k; ++fold) {
        const auto train_rows = folds.training_rows(fold);
        const auto heldout_rows = folds.held_out_rows(fold);
        const Vector t_train = vector_subset(target, train_rows);
        const double t_mean = t_train.mean();
        const Vector t_centered = t_train.array() - t_mean;
        const Vector t_heldout = vector_subset(target, heldout_rows);
        PathResult path =
            fit_path(side_folds[m].train[static_cast<std::size_t>(fold)],
                     t_centered, spec, grid, opt.tol, opt.max_sweeps);
        for (Index l = 0; l < grid.size(); ++l) {
          const Vector pred =
              (side_folds[m].heldout[static_cast<std::size_t>(fold)] *
               path.fits[static_cast<std::size_t>(l)].beta)
                  .array() +
              t_mean;
          errors(fold, l) = (t_heldout - pred).squaredNorm() /
                            static_cast<double>(t_heldout.size());
        }
      }

      int best = 0;
      Vector mean_errors(grid.size());
      for (Index l = 0; l < grid.size(); ++l) {
        mean_errors[l] = errors.col(l).mean();
        if (mean_errors[l] < mean_errors[best]) best = static_cast<int>(l);
      }
      lambdas[m] = grid[best];
      cv_errors[m] = mean_errors[best];

      PathResult refit = fit_path(x_full, target, spec, grid.head(best + 1),
                                  opt.tol, opt.max_sweeps);
      thetas[m] = refit.fits.back().beta;
      fitted[m] = x_full * thetas[m];
    }

    ++state.n_iter;
    const double updated = joint_objective();
    if (std::abs(obj - updated) <= opt.obj_tol * (1.0 + std::abs(updated)))
      converged = true;
    obj = updated;
  }

  state.lambda_x = lambdas[0];
  state.lambda_z = lambdas[1];
  state.cv_error_x = cv_errors[0];
  state.cv_error_z = cv_errors[1];
  state.cv_error_sum = cv_errors[0] + cv_errors[1];

  double ratio;
  if (std::isinf(state.lambda_x) && std::isinf(state.lambda_z)) {
    ratio = 1.0;
  } else if (std::isinf(state.lambda_x)) {
    ratio = 0.0;  // clamp below
  } else if (std::isinf(state.lambda_z) || state.lambda_x == 0.0) {
    ratio = std::numeric_limits<double>::infinity();
  } else {
    ratio = state.lambda_z / state.lambda_x;
  }
  const double clamped = std::clamp(ratio, 1e-6, 1e6);
  state.ratio_clamped = clamped != ratio;
  state.penalty_ratio = clamped;
  return state;
}

CVResult adaptive_direct(const MultiViewDataset& dataset, const CVOptions& opt,
                         const AdaptiveOptions& adaptive_opt,
                         const FoldPlan* plan) {
  validate_cv_options(dataset, opt);
  if (dataset.n_views() != 2)
    throw InputError("adaptive_direct needs exactly two views");
  const FoldPlan folds = resolve_plan(dataset, opt, plan);
  const Index n_rho = opt.rho_grid.size();

  CVResult result;
  result.rho_grid = opt.rho_grid;
  result.rule = opt.rule;
  result.folds = folds;
  result.seed = folds.seed;
  result.mean_error.resize(n_rho, opt.n_lambda);
  result.sd_error.resize(n_rho, opt.n_lambda);

  std::vector<FoldData> fold_data(static_cast<std::size_t>(folds.k));
  parallel_for(static_cast<std::size_t>(folds.k), opt.threads,
               [&](std::size_t f) {
                 const int fold = static_cast<int>(f);
                 fold_data[f] = make_fold_data(dataset,
                                               folds.training_rows(fold),
                                               folds.held_out_rows(fold));
               });
  const std::vector<ViewSpan> blocks = build_augmented(dataset, 0.0).blocks;

  std::vector<std::vector<Vector>> pf_per_rho;
  for (Index r = 0; r < n_rho; ++r) {
    const double rho = opt.rho_grid[r];
    AdaptiveState forward =
        adaptive_one_at_a_time(dataset, rho, folds, adaptive_opt, false);
    AdaptiveState reversed =
        adaptive_one_at_a_time(dataset, rho, folds, adaptive_opt, true);
    AdaptiveState state =
        reversed.cv_error_sum < forward.cv_error_sum ? reversed : forward;
    const double clamped = state.penalty_ratio;
    result.adaptive_states.push_back(state);

    std::vector<Vector> pf{Vector::Ones(dataset.views[0].cols()),
                           Vector::Constant(dataset.views[1].cols(), clamped)};
    pf_per_rho.push_back(pf);

    PenaltySpec spec;
    spec.alpha = opt.alpha;
    spec.penalty_factors = Vector(dataset.total_cols());
    spec.penalty_factors.head(pf[0].size()) = pf[0];
    spec.penalty_factors.tail(pf[1].size()) = pf[1];

    AugmentedSystem sys = build_augmented(dataset, rho);
    result.lambda_grids.push_back(lambda_grid(sys.x_tilde, sys.y_tilde, spec,
                                              opt.n_lambda, opt.min_ratio));

    Matrix errors(folds.k, opt.n_lambda);
    parallel_for(static_cast<std::size_t>(folds.k), opt.threads,
                 [&](std::size_t f) {
                   errors.row(static_cast<Index>(f)) =
                       heldout_errors(fold_data[f], rho,
                                      result.lambda_grids.back(), spec,
                                      blocks, opt.tol, opt.max_sweeps)
                           .transpose();
                 });
    for (Index l = 0; l < opt.n_lambda; ++l) {
      const Vector cell = errors.col(l);
      const double mean = cell.mean();
      result.mean_error(r, l) = mean;
      result.sd_error(r, l) = folds.k > 1
          ? std::sqrt((cell.array() - mean).square().sum() / (folds.k - 1))
          : 0.0;
    }
  }

  const GridSelection sel =
      select_cell(result.mean_error, result.sd_error, opt.rule, folds.k);
  result.selected_rho_index = sel.rho_index;
  result.selected_lambda_index = sel.lambda_index;
  result.selected_rho = opt.rho_grid[sel.rho_index];
  result.selected_lambda =
      result.lambda_grids[static_cast<std::size_t>(sel.rho_index)]
                         [sel.lambda_index];

  const Vector refit_grid =
      result.lambda_grids[static_cast<std::size_t>(sel.rho_index)].head(
          sel.lambda_index + 1);
  CoopPath refit = coop_direct_fit(
      dataset, result.selected_rho, refit_grid, opt.alpha,
      pf_per_rho[static_cast<std::size_t>(sel.rho_index)], nullptr, opt.tol,
      opt.max_sweeps);
  result.fit = refit.fits.back();
  return result;
}

}  // namespace coop
