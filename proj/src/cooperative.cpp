#include "coop/cooperative.hpp"

#include <cassert>
#include <cmath>

namespace coop {

namespace {

void check_views(const std::vector<Matrix>& views) {
  if (views.empty()) throw InputError("need at least one view");
  for (std::size_t m = 1; m < views.size(); ++m)
    if (views[m].rows() != views[0].rows())
      throw InputError("views have mismatched row counts");
}

std::vector<Matrix> standardized_matrices(const MultiViewDataset& dataset) {
  std::vector<Matrix> out;
  out.reserve(dataset.n_views());
  for (const auto& v : dataset.views) out.push_back(v.values);
  return out;
}

std::vector<std::string> view_names(const MultiViewDataset& dataset) {
  std::vector<std::string> out;
  out.reserve(dataset.n_views());
  for (const auto& v : dataset.views) out.push_back(v.name);
  return out;
}

Vector concat_penalty_factors(const std::vector<Matrix>& views,
                              const std::vector<Vector>& per_view) {
  Index total = 0;
  for (const auto& v : views) total += v.cols();
  if (per_view.empty()) return Vector();
  if (per_view.size() != views.size())
    throw InputError("penalty factor blocks do not match view count");
  Vector out(total);
  Index at = 0;
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (per_view[m].size() != views[m].cols())
      throw InputError("penalty factor length mismatch in view " +
                       std::to_string(m));
    out.segment(at, per_view[m].size()) = per_view[m];
    at += per_view[m].size();
  }
  return out;
}

void check_pairs(const PairPenalty& pairs, const std::vector<ViewSpan>& blocks,
                 const std::vector<Matrix>& views) {
  if (pairs.rho2 < 0) throw InputError("rho2 must be nonnegative");
  for (const auto& pr : pairs.pairs) {
    if (pr.view_a >= blocks.size() || pr.view_b >= blocks.size())
      throw InputError("paired penalty names an unknown view");
    if (pr.col_a < 0 || pr.col_a >= views[pr.view_a].cols() ||
        pr.col_b < 0 || pr.col_b >= views[pr.view_b].cols())
      throw InputError("paired penalty column out of range");
  }
}

}  // namespace

AugmentedSystem build_augmented(const std::vector<Matrix>& views,
                                const Vector& y, double rho,
                                const std::vector<std::string>& names) {
  check_views(views);
  if (views[0].rows() != y.size())
    throw InputError("response length does not match view rows");
  if (rho < 0) throw InputError("rho must be nonnegative");
  if (!names.empty() && names.size() != views.size())
    throw InputError("names length does not match view count");

  const std::size_t n_views = views.size();
  const Index n = y.size();
  const std::size_t n_pairs = n_views * (n_views - 1) / 2;
  const double root_rho = std::sqrt(rho);

  AugmentedSystem sys;
  sys.rho = rho;
  sys.n_obs = n;

  Index total_cols = 0;
  for (std::size_t m = 0; m < n_views; ++m) {
    ViewSpan span;
    span.name = names.empty() ? "view" + std::to_string(m + 1) : names[m];
    span.offset = total_cols;
    span.cols = views[m].cols();
    total_cols += span.cols;
    sys.blocks.push_back(span);
  }

  const Index total_rows = n + static_cast<Index>(n_pairs) * n;
  sys.x_tilde = Matrix::Zero(total_rows, total_cols);
  sys.y_tilde = Vector::Zero(total_rows);
  sys.y_tilde.head(n) = y;
  for (std::size_t m = 0; m < n_views; ++m)
    sys.x_tilde.block(0, sys.blocks[m].offset, n, sys.blocks[m].cols) =
        views[m];

  Index row = n;
  for (std::size_t a = 0; a + 1 < n_views; ++a) {
    for (std::size_t b = a + 1; b < n_views; ++b) {
      sys.x_tilde.block(row, sys.blocks[a].offset, n, sys.blocks[a].cols) =
          -root_rho * views[a];
      sys.x_tilde.block(row, sys.blocks[b].offset, n, sys.blocks[b].cols) =
          root_rho * views[b];
      sys.contrasts.push_back({a, b, row, n});
      row += n;
    }
  }
  return sys;
}

AugmentedSystem build_augmented(const MultiViewDataset& dataset, double rho) {
  return build_augmented(standardized_matrices(dataset),
                         dataset.response.values, rho, view_names(dataset));
}

AugmentedSystem add_paired_rows(AugmentedSystem system,
                                const PairPenalty& pairs) {
  std::vector<Matrix> dummy;
  for (const auto& span : system.blocks)
    dummy.emplace_back(Matrix::Zero(0, span.cols));
  check_pairs(pairs, system.blocks, dummy);

  const Index old_rows = system.x_tilde.rows();
  const Index extra = static_cast<Index>(pairs.pairs.size());
  system.x_tilde.conservativeResize(old_rows + extra, Eigen::NoChange);
  system.y_tilde.conservativeResize(old_rows + extra);
  system.x_tilde.bottomRows(extra).setZero();
  system.y_tilde.tail(extra).setZero();

  const double root = std::sqrt(pairs.rho2);
  for (Index i = 0; i < extra; ++i) {
    const auto& pr = pairs.pairs[static_cast<std::size_t>(i)];
    system.x_tilde(old_rows + i, system.blocks[pr.view_a].offset + pr.col_a) =
        root;
    system.x_tilde(old_rows + i, system.blocks[pr.view_b].offset + pr.col_b) =
        -root;
  }
  system.n_pair_rows += extra;
  return system;
}

double coop_objective(const std::vector<Matrix>& views, const Vector& y,
                      const std::vector<Vector>& thetas, double rho,
                      const Vector& lambda_per_view, double alpha,
                      const std::vector<Vector>& penalty_factors,
                      const PairPenalty* pairs) {
  check_views(views);
  if (thetas.size() != views.size())
    throw InputError("theta blocks do not match view count");
  if (lambda_per_view.size() != static_cast<Index>(views.size()))
    throw InputError("lambda_per_view length does not match view count");

  std::vector<Vector> fitted(views.size());
  Vector total = Vector::Zero(y.size());
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (thetas[m].size() != views[m].cols())
      throw InputError("theta length mismatch in view " + std::to_string(m));
    fitted[m] = views[m] * thetas[m];
    total += fitted[m];
  }

  double value = (y - total).squaredNorm() / 2.0;
  for (std::size_t a = 0; a + 1 < views.size(); ++a)
    for (std::size_t b = a + 1; b < views.size(); ++b)
      value += rho / 2.0 * (fitted[a] - fitted[b]).squaredNorm();

  for (std::size_t m = 0; m < views.size(); ++m) {
    const Vector pf = penalty_factors.empty()
                          ? Vector::Ones(thetas[m].size())
                          : penalty_factors[m];
    if (pf.size() != thetas[m].size())
      throw InputError("penalty factor length mismatch in view " +
                       std::to_string(m));
    double pen = 0.0;
    for (Index j = 0; j < thetas[m].size(); ++j)
      pen += pf[j] * (alpha * std::abs(thetas[m][j]) +
                      (1.0 - alpha) * thetas[m][j] * thetas[m][j] / 2.0);
    value += lambda_per_view[static_cast<Index>(m)] * pen;
  }

  if (pairs != nullptr) {
    for (const auto& pr : pairs->pairs) {
      const double gap = thetas[pr.view_a][pr.col_a] - thetas[pr.view_b][pr.col_b];
      value += pairs->rho2 / 2.0 * gap * gap;
    }
  }
  return value;
}

double coop_objective(const MultiViewDataset& dataset,
                      const std::vector<Vector>& thetas, double rho,
                      const Vector& lambda_per_view, double alpha,
                      const std::vector<Vector>& penalty_factors,
                      const PairPenalty* pairs) {
  return coop_objective(standardized_matrices(dataset),
                        dataset.response.values, thetas, rho, lambda_per_view,
                        alpha, penalty_factors, pairs);
}

CoopPath coop_direct_fit(const MultiViewDataset& dataset, double rho,
                         const Vector& lambdas, double alpha,
                         const std::vector<Vector>& penalty_factors,
                         const PairPenalty* pairs, double tol,
                         int max_sweeps) {
  if (dataset.response.family != Family::gaussian)
    throw InputError("coop_direct_fit handles the gaussian family only");
  const std::vector<Matrix> views = standardized_matrices(dataset);

  AugmentedSystem sys = build_augmented(dataset, rho);
  if (pairs != nullptr) sys = add_paired_rows(std::move(sys), *pairs);

  PenaltySpec spec;
  spec.alpha = alpha;
  spec.penalty_factors = concat_penalty_factors(views, penalty_factors);

  PathResult path =
      fit_path(sys.x_tilde, sys.y_tilde, spec, lambdas, tol, max_sweeps);

  CoopPath out;
  out.lambdas = lambdas;
  out.fits.reserve(path.fits.size());
  for (Index i = 0; i < lambdas.size(); ++i) {
    const Vector& beta = path.fits[static_cast<std::size_t>(i)].beta;
    CoopFit fit;
    fit.view_names = view_names(dataset);
    fit.rho = rho;
    fit.lambda_per_view =
        Vector::Constant(static_cast<Index>(views.size()), lambdas[i]);
    fit.alpha = alpha;
    fit.intercept = dataset.response.mean;
    fit.n_iter = path.fits[static_cast<std::size_t>(i)].sweeps;
    fit.converged = path.fits[static_cast<std::size_t>(i)].converged;
    fit.algorithm = CoopAlgorithm::direct;

    std::vector<int> df;
    for (const auto& span : sys.blocks) {
      fit.thetas.push_back(beta.segment(span.offset, span.cols));
      df.push_back(
          static_cast<int>((fit.thetas.back().array() != 0.0).count()));
    }
    fit.objective = coop_objective(views, dataset.response.values, fit.thetas,
                                   rho, fit.lambda_per_view, alpha,
                                   penalty_factors, pairs);
    out.df_per_view.push_back(std::move(df));
    out.fits.push_back(std::move(fit));
  }
  return out;
}

Vector LassoViewFitter::fit(const Matrix& x, const Vector& target,
                            double penalty_scale) {
  PenaltySpec spec;
  spec.lambda = lambda_ * penalty_scale;
  spec.alpha = alpha_;
  spec.penalty_factors = penalty_factors_;
  const Vector* warm = warm_.size() == x.cols() ? &warm_ : nullptr;
  Coefs fit = coordinate_descent(x, target, spec, warm, tol_, max_sweeps_);
  warm_ = fit.beta;
  return fit.beta;
}

CoopFit coop_iterative_fit(const MultiViewDataset& dataset, double rho,
                           const Vector& lambda_per_view,
                           const std::vector<ViewFitter*>& fitters,
                           double tol, int max_iter, double alpha) {
  if (dataset.response.family != Family::gaussian)
    throw InputError("coop_iterative_fit handles the gaussian family only");
  if (rho < 0) throw InputError("rho must be nonnegative");
  const std::size_t n_views = dataset.n_views();
  if (fitters.size() != n_views)
    throw InputError("fitter count does not match view count");
  if (lambda_per_view.size() != static_cast<Index>(n_views))
    throw InputError("lambda_per_view length does not match view count");

  const std::vector<Matrix> views = standardized_matrices(dataset);
  const Vector& y = dataset.response.values;
  const double denom = 1.0 + (static_cast<double>(n_views) - 1.0) * rho;

  CoopFit fit;
  fit.view_names = view_names(dataset);
  fit.rho = rho;
  fit.lambda_per_view = lambda_per_view;
  fit.alpha = alpha;
  fit.intercept = dataset.response.mean;
  fit.algorithm = CoopAlgorithm::one_at_a_time;
  fit.thetas.assign(n_views, Vector());
  for (std::size_t m = 0; m < n_views; ++m)
    fit.thetas[m] = Vector::Zero(views[m].cols());

  std::vector<Vector> fitted(n_views, Vector::Zero(y.size()));
  Vector total = Vector::Zero(y.size());

  auto objective = [&]() {
    return coop_objective(views, y, fit.thetas, rho, lambda_per_view, alpha);
  };

  double obj = objective();
  fit.converged = false;
  for (int iter = 0; iter < max_iter && !fit.converged; ++iter) {
    const double cycle_start_obj = obj;
    for (std::size_t m = 0; m < n_views; ++m) {
      const Vector partial = total - fitted[m];
      const Vector target = (y - (1.0 - rho) * partial) / denom;
      fit.thetas[m] = fitters[m]->fit(views[m], target, 1.0 / denom);
      fitted[m] = views[m] * fit.thetas[m];
      total = partial + fitted[m];

      const double updated = objective();
      if (updated > obj + 1e-9 * (1.0 + std::abs(obj)))
        ++fit.monotonicity_violations;
      assert(updated <= obj + 1e-7 * (1.0 + std::abs(obj)));
      obj = updated;
    }
    ++fit.n_iter;
    if (std::abs(cycle_start_obj - obj) <= tol * (1.0 + std::abs(obj)))
      fit.converged = true;
  }
  fit.objective = obj;
  return fit;
}

CoopFit coop_iterative_fit(const MultiViewDataset& dataset, double rho,
                           const Vector& lambda_per_view, double tol,
                           int max_iter, double alpha, double cd_tol,
                           int cd_max_sweeps) {
  std::vector<std::unique_ptr<LassoViewFitter>> owned;
  std::vector<ViewFitter*> fitters;
  for (Index m = 0; m < lambda_per_view.size(); ++m) {
    owned.push_back(std::make_unique<LassoViewFitter>(
        lambda_per_view[m], alpha, Vector(), cd_tol, cd_max_sweeps));
    fitters.push_back(owned.back().get());
  }
  return coop_iterative_fit(dataset, rho, lambda_per_view, fitters, tol,
                            max_iter, alpha);
}

Vector predict_with_stats(const CoopFit& fit,
                          const std::vector<Vector>& column_means,
                          const std::vector<Vector>& column_sds,
                          const std::vector<Matrix>& raw_views) {
  if (raw_views.size() != fit.thetas.size())
    throw InputError("predict: view count mismatch");
  if (column_means.size() != raw_views.size() ||
      column_sds.size() != raw_views.size())
    throw InputError("predict: standardization stats mismatch");
  if (raw_views.empty()) throw InputError("predict: no views");

  const Index n = raw_views[0].rows();
  Vector eta = Vector::Constant(n, fit.intercept);
  for (std::size_t m = 0; m < raw_views.size(); ++m) {
    if (raw_views[m].rows() != n)
      throw InputError("predict: views have mismatched row counts");
    if (raw_views[m].cols() != fit.thetas[m].size())
      throw InputError("predict: column count mismatch in view " +
                       std::to_string(m));
    for (Index j = 0; j < raw_views[m].cols(); ++j) {
      const double scaled_coef = fit.thetas[m][j] / column_sds[m][j];
      eta.array() += (raw_views[m].col(j).array() - column_means[m][j]) *
                     scaled_coef;
    }
  }
  if (fit.family == Family::binomial)
    return (1.0 + (-eta.array()).exp()).inverse();
  return eta;
}

Vector predict(const CoopFit& fit, const MultiViewDataset& train,
               const std::vector<Matrix>& raw_views) {
  std::vector<Vector> means, sds;
  for (const auto& v : train.views) {
    means.push_back(v.column_means);
    sds.push_back(v.column_sds);
  }
  return predict_with_stats(fit, means, sds, raw_views);
}

double paired_discrepancy(const CoopFit& fit, const PairPenalty& pairs) {
  double total = 0.0;
  for (const auto& pr : pairs.pairs) {
    if (pr.view_a >= fit.thetas.size() || pr.view_b >= fit.thetas.size())
      throw InputError("paired_discrepancy: unknown view index");
    const double gap =
        fit.thetas[pr.view_a][pr.col_a] - fit.thetas[pr.view_b][pr.col_b];
    total += gap * gap;
  }
  return total;
}

double agreement_term(const MultiViewDataset& dataset,
                      const std::vector<Vector>& thetas) {
  const std::vector<Matrix> views = standardized_matrices(dataset);
  std::vector<Vector> fitted(views.size());
  for (std::size_t m = 0; m < views.size(); ++m)
    fitted[m] = views[m] * thetas[m];
  double total = 0.0;
  for (std::size_t a = 0; a + 1 < views.size(); ++a)
    for (std::size_t b = a + 1; b < views.size(); ++b)
      total += (fitted[a] - fitted[b]).squaredNorm();
  return total;
}

}  // namespace coop
