#include "coop/elastic_net.hpp"

#include <cassert>
#include <cmath>

namespace coop {

namespace {

Vector resolve_penalty_factors(const PenaltySpec& spec, Index p) {
  if (spec.penalty_factors.size() == 0) return Vector::Ones(p);
  if (spec.penalty_factors.size() != p)
    throw InputError("penalty_factors length " +
                     std::to_string(spec.penalty_factors.size()) +
                     " does not match column count " + std::to_string(p));
  if ((spec.penalty_factors.array() < 0).any())
    throw InputError("penalty_factors must be nonnegative");
  return spec.penalty_factors;
}

void validate_inputs(const Matrix& x, const Vector& y,
                     const PenaltySpec& spec) {
  if (x.rows() != y.size())
    throw InputError("design has " + std::to_string(x.rows()) +
                     " rows, response has " + std::to_string(y.size()));
  if (x.cols() == 0) throw InputError("design has no columns");
  if (spec.lambda < 0) throw InputError("lambda must be nonnegative");
  if (spec.alpha < 0 || spec.alpha > 1)
    throw InputError("alpha must lie in [0, 1]");
}

}  // namespace

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

double elastic_net_objective(const Matrix& x, const Vector& y,
                             const Vector& beta, const PenaltySpec& spec) {
  const Vector pf = resolve_penalty_factors(spec, x.cols());
  const double rss = (y - x * beta).squaredNorm() / 2.0;
  double penalty = 0.0;
  for (Index j = 0; j < beta.size(); ++j)
    penalty += pf[j] * (spec.alpha * std::abs(beta[j]) +
                        (1.0 - spec.alpha) * beta[j] * beta[j] / 2.0);
  return rss + spec.lambda * penalty;
}

double kkt_violation(const Matrix& x, const Vector& y, const Vector& beta,
                     const PenaltySpec& spec) {
  const Vector pf = resolve_penalty_factors(spec, x.cols());
  const Vector grad = x.transpose() * (y - x * beta);
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double l1 = spec.lambda * pf[j] * spec.alpha;
    const double l2 = spec.lambda * pf[j] * (1.0 - spec.alpha);
    double viol;
    if (beta[j] != 0.0) {
      viol = std::abs(grad[j] - l2 * beta[j] -
                      l1 * (beta[j] > 0 ? 1.0 : -1.0));
    } else {
      viol = std::max(0.0, std::abs(grad[j]) - l1);
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

Coefs coordinate_descent(const Matrix& x, const Vector& y,
                         const PenaltySpec& spec, const Vector* warm,
                         double tol, int max_sweeps) {
  validate_inputs(x, y, spec);
  const Index p = x.cols();
  const Vector pf = resolve_penalty_factors(spec, p);

  Coefs out;
  if (warm != nullptr) {
    if (warm->size() != p)
      throw InputError("warm start length does not match column count");
    out.beta = *warm;
  } else {
    out.beta = Vector::Zero(p);
  }

  Vector col_sq(p);
  for (Index j = 0; j < p; ++j) col_sq[j] = x.col(j).squaredNorm();
  Vector residual = y - x * out.beta;

  const double gradient_scale = 1.0 + (x.transpose() * y).cwiseAbs().maxCoeff();
  const double kkt_tol = tol * gradient_scale;

#ifndef NDEBUG
  double prev_objective = elastic_net_objective(x, y, out.beta, spec);
#endif

  bool done = false;
  while (out.sweeps < max_sweeps && !done) {
    double max_change = 0.0;
    double max_beta = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double old = out.beta[j];
      const double denom = col_sq[j] + spec.lambda * pf[j] * (1.0 - spec.alpha);
      double updated = 0.0;
      if (denom > 0.0) {
        const double partial = x.col(j).dot(residual) + col_sq[j] * old;
        updated = soft_threshold(partial, spec.lambda * pf[j] * spec.alpha) /
                  denom;
      }
      if (updated != old) {
        residual.noalias() -= x.col(j) * (updated - old);
        out.beta[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
      max_beta = std::max(max_beta, std::abs(updated));
    }
    ++out.sweeps;

#ifndef NDEBUG
    {
      const double objective = elastic_net_objective(x, y, out.beta, spec);
      assert(objective <= prev_objective + 1e-10 * (1.0 + std::abs(prev_objective)));
      prev_objective = objective;
    }
#endif

    if (max_change < tol * (1.0 + max_beta)) {
      // Cheap criterion fired; accept only if the stationarity residual
      // agrees, otherwise keep sweeping.
      out.kkt_violation = kkt_violation(x, y, out.beta, spec);
      if (out.kkt_violation <= kkt_tol) done = true;
    }
  }

  out.converged = done;
  if (!done) out.kkt_violation = kkt_violation(x, y, out.beta, spec);
  out.objective = elastic_net_objective(x, y, out.beta, spec);
  return out;
}

Vector lambda_grid(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                   int n_lambda, double min_ratio) {
  validate_inputs(x, y, spec);
  if (n_lambda < 1) throw InputError("n_lambda must be at least 1");
  if (min_ratio <= 0 || min_ratio >= 1)
    throw InputError("min_ratio must lie in (0, 1)");
  const Vector pf = resolve_penalty_factors(spec, x.cols());
  const double alpha_eff = std::max(spec.alpha, 1e-3);

  double lambda_max = 0.0;
  bool any_penalized = false;
  for (Index j = 0; j < x.cols(); ++j) {
    if (pf[j] <= 0) continue;
    any_penalized = true;
    lambda_max =
        std::max(lambda_max, std::abs(x.col(j).dot(y)) / (alpha_eff * pf[j]));
  }
  if (!any_penalized) throw InputError("lambda_grid: no penalized columns");
  if (lambda_max <= 0)
    throw NumericError(
        "lambda_grid: degenerate response (all penalized gradients zero)");

  Vector grid(n_lambda);
  grid[0] = lambda_max;
  if (n_lambda == 1) return grid;
  const double log_step = std::log(min_ratio) / (n_lambda - 1);
  for (int i = 1; i < n_lambda; ++i)
    grid[i] = lambda_max * std::exp(log_step * i);
  return grid;
}

PathResult fit_path(const Matrix& x, const Vector& y, const PenaltySpec& spec,
                    const Vector& lambdas, double tol, int max_sweeps) {
  if (lambdas.size() == 0) throw InputError("fit_path: empty lambda grid");
  for (Index i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] > lambdas[i - 1])
      throw InputError("fit_path: lambda grid must be decreasing");

  PathResult out;
  out.lambdas = lambdas;
  out.fits.reserve(lambdas.size());
  out.df.reserve(lambdas.size());
  Vector warm = Vector::Zero(x.cols());
  for (Index i = 0; i < lambdas.size(); ++i) {
    PenaltySpec point = spec;
    point.lambda = lambdas[i];
    Coefs fit = coordinate_descent(x, y, point, &warm, tol, max_sweeps);
    warm = fit.beta;
    out.df.push_back(
        static_cast<int>((fit.beta.array() != 0.0).count()));
    out.fits.push_back(std::move(fit));
  }
  return out;
}

}  // namespace coop
