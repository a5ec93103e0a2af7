#include "coop/glm.hpp"

#include <cmath>

namespace coop {

namespace {

constexpr double kWeightFloor = 1e-5;

// log(1 + exp(eta)) - y*eta, summed; stable for large |eta|.
double negative_log_likelihood(const Vector& eta, const Vector& y01) {
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    const double e = eta[i];
    const double log1pexp =
        e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    total += log1pexp - y01[i] * e;
  }
  return total;
}

std::vector<Matrix> standardized_matrices(const MultiViewDataset& dataset) {
  std::vector<Matrix> out;
  for (const auto& v : dataset.views) out.push_back(v.values);
  return out;
}

}  // namespace

IRLSState irls_update(const Vector& eta, const Vector& y01, int iteration) {
  IRLSState state;
  state.eta = eta;
  state.iteration = iteration;
  state.mu = (1.0 + (-eta.array()).exp()).inverse();
  state.weights = (state.mu.array() * (1.0 - state.mu.array()))
                      .max(kWeightFloor);
  state.working_response =
      eta.array() + (y01.array() - state.mu.array()) / state.weights.array();
  state.deviance = 2.0 * negative_log_likelihood(eta, y01);
  return state;
}

AugmentedSystem build_weighted_augmented(const std::vector<Matrix>& views,
                                         const IRLSState& state, double rho,
                                         const std::vector<std::string>& names) {
  AugmentedSystem sys =
      build_augmented(views, state.working_response, rho, names);
  const Vector root_w = state.weights.array().sqrt();
  for (Index i = 0; i < sys.n_obs; ++i) {
    sys.x_tilde.row(i) *= root_w[i];
    sys.y_tilde[i] *= root_w[i];
  }
  return sys;
}

double coop_logistic_objective(const std::vector<Matrix>& views,
                               const Vector& y01,
                               const std::vector<Vector>& thetas,
                               double intercept, double rho, double lambda,
                               double alpha,
                               const std::vector<Vector>& penalty_factors) {
  if (thetas.size() != views.size())
    throw InputError("theta blocks do not match view count");
  std::vector<Vector> fitted(views.size());
  Vector eta = Vector::Constant(y01.size(), intercept);
  for (std::size_t m = 0; m < views.size(); ++m) {
    fitted[m] = views[m] * thetas[m];
    eta += fitted[m];
  }
  double value = negative_log_likelihood(eta, y01);
  for (std::size_t a = 0; a + 1 < views.size(); ++a)
    for (std::size_t b = a + 1; b < views.size(); ++b)
      value += rho / 2.0 * (fitted[a] - fitted[b]).squaredNorm();
  for (std::size_t m = 0; m < views.size(); ++m) {
    const Vector pf = penalty_factors.empty()
                          ? Vector::Ones(thetas[m].size())
                          : penalty_factors[m];
    double pen = 0.0;
    for (Index j = 0; j < thetas[m].size(); ++j)
      pen += pf[j] * (alpha * std::abs(thetas[m][j]) +
                      (1.0 - alpha) * thetas[m][j] * thetas[m][j] / 2.0);
    value += lambda * pen;
  }
  return value;
}

CoopFit fit_coop_logistic(const MultiViewDataset& dataset, double rho,
                          double lambda, const LogisticOptions& opt) {
  if (dataset.response.family != Family::binomial)
    throw InputError("fit_coop_logistic needs a binomial response");
  if (rho < 0) throw InputError("rho must be nonnegative");
  if (lambda < 0) throw InputError("lambda must be nonnegative");

  const std::vector<Matrix> views = standardized_matrices(dataset);
  const Vector& y = dataset.response.values;
  const Index n = y.size();
  const std::size_t n_views = views.size();
  const Index total_cols = dataset.total_cols();

  // Coefficient layout in the inner solves: [intercept | view blocks].
  PenaltySpec spec;
  spec.lambda = lambda;
  spec.alpha = opt.alpha;
  spec.penalty_factors = Vector::Ones(total_cols + 1);
  spec.penalty_factors[0] = 0.0;
  if (!opt.penalty_factors.empty()) {
    if (opt.penalty_factors.size() != n_views)
      throw InputError("penalty factor blocks do not match view count");
    Index at = 1;
    for (const auto& pf : opt.penalty_factors) {
      spec.penalty_factors.segment(at, pf.size()) = pf;
      at += pf.size();
    }
  }

  auto objective_at = [&](const Vector& packed) {
    std::vector<Vector> thetas;
    Index at = 1;
    for (std::size_t m = 0; m < n_views; ++m) {
      thetas.push_back(packed.segment(at, views[m].cols()));
      at += views[m].cols();
    }
    return coop_logistic_objective(views, y, thetas, packed[0], rho, lambda,
                                   opt.alpha, opt.penalty_factors);
  };
  auto eta_at = [&](const Vector& packed) {
    Vector eta = Vector::Constant(n, packed[0]);
    Index at = 1;
    for (std::size_t m = 0; m < n_views; ++m) {
      eta += views[m] * packed.segment(at, views[m].cols());
      at += views[m].cols();
    }
    return eta;
  };

  Vector packed = Vector::Zero(total_cols + 1);
  double obj = objective_at(packed);

  CoopFit fit;
  fit.view_names.reserve(n_views);
  for (const auto& v : dataset.views) fit.view_names.push_back(v.name);
  fit.rho = rho;
  fit.lambda_per_view = Vector::Constant(static_cast<Index>(n_views), lambda);
  fit.alpha = opt.alpha;
  fit.algorithm = CoopAlgorithm::direct;
  fit.family = Family::binomial;
  fit.converged = false;

  int consecutive_increases = 0;
  for (int outer = 0; outer < opt.max_outer && !fit.converged; ++outer) {
    const IRLSState state = irls_update(eta_at(packed), y, outer + 1);
    AugmentedSystem sys = build_weighted_augmented(views, state, rho);

    // Prepend the intercept column: sqrt(w) over the observations, zero
    // in the contrast rows (a shared intercept cancels in the agreement
    // term).
    Matrix design(sys.x_tilde.rows(), sys.x_tilde.cols() + 1);
    design.col(0).setZero();
    design.col(0).head(n) = state.weights.array().sqrt();
    design.rightCols(sys.x_tilde.cols()) = sys.x_tilde;

    Coefs inner = coordinate_descent(design, sys.y_tilde, spec, &packed,
                                     opt.cd_tol, opt.cd_max_sweeps);

    Vector candidate = inner.beta;
    double cand_obj = objective_at(candidate);
    int halvings = 0;
    while (cand_obj > obj && halvings < opt.max_halvings) {
      candidate = 0.5 * (candidate + packed);
      cand_obj = objective_at(candidate);
      ++halvings;
    }

    if (cand_obj > obj + 1e-12 * (1.0 + std::abs(obj))) {
      ++consecutive_increases;
      ++fit.monotonicity_violations;
      if (consecutive_increases >= opt.max_consecutive_increases)
        throw NumericError(
            "fit_coop_logistic: objective increased " +
            std::to_string(consecutive_increases) +
            " outer iterations in a row (last objective " +
            std::to_string(cand_obj) + "); the fit is diverging");
    } else {
      consecutive_increases = 0;
    }

    const double change = std::abs(obj - cand_obj);
    packed = candidate;
    obj = cand_obj;
    ++fit.n_iter;
    if (change <= opt.tol * (1.0 + std::abs(obj))) fit.converged = true;
  }

  fit.intercept = packed[0];
  Index at = 1;
  for (std::size_t m = 0; m < n_views; ++m) {
    fit.thetas.push_back(packed.segment(at, views[m].cols()));
    at += views[m].cols();
  }
  fit.objective = obj;
  return fit;
}

}  // namespace coop
