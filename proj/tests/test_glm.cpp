#include <cmath>
#include <vector>

#include "doctest.h"

#include "coop/glm.hpp"
#include "test_utils.hpp"

using namespace coop;
using testutil::max_abs_diff;

namespace {

MultiViewDataset binary_dataset(std::uint64_t seed, Index n,
                                const std::vector<Index>& p,
                                double scale = 1.5) {
  Rng rng(seed);
  std::vector<DataView> views;
  Vector eta = Vector::Zero(n);
  for (std::size_t m = 0; m < p.size(); ++m) {
    DataView v;
    v.name = "v" + std::to_string(m + 1);
    v.values = rng.normal_matrix(n, p[m]);
    eta += scale * v.values.col(0);
    views.push_back(std::move(v));
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i)
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
  return assemble(std::move(views), y, Family::binomial);
}

Vector pack(const CoopFit& fit) {
  Index total = 1;
  for (const auto& t : fit.thetas) total += t.size();
  Vector out(total);
  out[0] = fit.intercept;
  Index at = 1;
  for (const auto& t : fit.thetas) {
    out.segment(at, t.size()) = t;
    at += t.size();
  }
  return out;
}

}  // namespace

TEST_SUITE("glm") {

TEST_CASE("reweighting at a zero linear predictor") {
  Vector eta = Vector::Zero(4);
  Vector y(4);
  y << 1, 0, 1, 1;
  IRLSState s = irls_update(eta, y, 1);
  for (Index i = 0; i < 4; ++i) {
    CHECK(s.mu[i] == doctest::Approx(0.5));
    CHECK(s.weights[i] == doctest::Approx(0.25));
    CHECK(s.working_response[i] == doctest::Approx(4.0 * (y[i] - 0.5)));
  }
  CHECK(s.deviance == doctest::Approx(2.0 * 4.0 * std::log(2.0)));
  CHECK(s.iteration == 1);
}

TEST_CASE("saturated predictors keep finite weights and responses") {
  Vector eta(3);
  eta << 40.0, -40.0, 0.0;
  Vector y(3);
  y << 0, 1, 1;
  IRLSState s = irls_update(eta, y, 2);
  CHECK(s.weights.minCoeff() >= 1e-5);
  CHECK(std::isfinite(s.working_response.cwiseAbs().maxCoeff()));
  CHECK(std::isfinite(s.deviance));
  CHECK(s.mu[0] <= 1.0);
  CHECK(s.mu[1] >= 0.0);
}

TEST_CASE("first outer step from zero equals hand-computed weighted LS") {
  MultiViewDataset data = binary_dataset(81, 24, {2});
  LogisticOptions opt;
  opt.max_outer = 1;
  opt.cd_tol = 1e-13;
  CoopFit one = fit_coop_logistic(data, 0.0, 0.0, opt);

  // From eta = 0: w = 1/4, z = 4(y - 1/2); one IRLS step is the WLS solve
  // on [1 X] which at constant weights is plain least squares.
  const Matrix& x = data.views[0].values;
  Matrix design(24, 3);
  design.col(0).setOnes();
  design.rightCols(2) = x;
  Vector z = 4.0 * (data.response.values.array() - 0.5);
  Vector wls = testutil::ols(design, z);
  CHECK(std::abs(one.intercept - wls[0]) < 1e-6);
  CHECK(max_abs_diff(one.thetas[0], Vector(wls.tail(2))) < 1e-6);
  CHECK_FALSE(one.converged);
}

TEST_CASE("unit weights reduce the weighted stack to the plain one") {
  Rng rng(82);
  std::vector<Matrix> views = {rng.normal_matrix(6, 2), rng.normal_matrix(6, 3)};
  IRLSState state;
  state.weights = Vector::Ones(6);
  state.working_response = rng.normal_vector(6);
  AugmentedSystem weighted =
      build_weighted_augmented(views, state, 0.75);
  AugmentedSystem plain = build_augmented(views, state.working_response, 0.75);
  CHECK((weighted.x_tilde - plain.x_tilde).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((weighted.y_tilde - plain.y_tilde).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("decoupled penalized logistic matches a proximal oracle") {
  MultiViewDataset data = binary_dataset(83, 60, {3, 3});
  const double lambda = 2.0;
  LogisticOptions opt;
  opt.tol = 1e-11;
  opt.cd_tol = 1e-12;
  CoopFit fit = fit_coop_logistic(data, 0.0, lambda, opt);

  Matrix design(60, 7);
  design.col(0).setOnes();
  design.middleCols(1, 3) = data.views[0].values;
  design.rightCols(3) = data.views[1].values;
  Vector pf = Vector::Ones(7);
  pf[0] = 0.0;
  Vector oracle = testutil::prox_logistic(design, data.response.values,
                                          lambda, pf, 200000);
  CHECK(max_abs_diff(pack(fit), oracle) < 1e-4);

  const double lib_obj = coop_logistic_objective(
      {data.views[0].values, data.views[1].values}, data.response.values,
      fit.thetas, fit.intercept, 0.0, lambda);
  const double oracle_obj =
      testutil::logistic_nll(design, data.response.values, oracle) +
      lambda * oracle.tail(6).cwiseAbs().sum();
  CHECK(lib_obj <= oracle_obj + 1e-7);
}

TEST_CASE("separable data stays finite under an l1 penalty") {
  Rng rng(84);
  DataView v{"x", rng.normal_matrix(30, 2), {"a", "b"}};
  Vector y(30);
  for (Index i = 0; i < 30; ++i) y[i] = v.values(i, 0) > 0.0 ? 1.0 : 0.0;
  MultiViewDataset data = assemble({v}, y, Family::binomial);
  CoopFit fit = fit_coop_logistic(data, 0.0, 1.0);
  CHECK(std::isfinite(fit.objective));
  CHECK(std::isfinite(fit.thetas[0].cwiseAbs().maxCoeff()));
  CHECK(fit.converged);
  CHECK(fit.monotonicity_violations == 0);
}

TEST_CASE("flipping labels negates the fit") {
  MultiViewDataset data = binary_dataset(85, 50, {3, 2});
  LogisticOptions opt;
  opt.tol = 1e-11;
  opt.cd_tol = 1e-12;
  CoopFit fit = fit_coop_logistic(data, 0.5, 0.8, opt);

  std::vector<DataView> flipped_views = data.raw_views;
  Vector flipped = Vector::Ones(50) - data.response.values;
  MultiViewDataset mirror = assemble(flipped_views, flipped, Family::binomial);
  CoopFit neg = fit_coop_logistic(mirror, 0.5, 0.8, opt);
  CHECK(std::abs(fit.intercept + neg.intercept) < 1e-6);
  for (int m = 0; m < 2; ++m)
    CHECK(max_abs_diff(fit.thetas[m], Vector(-neg.thetas[m])) < 1e-6);
}

TEST_CASE("the free intercept balances fitted and observed rates") {
  MultiViewDataset data = binary_dataset(86, 70, {3, 3});
  CoopFit fit = fit_coop_logistic(data, 1.0, 1.5);
  Vector eta = Vector::Constant(70, fit.intercept);
  for (int m = 0; m < 2; ++m) eta += data.views[m].values * fit.thetas[m];
  double mean_mu = 0.0;
  for (Index i = 0; i < 70; ++i) mean_mu += 1.0 / (1.0 + std::exp(-eta[i]));
  mean_mu /= 70.0;
  CHECK(mean_mu == doctest::Approx(data.response.values.mean()).epsilon(1e-5));
}

TEST_CASE("identical views get identical coefficients under coupling") {
  Rng rng(87);
  Matrix shared = rng.normal_matrix(40, 3);
  DataView a{"x", shared, {"x1", "x2", "x3"}};
  DataView b{"z", shared, {"z1", "z2", "z3"}};
  Vector eta = shared * Vector::Constant(3, 1.2);
  Vector y(40);
  for (Index i = 0; i < 40; ++i)
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
  MultiViewDataset data = assemble({a, b}, y, Family::binomial);
  LogisticOptions opt;
  opt.tol = 1e-11;
  CoopFit fit = fit_coop_logistic(data, 0.75, 0.6, opt);
  CHECK(max_abs_diff(fit.thetas[0], fit.thetas[1]) < 1e-5);
}

TEST_CASE("gaussian input is rejected") {
  MultiViewDataset data = testutil::random_dataset(88, 20, {2, 2});
  CHECK_THROWS_AS(fit_coop_logistic(data, 0.5, 0.1), InputError);
}

}  // TEST_SUITE
