#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "coop/model_selection.hpp"
#include "test_utils.hpp"

using namespace coop;
using testutil::max_abs_diff;

namespace {

// Rebuilds a dataset from a subset of raw rows.
MultiViewDataset subset_dataset(const MultiViewDataset& data,
                                const std::vector<Index>& rows) {
  std::vector<DataView> views;
  for (const auto& rv : data.raw_views) {
    DataView v;
    v.name = rv.name;
    v.column_names = rv.column_names;
    v.values.resize(static_cast<Index>(rows.size()), rv.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
      v.values.row(static_cast<Index>(i)) = rv.values.row(rows[i]);
    views.push_back(std::move(v));
  }
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    y[static_cast<Index>(i)] = data.response.values[rows[i]] +
                               (data.response.family == Family::gaussian
                                    ? data.response.mean
                                    : 0.0);
  return assemble(std::move(views), y, data.response.family);
}

Matrix concat_std(const MultiViewDataset& d) {
  Matrix m(d.n(), d.total_cols());
  Index at = 0;
  for (const auto& v : d.views) {
    m.middleCols(at, v.cols()) = v.values;
    at += v.cols();
  }
  return m;
}

}  // namespace

TEST_SUITE("model_selection") {

TEST_CASE("fold sizes differ by at most one and partition the rows") {
  FoldPlan loo = make_folds(10, 10, 7);
  std::vector<int> counts(10, 0);
  for (int a : loo.assignments) ++counts[a];
  for (int c : counts) CHECK(c == 1);

  FoldPlan plan = make_folds(10, 3, 7);
  std::vector<int> sizes(3, 0);
  for (int a : plan.assignments) ++sizes[a];
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes[0] == 3);
  CHECK(sizes[1] == 3);
  CHECK(sizes[2] == 4);

  std::set<Index> seen;
  for (int f = 0; f < 3; ++f) {
    auto held = plan.held_out_rows(f);
    auto train = plan.training_rows(f);
    CHECK(held.size() + train.size() == 10);
    for (Index r : held) seen.insert(r);
    std::set<Index> h(held.begin(), held.end());
    for (Index r : train) CHECK(h.count(r) == 0);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("fold assignment is seeded") {
  FoldPlan a = make_folds(40, 5, 11);
  FoldPlan b = make_folds(40, 5, 11);
  FoldPlan c = make_folds(40, 5, 12);
  CHECK(a.assignments == b.assignments);
  CHECK(a.assignments != c.assignments);
  CHECK_THROWS_AS(make_folds(5, 6, 1), InputError);
  CHECK_THROWS_AS(make_folds(5, 1, 1), InputError);
}

TEST_CASE("zero-coupling cross-validation equals a hand-rolled lasso CV") {
  MultiViewDataset data = testutil::random_dataset(61, 36, {4, 3}, 0.8);
  FoldPlan plan = make_folds(36, 4, 5);

  CVOptions opt;
  opt.rho_grid = Vector::Zero(1);
  opt.n_lambda = 10;
  opt.min_ratio = 1e-2;
  opt.tol = 1e-10;
  CVResult cv = cv_coop(data, opt, &plan);

  // Independent CV loop on the concatenated design.
  Vector grid = cv.lambda_grids[0];
  Matrix errors(4, 10);
  for (int f = 0; f < 4; ++f) {
    MultiViewDataset train = subset_dataset(data, plan.training_rows(f));
    PathResult path = fit_path(concat_std(train), train.response.values,
                               PenaltySpec{}, grid, 1e-10);
    auto held = plan.held_out_rows(f);
    for (int l = 0; l < 10; ++l) {
      double sum = 0.0;
      for (Index row : held) {
        double pred = train.response.mean;
        Index at = 0;
        for (std::size_t m = 0; m < 2; ++m) {
          const auto& sv = train.views[m];
          for (Index j = 0; j < sv.cols(); ++j, ++at)
            pred += path.fits[l].beta[at] *
                    (data.raw_views[m].values(row, j) - sv.column_means[j]) /
                    sv.column_sds[j];
        }
        const double truth = data.response.values[row] + data.response.mean;
        sum += (pred - truth) * (pred - truth);
      }
      errors(f, l) = sum / static_cast<double>(held.size());
    }
  }
  for (int l = 0; l < 10; ++l) {
    CHECK(cv.mean_error(0, l) ==
          doctest::Approx(errors.col(l).mean()).epsilon(1e-9));
    const double centered =
        (errors.col(l).array() - errors.col(l).mean()).square().sum();
    CHECK(cv.sd_error(0, l) ==
          doctest::Approx(std::sqrt(centered / 3.0)).epsilon(1e-7));
  }

  int best = 0;
  for (int l = 1; l < 10; ++l)
    if (errors.colwise().mean()[l] < errors.colwise().mean()[best]) best = l;
  CHECK(cv.selected_lambda_index == best);
  CHECK(cv.selected_rho_index == 0);
}

TEST_CASE("fold errors really come from training-row standardization") {
  // Falsification companion to the hand-rolled comparison above: redo the
  // same loop but standardize with full-data statistics. If cv_coop leaked
  // held-out rows into its scaling the two routes would coincide; they
  // must not.
  MultiViewDataset data = testutil::random_dataset(62, 36, {4, 3}, 0.8);
  FoldPlan plan = make_folds(36, 4, 5);
  CVOptions opt;
  opt.rho_grid = Vector::Zero(1);
  opt.n_lambda = 10;
  opt.min_ratio = 1e-2;
  opt.tol = 1e-10;
  CVResult cv = cv_coop(data, opt, &plan);

  Vector grid = cv.lambda_grids[0];
  const Matrix full = concat_std(data);
  Matrix errors(4, 10);
  for (int f = 0; f < 4; ++f) {
    auto train_rows = plan.training_rows(f);
    Matrix x_train(static_cast<Index>(train_rows.size()), data.total_cols());
    Vector y_train(static_cast<Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      x_train.row(static_cast<Index>(i)) = full.row(train_rows[i]);
      y_train[static_cast<Index>(i)] = data.response.values[train_rows[i]];
    }
    const double y_mean = y_train.mean();
    PathResult path = fit_path(x_train, Vector(y_train.array() - y_mean),
                               PenaltySpec{}, grid, 1e-10);
    auto held = plan.held_out_rows(f);
    for (int l = 0; l < 10; ++l) {
      double sum = 0.0;
      for (Index row : held) {
        const double pred = full.row(row).dot(path.fits[l].beta) + y_mean +
                            data.response.mean;
        const double truth = data.response.values[row] + data.response.mean;
        sum += (pred - truth) * (pred - truth);
      }
      errors(f, l) = sum / static_cast<double>(held.size());
    }
  }
  double gap = 0.0;
  for (int l = 0; l < 10; ++l)
    gap = std::max(gap, std::abs(errors.col(l).mean() - cv.mean_error(0, l)));
  CHECK(gap > 1e-6);
}

TEST_CASE("the one-SE rule backs off toward heavier penalties") {
  MultiViewDataset data = testutil::random_dataset(63, 50, {5, 5}, 1.2);
  FoldPlan plan = make_folds(50, 5, 13);
  CVOptions opt;
  opt.rho_grid = Vector::Zero(3);
  opt.rho_grid << 0.0, 0.5, 1.0;
  opt.n_lambda = 12;
  opt.min_ratio = 1e-2;

  CVResult at_min = cv_coop(data, opt, &plan);
  opt.rule = SelectionRule::one_se;
  CVResult at_1se = cv_coop(data, opt, &plan);

  CHECK(at_1se.selected_lambda >= at_min.selected_lambda);
  const double floor_val =
      at_min.mean_error(at_min.selected_rho_index,
                        at_min.selected_lambda_index) +
      at_min.sd_error(at_min.selected_rho_index,
                      at_min.selected_lambda_index) /
          std::sqrt(5.0);
  CHECK(at_1se.mean_error(at_1se.selected_rho_index,
                          at_1se.selected_lambda_index) <=
        floor_val + 1e-12);
}

TEST_CASE("selection prefers the first cell in scan order among minima") {
  MultiViewDataset data = testutil::random_dataset(64, 40, {4, 4}, 1.0);
  CVOptions opt;
  opt.rho_grid = Vector::Zero(3);
  opt.rho_grid << 0.0, 1.0, 2.0;
  opt.n_lambda = 8;
  opt.k_folds = 4;
  opt.seed = 17;
  CVResult cv = cv_coop(data, opt);
  const double best = cv.mean_error(cv.selected_rho_index,
                                    cv.selected_lambda_index);
  CHECK(best == cv.mean_error.minCoeff());
  for (int r = 0; r < 3; ++r)
    for (int l = 0; l < 8; ++l)
      if (cv.mean_error(r, l) == best) {
        const bool not_before =
            r > cv.selected_rho_index ||
            (r == cv.selected_rho_index && l >= cv.selected_lambda_index);
        CHECK(not_before);
      }
}

TEST_CASE("the stored refit matches a direct solve at the selection") {
  MultiViewDataset data = testutil::random_dataset(65, 45, {4, 3}, 0.7);
  CVOptions opt;
  opt.rho_grid = Vector::Zero(2);
  opt.rho_grid << 0.25, 1.0;
  opt.n_lambda = 9;
  opt.k_folds = 4;
  opt.seed = 3;
  opt.tol = 1e-9;
  CVResult cv = cv_coop(data, opt);

  Vector lam(1);
  lam << cv.selected_lambda;
  CoopPath direct = coop_direct_fit(data, cv.selected_rho, lam, 1.0, {},
                                    nullptr, 1e-9);
  for (int m = 0; m < 2; ++m)
    CHECK(max_abs_diff(cv.fit.thetas[m], direct.fits[0].thetas[m]) < 1e-6);
  CHECK(cv.fit.rho == cv.selected_rho);
}

TEST_CASE("adaptive tuning sees symmetric views symmetrically") {
  Rng rng(66);
  Matrix shared = rng.normal_matrix(40, 4);
  DataView a{"x", shared, {"x1", "x2", "x3", "x4"}};
  DataView b{"z", shared, {"z1", "z2", "z3", "z4"}};
  Vector y = shared * Vector::Ones(4) + 0.4 * rng.normal_vector(40);
  MultiViewDataset data = assemble({a, b}, y, Family::gaussian);
  FoldPlan plan = make_folds(40, 4, 21);

  AdaptiveOptions opt;
  opt.n_lambda = 10;
  opt.min_ratio = 1e-2;
  AdaptiveState state = adaptive_one_at_a_time(data, 0.5, plan, opt);
  CHECK(state.lambda_x == doctest::Approx(state.lambda_z).epsilon(1e-3));
  CHECK(state.penalty_ratio == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(state.degenerate_target);
}

TEST_CASE("adaptive tuning penalizes a noise-only view more") {
  Rng rng(67);
  DataView a{"x", rng.normal_matrix(60, 4), {"x1", "x2", "x3", "x4"}};
  DataView b{"z", rng.normal_matrix(60, 4), {"z1", "z2", "z3", "z4"}};
  Vector y = a.values * Vector::Constant(4, 1.5) + 0.5 * rng.normal_vector(60);
  MultiViewDataset data = assemble({a, b}, y, Family::gaussian);
  FoldPlan plan = make_folds(60, 5, 8);

  AdaptiveOptions opt;
  opt.n_lambda = 12;
  opt.min_ratio = 1e-2;
  AdaptiveState state = adaptive_one_at_a_time(data, 0.5, plan, opt);
  CHECK(state.penalty_ratio > 1.0);
  CHECK(state.lambda_z > state.lambda_x);
}

TEST_CASE("adaptive direct search records one state per coupling weight") {
  MultiViewDataset data = testutil::random_dataset(68, 40, {4, 4}, 0.8);
  CVOptions opt;
  opt.rho_grid = Vector::Zero(2);
  opt.rho_grid << 0.25, 1.0;
  opt.n_lambda = 8;
  opt.k_folds = 4;
  opt.seed = 30;
  AdaptiveOptions aopt;
  aopt.n_lambda = 8;
  aopt.min_ratio = 1e-2;
  CVResult cv = adaptive_direct(data, opt, aopt);
  REQUIRE(cv.adaptive_states.size() == 2);
  CHECK(cv.selected_rho_index >= 0);
  CHECK(cv.selected_lambda_index >= 0);
  for (const auto& s : cv.adaptive_states) {
    CHECK(s.penalty_ratio > 0.0);
    CHECK(s.cv_error_sum == doctest::Approx(s.cv_error_x + s.cv_error_z));
  }
  CHECK(cv.fit.thetas.size() == 2);
}

TEST_CASE("duplicated views split the late fusion combiner evenly") {
  Rng rng(69);
  Matrix shared = rng.normal_matrix(50, 3);
  DataView a{"x", shared, {"x1", "x2", "x3"}};
  DataView b{"z", shared, {"z1", "z2", "z3"}};
  Vector y = shared.col(0) * 2.0 + 0.2 * rng.normal_vector(50);
  MultiViewDataset data = assemble({a, b}, y, Family::gaussian);
  FoldPlan plan = make_folds(50, 5, 14);

  CVOptions opt;
  opt.n_lambda = 12;
  opt.min_ratio = 1e-2;
  LateFusionFit lf = late_fusion_fit(data, opt, &plan);
  REQUIRE(lf.weights.size() == 2);
  CHECK(std::abs(lf.weights[0] - lf.weights[1]) < 1e-8);
  Vector preds =
      predict(lf.combined, data, {data.raw_views[0].values,
                                  data.raw_views[1].values});
  const double mse = (preds - y).squaredNorm() / 50.0;
  CHECK(mse < y.squaredNorm() / 50.0);
}

TEST_CASE("bad cross-validation settings are rejected") {
  MultiViewDataset data = testutil::random_dataset(70, 20, {3, 2});
  CVOptions opt;  // empty rho grid
  CHECK_THROWS_AS(cv_coop(data, opt), InputError);
  opt.rho_grid = Vector::Constant(1, -1.0);
  CHECK_THROWS_AS(cv_coop(data, opt), InputError);
}

}  // TEST_SUITE
