#pragma once

// Shared fixtures and independent reference solvers for the test suites.
// Everything here deliberately avoids the library's own optimizers: least
// squares goes through dense factorizations, l1 problems through proximal
// gradient, so agreement between the two routes is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "coop/common.hpp"
#include "coop/data_model.hpp"

namespace testutil {

using coop::Index;
using coop::Matrix;
using coop::Vector;

inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Least squares via a rank-revealing factorization.
inline Vector ols(const Matrix& x, const Vector& y) {
  return x.completeOrthogonalDecomposition().solve(y);
}

// Proximal gradient (ISTA) on
//   (1/2)||y - X b||^2 + lambda * sum_j pf_j (alpha|b_j| + (1-alpha) b_j^2/2).
// Step size from the largest eigenvalue of X'X. Slow and simple on purpose.
inline Vector prox_lasso(const Matrix& x, const Vector& y, double lambda,
                         double alpha = 1.0, Vector pf = Vector(),
                         int iters = 60000) {
  const Index p = x.cols();
  if (pf.size() == 0) pf = Vector::Ones(p);
  const Matrix gram = x.transpose() * x;
  const Vector xty = x.transpose() * y;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  double lip = es.eigenvalues().maxCoeff();
  for (Index j = 0; j < p; ++j)
    lip = std::max(lip, gram(j, j) + lambda * pf[j] * (1.0 - alpha));
  const double step = 1.0 / (lip + 1e-12);
  Vector b = Vector::Zero(p);
  for (int it = 0; it < iters; ++it) {
    Vector grad = gram * b - xty;
    for (Index j = 0; j < p; ++j)
      grad[j] += lambda * pf[j] * (1.0 - alpha) * b[j];
    Vector z = b - step * grad;
    for (Index j = 0; j < p; ++j) {
      const double t = step * lambda * pf[j] * alpha;
      z[j] = std::copysign(std::max(std::abs(z[j]) - t, 0.0), z[j]);
    }
    b = z;
  }
  return b;
}

// Proximal gradient on the penalized logistic objective
//   sum_i log(1 + exp(eta_i)) - y_i eta_i + lambda * sum_j pf_j |b_j|
// with eta = X b; unpenalized coordinates get pf_j = 0.
inline Vector prox_logistic(const Matrix& x, const Vector& y01, double lambda,
                            const Vector& pf, int iters = 120000) {
  const Index p = x.cols();
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.transpose() * x);
  const double step = 1.0 / (0.25 * es.eigenvalues().maxCoeff() + 1e-12);
  Vector b = Vector::Zero(p);
  for (int it = 0; it < iters; ++it) {
    Vector eta = x * b;
    Vector mu = (1.0 + (-eta.array()).exp()).inverse();
    Vector z = b - step * (x.transpose() * (mu - y01));
    for (Index j = 0; j < p; ++j) {
      const double t = step * lambda * pf[j];
      z[j] = std::copysign(std::max(std::abs(z[j]) - t, 0.0), z[j]);
    }
    b = z;
  }
  return b;
}

inline double logistic_nll(const Matrix& x, const Vector& y01,
                           const Vector& b) {
  Vector eta = x * b;
  double nll = 0.0;
  for (Index i = 0; i < y01.size(); ++i) {
    const double e = eta[i];
    nll += std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e))) - y01[i] * e;
  }
  return nll;
}

// Random multiview regression data: each view iid N(0,1), response a noisy
// linear signal in the first column of each view.
inline coop::MultiViewDataset random_dataset(std::uint64_t seed, Index n,
                                             const std::vector<Index>& p,
                                             double noise = 0.5) {
  coop::Rng rng(seed);
  std::vector<coop::DataView> views;
  Vector signal = Vector::Zero(n);
  for (std::size_t m = 0; m < p.size(); ++m) {
    coop::DataView v;
    v.name = "v" + std::to_string(m + 1);
    v.values = rng.normal_matrix(n, p[m]);
    views.push_back(v);
    signal += views.back().values.col(0);
  }
  Vector y = signal + noise * rng.normal_vector(n);
  return coop::assemble(std::move(views), y, coop::Family::gaussian);
}

// Two views whose standardized columns are exactly orthogonal across (and
// within) views: QR against an included intercept column keeps every
// column centered, so standardization only rescales.
inline coop::MultiViewDataset orthogonal_dataset(std::uint64_t seed, Index n,
                                                 Index p1, Index p2) {
  coop::Rng rng(seed);
  Matrix base(n, p1 + p2 + 1);
  base.col(0).setOnes();
  base.rightCols(p1 + p2) = rng.normal_matrix(n, p1 + p2);
  Eigen::HouseholderQR<Matrix> qr(base);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p1 + p2 + 1);
  coop::DataView a{"x", q.middleCols(1, p1), {}};
  coop::DataView b{"z", q.middleCols(1 + p1, p2), {}};
  Vector y = q.middleCols(1, p1 + p2) * rng.normal_vector(p1 + p2) +
             0.3 * rng.normal_vector(n);
  return coop::assemble({a, b}, y, coop::Family::gaussian);
}

// Unique temp directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("coop_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
