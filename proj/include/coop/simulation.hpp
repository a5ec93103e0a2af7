#pragma once

#include <cstdint>
#include <vector>

#include "coop/common.hpp"

namespace coop {
namespace sim {

// Latent factor design: every view column starts as iid N(0,1); the first
// p_u columns of view m gain t[m] * u_i for shared factors u_i with
// N(0, s_u^2) entries; the response is U beta_u plus N(0, sigma^2) noise.
// Draw order under one seed: view columns (view-major, column-major),
// then factors, then response noise.
struct FactorSimParams {
  Index n = 200;
  std::vector<Index> p;       // columns per view
  Index p_u = 30;             // shared factors, p_u <= min(p)
  double s_u = 1.0;           // factor scale
  std::vector<double> t;      // per-view factor strength
  Vector beta_u;              // length p_u
  double sigma = 1.0;         // response noise SD
  std::uint64_t seed = 1;
};

struct SimulatedDataset {
  std::vector<Matrix> x;  // raw views
  Vector y;
  Matrix u;               // realized n x p_u factors
  double sigma = 0.0;
  double realized_snr = 0.0;  // Var(U beta_u) / sigma^2, denominator n
};

SimulatedDataset gen_factor_dataset(const FactorSimParams& params);

// Noise SD that makes the realized signal-to-noise ratio hit the target
// for this seed; generating with the result reproduces the same factor
// draws, so the realized ratio matches the target exactly.
double calibrate_sigma(const FactorSimParams& params, double target_snr);

// gen_factor_dataset with sigma set by calibrate_sigma.
SimulatedDataset gen_factor_dataset_snr(FactorSimParams params,
                                        double target_snr);

// Support-size-versus-shrinkage summary: replicated two-view gaussian
// data (every coefficient 2.0, noise set for SNR 2), solution paths per
// rho, and the mean nonzero count interpolated onto a shared grid of l1
// norms expressed as fractions of each replicate's common reachable
// maximum.
struct SparsityCurve {
  Vector rho_grid;
  Vector l1_fractions;   // grid in [0, 1]
  Matrix mean_nonzero;   // n_rho x grid points
  int n_replicates = 0;
};

struct SparsityStudyParams {
  Index n = 100;
  Index p_per_view = 20;
  double coef = 2.0;
  double target_snr = 2.0;
  Vector rho_grid;  // defaults to {0, 0.5, 1, 2} when empty
  int n_replicates = 100;
  int n_lambda = 50;
  double min_ratio = 1e-3;
  int grid_points = 21;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

SparsityCurve sparsity_study(const SparsityStudyParams& params);

}  // namespace sim
}  // namespace coop
