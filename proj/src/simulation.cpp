#include "coop/simulation.hpp"

#include <cmath>
#include <limits>

#include "coop/cooperative.hpp"
#include "coop/data_model.hpp"

namespace coop {
namespace sim {

namespace {

void validate_params(const FactorSimParams& params) {
  if (params.n < 2) throw InputError("factor simulation needs n >= 2");
  if (params.p.empty()) throw InputError("factor simulation needs views");
  if (params.t.size() != params.p.size())
    throw InputError("factor strengths do not match view count");
  if (params.p_u < 1) throw InputError("need at least one factor");
  for (const Index p_m : params.p)
    if (p_m < params.p_u)
      throw InputError("every view needs at least p_u columns");
  if (params.beta_u.size() != params.p_u)
    throw InputError("beta_u length does not match p_u");
  if (params.s_u < 0) throw InputError("s_u must be nonnegative");
}

double population_variance(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

struct FactorDraws {
  std::vector<Matrix> x;
  Matrix u;
  Vector noise;  // standard normal; scaled by sigma afterwards
};

FactorDraws draw_all(const FactorSimParams& params) {
  Rng rng(params.seed);
  FactorDraws draws;
  for (std::size_t m = 0; m < params.p.size(); ++m)
    draws.x.push_back(rng.normal_matrix(params.n, params.p[m]));
  draws.u = params.s_u * rng.normal_matrix(params.n, params.p_u);
  for (std::size_t m = 0; m < params.p.size(); ++m)
    draws.x[m].leftCols(params.p_u) += params.t[m] * draws.u;
  draws.noise = rng.normal_vector(params.n);
  return draws;
}

}  // namespace

SimulatedDataset gen_factor_dataset(const FactorSimParams& params) {
  validate_params(params);
  if (params.sigma <= 0) throw InputError("sigma must be positive");
  FactorDraws draws = draw_all(params);

  SimulatedDataset out;
  out.x = std::move(draws.x);
  out.u = std::move(draws.u);
  out.sigma = params.sigma;
  const Vector signal = out.u * params.beta_u;
  out.y = signal + params.sigma * draws.noise;
  out.realized_snr =
      population_variance(signal) / (params.sigma * params.sigma);
  return out;
}

double calibrate_sigma(const FactorSimParams& params, double target_snr) {
  validate_params(params);
  if (target_snr <= 0) throw InputError("target SNR must be positive");
  const FactorDraws draws = draw_all(params);
  const double signal_var = population_variance(draws.u * params.beta_u);
  if (signal_var <= 0)
    throw NumericError("calibrate_sigma: realized signal has zero variance");
  return std::sqrt(signal_var / target_snr);
}

SimulatedDataset gen_factor_dataset_snr(FactorSimParams params,
                                        double target_snr) {
  params.sigma = calibrate_sigma(params, target_snr);
  return gen_factor_dataset(params);
}

SparsityCurve sparsity_study(const SparsityStudyParams& params) {
  if (params.n_replicates < 1) throw InputError("need replicates");
  if (params.grid_points < 2) throw InputError("need at least 2 grid points");
  Vector rho_grid = params.rho_grid;
  if (rho_grid.size() == 0) {
    rho_grid.resize(4);
    rho_grid << 0.0, 0.5, 1.0, 2.0;
  }

  SparsityCurve curve;
  curve.rho_grid = rho_grid;
  curve.n_replicates = params.n_replicates;
  curve.l1_fractions =
      Vector::LinSpaced(params.grid_points, 0.0, 1.0);
  curve.mean_nonzero = Matrix::Zero(rho_grid.size(), params.grid_points);

  std::vector<Matrix> replicate_counts(
      static_cast<std::size_t>(params.n_replicates));

  parallel_for(
      static_cast<std::size_t>(params.n_replicates), params.threads,
      [&](std::size_t rep) {
        Rng rng(params.seed + rep);
        const Matrix x = rng.normal_matrix(params.n, params.p_per_view);
        const Matrix z = rng.normal_matrix(params.n, params.p_per_view);
        const Vector noise = rng.normal_vector(params.n);

        Vector signal = Vector::Zero(params.n);
        signal += params.coef * x.rowwise().sum();
        signal += params.coef * z.rowwise().sum();
        const double sigma = std::sqrt(
            population_variance(signal) / params.target_snr);
        const Vector y = signal + sigma * noise;

        MultiViewDataset dataset =
            assemble({DataView{"x", x, {}}, DataView{"z", z, {}}}, y,
                     Family::gaussian);

        // One path per rho; each records (l1 norm, nonzero count) pairs.
        std::vector<Vector> l1(static_cast<std::size_t>(rho_grid.size()));
        std::vector<Vector> nnz(static_cast<std::size_t>(rho_grid.size()));
        double common_max = std::numeric_limits<double>::infinity();
        for (Index r = 0; r < rho_grid.size(); ++r) {
          AugmentedSystem sys = build_augmented(dataset, rho_grid[r]);
          PenaltySpec spec;
          const Vector grid = lambda_grid(sys.x_tilde, sys.y_tilde, spec,
                                          params.n_lambda, params.min_ratio);
          PathResult path = fit_path(sys.x_tilde, sys.y_tilde, spec, grid);
          Vector l1_r(grid.size()), nnz_r(grid.size());
          for (Index i = 0; i < grid.size(); ++i) {
            const Vector& beta = path.fits[static_cast<std::size_t>(i)].beta;
            l1_r[i] = beta.lpNorm<1>();
            nnz_r[i] = static_cast<double>((beta.array() != 0.0).count());
          }
          common_max = std::min(common_max, l1_r.maxCoeff());
          l1[static_cast<std::size_t>(r)] = l1_r;
          nnz[static_cast<std::size_t>(r)] = nnz_r;
        }

        // Interpolate each curve at shared l1 values so counts are
        // compared at matched shrinkage levels.
        Matrix counts(rho_grid.size(), params.grid_points);
        for (Index r = 0; r < rho_grid.size(); ++r) {
          const Vector& l1_r = l1[static_cast<std::size_t>(r)];
          const Vector& nnz_r = nnz[static_cast<std::size_t>(r)];
          for (int g = 0; g < params.grid_points; ++g) {
            const double target = curve.l1_fractions[g] * common_max;
            double value = nnz_r[nnz_r.size() - 1];
            for (Index i = 0; i < l1_r.size(); ++i) {
              if (l1_r[i] >= target) {
                if (i == 0 || l1_r[i] == l1_r[i - 1]) {
                  value = nnz_r[i];
                } else {
                  const double w =
                      (target - l1_r[i - 1]) / (l1_r[i] - l1_r[i - 1]);
                  value = (1.0 - w) * nnz_r[i - 1] + w * nnz_r[i];
                }
                break;
              }
            }
            counts(r, g) = value;
          }
        }
        replicate_counts[rep] = counts;
      });

  for (const auto& counts : replicate_counts)
    curve.mean_nonzero += counts;
  curve.mean_nonzero /= static_cast<double>(params.n_replicates);
  return curve;
}

}  // namespace sim
}  // namespace coop
