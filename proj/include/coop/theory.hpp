#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coop/common.hpp"

namespace coop {
namespace theory {

// Single-feature-per-view latent model: x = gamma_x u + sigma_x e_x,
// z = gamma_z u + sigma_z e_z, y = gamma_y u + sigma_y e_y with u and the
// e's independent standard normal.
struct LatentParams {
  double gamma_x = 1.0;
  double gamma_z = 1.0;
  double gamma_y = 1.0;
  double sigma_x = 1.0;
  double sigma_z = 1.0;
  double sigma_y = 1.0;
};

// Population regression of y on (x, z): coefficients and residual
// variance of the best linear predictor.
struct PopulationQuantities {
  double theta_x = 0.0;
  double theta_z = 0.0;
  double sigma_star_sq = 0.0;
};

PopulationQuantities population_params(const LatentParams& params);

// Polynomial pieces of the conditional estimator moments for a fixed
// draw (x, z): both the variance-numerator and determinant quadratics
// in the agreement weight.
struct DerivativeTerms {
  double c1 = 0.0, b1 = 0.0, a1 = 0.0;  // variance numerator
  double c2 = 0.0, b2 = 0.0;            // determinant: c2 + b2 r + c2 r^2
};

DerivativeTerms derivative_terms(const Vector& x, const Vector& z,
                                 const LatentParams& params);

// Exact prediction mean squared error of the agreement-penalized least
// squares estimator at penalty rho, conditional on (x, z):
// squared bias + variance + irreducible noise.
double mse_exact(const Vector& x, const Vector& z, const LatentParams& params,
                 double rho);

// d/d rho of mse_exact at rho = 0 in closed form.
double derivative_at_zero(const Vector& x, const Vector& z,
                          const LatentParams& params);

// Central finite difference of mse_exact at 0, with one Richardson
// refinement when the plain stencil disagrees with the closed form by
// more than 1e-4 relative.
double fd_derivative_at_zero(const Vector& x, const Vector& z,
                             const LatentParams& params, double h = 1e-5);

// Large-n limits of the derivative and of derivative / mse(0).
double asymptotic_derivative(const LatentParams& params, Index n);
double asymptotic_ratio(const LatentParams& params, Index n);

// Draws (x, z) from the latent model.
void draw_xz(Rng& rng, const LatentParams& params, Index n, Vector& x,
             Vector& z);

struct TheoryCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct TheoryReport {
  std::vector<TheoryCheck> checks;
  bool all_pass = true;
  double max_fd_gap = 0.0;
};

// Seeded self-checks: finite-difference agreement of the derivative,
// negativity frequency on latent-model draws, and sign/scale consistency
// with the asymptotic formulas.
TheoryReport run_theory_checks(const LatentParams& params, Index n,
                               int n_instances, std::uint64_t seed);

}  // namespace theory
}  // namespace coop
