#include "coop/theory.hpp"

#include <cmath>
#include <sstream>

namespace coop {
namespace theory {

namespace {

void validate(const LatentParams& params) {
  if (params.sigma_x <= 0 || params.sigma_z <= 0 || params.sigma_y < 0)
    throw InputError("noise scales must be positive");
}

struct Instance {
  double sxx, szz, sxz;  // x'x, z'z, x'z
  PopulationQuantities pop;
  LatentParams params;
};

Instance make_instance(const Vector& x, const Vector& z,
                       const LatentParams& params) {
  if (x.size() != z.size()) throw InputError("x and z lengths differ");
  if (x.size() < 2) throw InputError("need at least two rows");
  Instance inst;
  inst.sxx = x.squaredNorm();
  inst.szz = z.squaredNorm();
  inst.sxz = x.dot(z);
  if (inst.sxx <= 0 || inst.szz <= 0)
    throw InputError("x and z must be nonzero");
  if (inst.sxx * inst.szz - inst.sxz * inst.sxz <= 0)
    throw NumericError("x and z are collinear");
  inst.pop = population_params(params);
  inst.params = params;
  return inst;
}

double determinant(const Instance& inst, double rho) {
  const double one_plus = (1.0 + rho) * (1.0 + rho);
  const double one_minus = (1.0 - rho) * (1.0 - rho);
  return one_plus * inst.sxx * inst.szz - one_minus * inst.sxz * inst.sxz;
}

// Conditional bias of each coefficient at penalty rho.
void bias_terms(const Instance& inst, double rho, double& bias_x,
                double& bias_z) {
  const double det = determinant(inst, rho);
  const double c2 = inst.sxx * inst.szz - inst.sxz * inst.sxz;
  const double cross = inst.sxx * inst.szz + inst.sxz * inst.sxz;
  bias_x = (rho * (-inst.pop.theta_x * cross +
                   2.0 * inst.pop.theta_z * inst.sxz * inst.szz) -
            rho * rho * inst.pop.theta_x * c2) /
           det;
  bias_z = (rho * (-inst.pop.theta_z * cross +
                   2.0 * inst.pop.theta_x * inst.sxz * inst.sxx) -
            rho * rho * inst.pop.theta_z * c2) /
           det;
}

}  // namespace

PopulationQuantities population_params(const LatentParams& p) {
  validate(p);
  PopulationQuantities out;
  const double sx2 = p.sigma_x * p.sigma_x;
  const double sz2 = p.sigma_z * p.sigma_z;
  out.theta_x = p.gamma_x * p.gamma_y /
                (sx2 + p.gamma_x * p.gamma_x +
                 p.gamma_z * p.gamma_z * sx2 / sz2);
  out.theta_z = p.gamma_z * p.gamma_y /
                (sz2 + p.gamma_z * p.gamma_z +
                 p.gamma_x * p.gamma_x * sz2 / sx2);
  out.sigma_star_sq =
      p.gamma_y * p.gamma_y /
          (1.0 + p.gamma_x * p.gamma_x / sx2 + p.gamma_z * p.gamma_z / sz2) +
      p.sigma_y * p.sigma_y;
  return out;
}

DerivativeTerms derivative_terms(const Vector& x, const Vector& z,
                                 const LatentParams& params) {
  const Instance inst = make_instance(x, z, params);
  const double sxx = inst.sxx, szz = inst.szz, sxz = inst.sxz;
  const double gx2 = params.gamma_x * params.gamma_x;
  const double gz2 = params.gamma_z * params.gamma_z;
  const double sx2 = params.sigma_x * params.sigma_x;
  const double sz2 = params.sigma_z * params.sigma_z;
  const double ex2 = gx2 + sx2;  // E[x_i^2]
  const double ez2 = gz2 + sz2;
  const double exz = params.gamma_x * params.gamma_z;  // E[x_i z_i]

  DerivativeTerms terms;
  terms.c2 = sxx * szz - sxz * sxz;
  terms.b2 = 2.0 * (sxx * szz + sxz * sxz);
  terms.c1 = (ex2 * szz + ez2 * sxx - 2.0 * exz * sxz) * terms.c2;
  terms.b1 = 2.0 * (ex2 * szz + ez2 * sxx + 2.0 * exz * sxz) * terms.c2;
  // rho^2 coefficients of the three variance pieces, from expanding
  // ||(1+r) z'z x - (1-r) x'z z||^2 and its z and cross counterparts.
  const double quad_x = sxx * szz + 3.0 * sxz * sxz;
  const double quad_z = quad_x;
  const double quad_xz = 3.0 * sxx * szz + sxz * sxz;
  terms.a1 = ex2 * szz * quad_x + ez2 * sxx * quad_z +
             2.0 * exz * sxz * quad_xz;
  return terms;
}

double mse_exact(const Vector& x, const Vector& z, const LatentParams& params,
                 double rho) {
  if (rho < 0) throw InputError("rho must be nonnegative");
  const Instance inst = make_instance(x, z, params);
  const DerivativeTerms terms = derivative_terms(x, z, params);
  const double det = determinant(inst, rho);

  double bias_x, bias_z;
  bias_terms(inst, rho, bias_x, bias_z);
  const double gx2 = params.gamma_x * params.gamma_x;
  const double gz2 = params.gamma_z * params.gamma_z;
  const double sx2 = params.sigma_x * params.sigma_x;
  const double sz2 = params.sigma_z * params.sigma_z;
  const double squared_bias = bias_x * bias_x * (gx2 + sx2) +
                              bias_z * bias_z * (gz2 + sz2) +
                              2.0 * bias_x * bias_z * params.gamma_x *
                                  params.gamma_z;

  const double variance = inst.pop.sigma_star_sq *
                          (terms.c1 + terms.b1 * rho + terms.a1 * rho * rho) /
                          (det * det);
  return squared_bias + variance + inst.pop.sigma_star_sq;
}

double derivative_at_zero(const Vector& x, const Vector& z,
                          const LatentParams& params) {
  const Instance inst = make_instance(x, z, params);
  const DerivativeTerms t = derivative_terms(x, z, params);
  // The squared bias is O(rho^2), so only the variance slope survives.
  return inst.pop.sigma_star_sq * (t.c2 * t.b1 - 2.0 * t.c1 * t.b2) /
         (t.c2 * t.c2 * t.c2);
}

double fd_derivative_at_zero(const Vector& x, const Vector& z,
                             const LatentParams& params, double h) {
  if (h <= 0) throw InputError("step size must be positive");
  // One-sided domain: evaluate the odd extension via the polynomial forms,
  // which remain valid for small negative rho.
  const Instance inst = make_instance(x, z, params);
  const DerivativeTerms t = derivative_terms(x, z, params);
  auto mse_poly = [&](double rho) {
    const double det = determinant(inst, rho);
    double bias_x, bias_z;
    bias_terms(inst, rho, bias_x, bias_z);
    const double gx2 = params.gamma_x * params.gamma_x;
    const double gz2 = params.gamma_z * params.gamma_z;
    const double sx2 = params.sigma_x * params.sigma_x;
    const double sz2 = params.sigma_z * params.sigma_z;
    const double squared_bias =
        bias_x * bias_x * (gx2 + sx2) + bias_z * bias_z * (gz2 + sz2) +
        2.0 * bias_x * bias_z * params.gamma_x * params.gamma_z;
    const double variance = inst.pop.sigma_star_sq *
                            (t.c1 + t.b1 * rho + t.a1 * rho * rho) /
                            (det * det);
    return squared_bias + variance + inst.pop.sigma_star_sq;
  };
  auto central = [&](double step) {
    return (mse_poly(step) - mse_poly(-step)) / (2.0 * step);
  };
  const double plain = central(h);
  const double exact = derivative_at_zero(x, z, params);
  const double scale = std::max(1.0, std::abs(exact));
  if (std::abs(plain - exact) / scale <= 1e-4) return plain;
  // Richardson refinement: (4 D(h/2) - D(h)) / 3 cancels the h^2 term.
  return (4.0 * central(h / 2.0) - plain) / 3.0;
}

double asymptotic_derivative(const LatentParams& p, Index n) {
  validate(p);
  if (n < 1) throw InputError("n must be positive");
  const double gx2 = p.gamma_x * p.gamma_x;
  const double gz2 = p.gamma_z * p.gamma_z;
  const double sx2 = p.sigma_x * p.sigma_x;
  const double sz2 = p.sigma_z * p.sigma_z;
  const double d = sx2 * gz2 + sz2 * gx2 + sx2 * sz2;
  return -(4.0 / static_cast<double>(n)) * (1.0 + 2.0 * gx2 * gz2 / d) *
         (p.sigma_y * p.sigma_y + p.gamma_y * p.gamma_y * sx2 * sz2 / d);
}

double asymptotic_ratio(const LatentParams& p, Index n) {
  validate(p);
  if (n < 1) throw InputError("n must be positive");
  const double gx2 = p.gamma_x * p.gamma_x;
  const double gz2 = p.gamma_z * p.gamma_z;
  const double sx2 = p.sigma_x * p.sigma_x;
  const double sz2 = p.sigma_z * p.sigma_z;
  const double d = sx2 * gz2 + sz2 * gx2 + sx2 * sz2;
  return -(4.0 / static_cast<double>(n)) * (1.0 + 2.0 * gx2 * gz2 / d);
}

void draw_xz(Rng& rng, const LatentParams& params, Index n, Vector& x,
             Vector& z) {
  const Vector u = rng.normal_vector(n);
  x = params.gamma_x * u + params.sigma_x * rng.normal_vector(n);
  z = params.gamma_z * u + params.sigma_z * rng.normal_vector(n);
}

TheoryReport run_theory_checks(const LatentParams& params, Index n,
                               int n_instances, std::uint64_t seed) {
  if (n_instances < 1) throw InputError("need at least one instance");
  TheoryReport report;
  Rng rng(seed);

  double max_fd_gap = 0.0;
  int negative = 0;
  double sum_ratio_gap = 0.0;
  for (int i = 0; i < n_instances; ++i) {
    Vector x, z;
    draw_xz(rng, params, n, x, z);
    const double exact = derivative_at_zero(x, z, params);
    const double fd = fd_derivative_at_zero(x, z, params);
    const double scale = std::max(1.0, std::abs(exact));
    max_fd_gap = std::max(max_fd_gap, std::abs(exact - fd) / scale);
    if (exact < 0) ++negative;
    const double ratio = exact / mse_exact(x, z, params, 0.0);
    const double asym = asymptotic_ratio(params, n);
    sum_ratio_gap += std::abs(ratio - asym) / std::abs(asym);
  }
  report.max_fd_gap = max_fd_gap;

  {
    TheoryCheck check;
    check.name = "fd_derivative_agreement";
    check.observed = max_fd_gap;
    check.threshold = 1e-5;
    check.pass = max_fd_gap < check.threshold;
    std::ostringstream detail;
    detail << "max relative gap between closed-form and finite-difference "
              "derivative over "
           << n_instances << " draws";
    check.detail = detail.str();
    report.checks.push_back(check);
  }
  {
    TheoryCheck check;
    check.name = "derivative_negative_fraction";
    check.observed =
        static_cast<double>(negative) / static_cast<double>(n_instances);
    check.threshold = 0.95;
    check.pass = check.observed >= check.threshold;
    check.detail = "fraction of draws with a negative derivative at zero";
    report.checks.push_back(check);
  }
  {
    TheoryCheck check;
    check.name = "asymptotic_ratio_consistency";
    check.observed = sum_ratio_gap / n_instances;
    // Finite-n agreement is O(n^{-1/2}); this guards sign and scale.
    check.threshold = 10.0 / std::sqrt(static_cast<double>(n));
    check.pass = check.observed < check.threshold;
    check.detail =
        "mean relative gap between derivative/mse(0) and its large-n limit";
    report.checks.push_back(check);
  }

  for (const auto& check : report.checks)
    report.all_pass = report.all_pass && check.pass;
  return report;
}

}  // namespace theory
}  // namespace coop
