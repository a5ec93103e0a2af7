#include "coop/serialize.hpp"

#include <fstream>
#include <iomanip>

namespace coop {

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector out(static_cast<Index>(j.size()));
  Index at = 0;
  for (const auto& v : j) out[at++] = v.get<double>();
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string family_name(Family family) {
  return family == Family::gaussian ? "gaussian" : "binomial";
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "binomial") return Family::binomial;
  throw InputError("unknown family: " + name);
}

std::string algorithm_name(CoopAlgorithm algorithm) {
  return algorithm == CoopAlgorithm::direct ? "direct" : "one_at_a_time";
}

CoopAlgorithm algorithm_from_name(const std::string& name) {
  if (name == "direct") return CoopAlgorithm::direct;
  if (name == "one_at_a_time") return CoopAlgorithm::one_at_a_time;
  throw InputError("unknown algorithm: " + name);
}

}  // namespace

FitBundle make_bundle(const CoopFit& fit, const MultiViewDataset& dataset) {
  FitBundle bundle;
  bundle.fit = fit;
  for (const auto& v : dataset.views) {
    bundle.column_means.push_back(v.column_means);
    bundle.column_sds.push_back(v.column_sds);
    bundle.column_names.push_back(v.column_names);
  }
  return bundle;
}

nlohmann::json fit_to_json(const FitBundle& bundle) {
  const CoopFit& fit = bundle.fit;
  nlohmann::json j;
  j["schema"] = 1;
  j["family"] = family_name(fit.family);
  j["algorithm"] = algorithm_name(fit.algorithm);
  j["rho"] = fit.rho;
  const bool uniform =
      fit.lambda_per_view.size() == 0 ||
      (fit.lambda_per_view.array() == fit.lambda_per_view[0]).all();
  if (uniform && fit.lambda_per_view.size() > 0)
    j["lambda"] = fit.lambda_per_view[0];
  else
    j["lambda"] = vector_to_json(fit.lambda_per_view);
  j["alpha"] = fit.alpha;
  j["intercept"] = fit.intercept;
  j["objective"] = fit.objective;
  j["n_iter"] = fit.n_iter;
  j["converged"] = fit.converged;
  if (bundle.has_paired_discrepancy)
    j["paired_discrepancy"] = bundle.paired_discrepancy;

  nlohmann::json views = nlohmann::json::array();
  for (std::size_t m = 0; m < fit.thetas.size(); ++m) {
    nlohmann::json view;
    view["name"] = fit.view_names[m];
    view["coefficients"] = vector_to_json(fit.thetas[m]);
    if (m < bundle.column_means.size()) {
      view["column_means"] = vector_to_json(bundle.column_means[m]);
      view["column_sds"] = vector_to_json(bundle.column_sds[m]);
      view["column_names"] = bundle.column_names[m];
    }
    views.push_back(std::move(view));
  }
  j["views"] = views;
  return j;
}

FitBundle fit_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j["schema"].get<int>() != 1)
    throw InputError("fit file has unsupported schema");
  FitBundle bundle;
  CoopFit& fit = bundle.fit;
  fit.family = family_from_name(j.at("family").get<std::string>());
  fit.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  fit.rho = j.at("rho").get<double>();
  fit.alpha = j.at("alpha").get<double>();
  fit.intercept = j.at("intercept").get<double>();
  fit.objective = j.at("objective").get<double>();
  if (j.contains("n_iter")) fit.n_iter = j["n_iter"].get<int>();
  if (j.contains("converged")) fit.converged = j["converged"].get<bool>();
  if (j.contains("paired_discrepancy")) {
    bundle.has_paired_discrepancy = true;
    bundle.paired_discrepancy = j["paired_discrepancy"].get<double>();
  }

  for (const auto& view : j.at("views")) {
    fit.view_names.push_back(view.at("name").get<std::string>());
    fit.thetas.push_back(vector_from_json(view.at("coefficients")));
    if (view.contains("column_means")) {
      bundle.column_means.push_back(vector_from_json(view["column_means"]));
      bundle.column_sds.push_back(vector_from_json(view["column_sds"]));
      std::vector<std::string> names;
      if (view.contains("column_names"))
        names = view["column_names"].get<std::vector<std::string>>();
      bundle.column_names.push_back(std::move(names));
    }
  }

  const auto& lambda = j.at("lambda");
  if (lambda.is_array()) {
    fit.lambda_per_view = vector_from_json(lambda);
  } else {
    fit.lambda_per_view = Vector::Constant(
        static_cast<Index>(fit.thetas.size()), lambda.get<double>());
  }
  return bundle;
}

nlohmann::json cv_to_json(const CVResult& result,
                          const MultiViewDataset& dataset) {
  nlohmann::json j;
  j["schema"] = 1;
  j["seed"] = result.seed;
  j["rule"] = result.rule == SelectionRule::min_error ? "min" : "one_se";
  j["rho_grid"] = vector_to_json(result.rho_grid);
  nlohmann::json grids = nlohmann::json::array();
  for (const auto& grid : result.lambda_grids)
    grids.push_back(vector_to_json(grid));
  j["lambda_grids"] = grids;
  j["mean_error"] = matrix_to_json(result.mean_error);
  j["sd_error"] = matrix_to_json(result.sd_error);
  j["selected"] = {{"rho", result.selected_rho},
                   {"lambda", result.selected_lambda},
                   {"rho_index", result.selected_rho_index},
                   {"lambda_index", result.selected_lambda_index}};
  j["folds"] = {{"n", result.folds.n},
                {"k", result.folds.k},
                {"seed", result.folds.seed},
                {"assignments", result.folds.assignments}};
  if (!result.adaptive_states.empty()) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : result.adaptive_states) {
      states.push_back({{"rho", s.rho},
                        {"lambda_x", s.lambda_x},
                        {"lambda_z", s.lambda_z},
                        {"cv_error_x", s.cv_error_x},
                        {"cv_error_z", s.cv_error_z},
                        {"cv_error_sum", s.cv_error_sum},
                        {"n_iter", s.n_iter},
                        {"swapped", s.swapped},
                        {"penalty_ratio", s.penalty_ratio},
                        {"ratio_clamped", s.ratio_clamped},
                        {"degenerate_target", s.degenerate_target}});
    }
    j["adaptive"] = states;
  }
  j["fit"] = fit_to_json(make_bundle(result.fit, dataset));
  return j;
}

nlohmann::json theory_report_to_json(const theory::TheoryReport& report,
                                     const theory::LatentParams& params,
                                     Index n, int n_instances,
                                     std::uint64_t seed) {
  nlohmann::json j;
  j["schema"] = 1;
  j["n"] = n;
  j["instances"] = n_instances;
  j["seed"] = seed;
  j["params"] = {{"gamma_x", params.gamma_x}, {"gamma_z", params.gamma_z},
                 {"gamma_y", params.gamma_y}, {"sigma_x", params.sigma_x},
                 {"sigma_z", params.sigma_z}, {"sigma_y", params.sigma_y}};
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& check : report.checks) {
    checks.push_back({{"name", check.name},
                      {"pass", check.pass},
                      {"observed", check.observed},
                      {"threshold", check.threshold},
                      {"detail", check.detail}});
  }
  j["checks"] = checks;
  j["all_pass"] = report.all_pass;
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& column_names) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << std::setprecision(17);
  if (!column_names.empty()) {
    if (static_cast<Index>(column_names.size()) != values.cols())
      throw InputError("write_csv: header length mismatch");
    for (std::size_t j = 0; j < column_names.size(); ++j)
      out << (j ? "," : "") << column_names[j];
    out << "\n";
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << values(i, j);
    out << "\n";
  }
}

void write_csv(const std::string& path, const Vector& values,
               const std::string& column_name) {
  Matrix m(values.size(), 1);
  m.col(0) = values;
  write_csv(path, m, std::vector<std::string>{column_name});
}

}  // namespace coop
