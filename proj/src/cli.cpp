#include "coop/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coop/glm.hpp"
#include "coop/serialize.hpp"
#include "coop/simulation.hpp"

namespace coop {

namespace {

std::pair<std::string, std::string> split_view_arg(const std::string& arg) {
  const auto pos = arg.find('=');
  if (pos != std::string::npos)
    return {arg.substr(0, pos), arg.substr(pos + 1)};
  return {std::filesystem::path(arg).stem().string(), arg};
}

Vector parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw InputError("cannot parse " + what + " entry: " + token);
    }
  }
  if (values.empty()) throw InputError(what + " list is empty");
  Vector out(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    out[static_cast<Index>(i)] = values[i];
  return out;
}

// Fills options the user left at their defaults from a JSON config file;
// command line flags win.
class ConfigMerge {
 public:
  ConfigMerge(const CLI::App& app, const std::string& path) : app_(app) {
    if (!path.empty()) config_ = read_json_file(path);
  }

  template <typename T>
  void merge(const std::string& flag, const std::string& key, T& value) const {
    if (config_.is_null() || !config_.contains(key)) return;
    const CLI::Option* opt = app_.get_option_no_throw("--" + flag);
    if (opt != nullptr && opt->count() > 0) return;
    value = config_.at(key).get<T>();
  }

 private:
  const CLI::App& app_;
  nlohmann::json config_;
};

MultiViewDataset load_dataset(const std::vector<std::string>& view_args,
                              const std::string& response_path, bool header,
                              Family family) {
  if (view_args.empty()) throw InputError("no views given (use --view)");
  if (response_path.empty()) throw InputError("no response given");
  std::vector<DataView> views;
  for (const auto& arg : view_args) {
    const auto [name, path] = split_view_arg(arg);
    views.push_back(load_view(path, header, name));
  }
  const Vector y = load_response_values(response_path, header);
  return assemble(std::move(views), y, family);
}

std::size_t view_index_by_name(const MultiViewDataset& dataset,
                               const std::string& name) {
  for (std::size_t m = 0; m < dataset.n_views(); ++m)
    if (dataset.views[m].name == name) return m;
  throw InputError("unknown view name: " + name);
}

PairPenalty load_pairs(const std::string& path,
                       const MultiViewDataset& dataset) {
  const nlohmann::json j = read_json_file(path);
  PairPenalty pairs;
  pairs.rho2 = j.at("rho2").get<double>();
  for (const auto& entry : j.at("pairs")) {
    FeaturePair pair;
    pair.view_a = view_index_by_name(dataset, entry.at("view_a"));
    pair.col_a = entry.at("col_a").get<Index>();
    pair.view_b = view_index_by_name(dataset, entry.at("view_b"));
    pair.col_b = entry.at("col_b").get<Index>();
    pairs.pairs.push_back(pair);
  }
  return pairs;
}

void write_path_csv(const std::string& path, const CoopPath& coop_path) {
  std::vector<std::string> header{"lambda", "objective", "df_total"};
  const auto& names = coop_path.fits.front().view_names;
  for (const auto& name : names) header.push_back("df_" + name);
  Matrix table(coop_path.lambdas.size(), static_cast<Index>(header.size()));
  for (Index i = 0; i < coop_path.lambdas.size(); ++i) {
    const auto& df = coop_path.df_per_view[static_cast<std::size_t>(i)];
    table(i, 0) = coop_path.lambdas[i];
    table(i, 1) = coop_path.fits[static_cast<std::size_t>(i)].objective;
    table(i, 2) = 0;
    for (std::size_t m = 0; m < df.size(); ++m) {
      table(i, 2) += df[m];
      table(i, static_cast<Index>(3 + m)) = df[m];
    }
  }
  write_csv(path, table, header);
}

int cmd_fit(CLI::App& app, const std::vector<std::string>& view_args,
            const std::string& response_path, bool header,
            const std::string& family_name, const std::string& config_path,
            const std::string& output_dir, double rho,
            const std::string& lambda_arg, const std::string& algorithm,
            int n_lambda, double min_ratio, double alpha,
            const std::string& pairs_path, double tol, int max_sweeps) {
  ConfigMerge config(app, config_path);
  auto views = view_args;
  auto response = response_path;
  auto head = header;
  auto fam = family_name;
  auto out_dir = output_dir;
  auto rho_v = rho;
  auto lambda_v = lambda_arg;
  auto algo = algorithm;
  auto n_lambda_v = n_lambda;
  auto min_ratio_v = min_ratio;
  auto alpha_v = alpha;
  auto pairs_v = pairs_path;
  config.merge("view", "views", views);
  config.merge("response", "response", response);
  config.merge("header", "header", head);
  config.merge("family", "family", fam);
  config.merge("output-dir", "output_dir", out_dir);
  config.merge("rho", "rho", rho_v);
  config.merge("lambda", "lambda", lambda_v);
  config.merge("algorithm", "algorithm", algo);
  config.merge("n-lambda", "n_lambda", n_lambda_v);
  config.merge("min-ratio", "min_ratio", min_ratio_v);
  config.merge("alpha-mix", "alpha_mix", alpha_v);
  config.merge("pairs", "pairs", pairs_v);

  const Family family = fam == "binomial" ? Family::binomial
                        : fam == "gaussian"
                            ? Family::gaussian
                            : throw InputError("unknown family: " + fam);
  MultiViewDataset dataset = load_dataset(views, response, head, family);
  std::filesystem::create_directories(out_dir);

  PairPenalty pairs;
  const bool has_pairs = !pairs_v.empty();
  if (has_pairs) pairs = load_pairs(pairs_v, dataset);

  if (family == Family::binomial) {
    if (lambda_v.empty())
      throw InputError("binomial fits need an explicit --lambda");
    const Vector lambdas = parse_double_list(lambda_v, "lambda");
    if (lambdas.size() != 1)
      throw InputError("binomial fits take a single lambda");
    if (has_pairs)
      throw InputError("paired penalties are gaussian-only");
    LogisticOptions opt;
    opt.alpha = alpha_v;
    CoopFit fit = fit_coop_logistic(dataset, rho_v, lambdas[0], opt);
    write_json_file(out_dir + "/fit.json",
                    fit_to_json(make_bundle(fit, dataset)));
    std::cout << "wrote " << out_dir << "/fit.json\n";
    return 0;
  }

  if (algo == "one_at_a_time") {
    if (lambda_v.empty())
      throw InputError("one_at_a_time fits need explicit --lambda values");
    Vector lambdas = parse_double_list(lambda_v, "lambda");
    if (lambdas.size() == 1)
      lambdas = Vector::Constant(static_cast<Index>(dataset.n_views()),
                                 lambdas[0]);
    if (lambdas.size() != static_cast<Index>(dataset.n_views()))
      throw InputError("lambda list does not match view count");
    if (has_pairs)
      throw InputError("paired penalties need the direct algorithm");
    CoopFit fit = coop_iterative_fit(dataset, rho_v, lambdas, 1e-8, 200,
                                     alpha_v, tol, max_sweeps);
    write_json_file(out_dir + "/fit.json",
                    fit_to_json(make_bundle(fit, dataset)));
    std::cout << "wrote " << out_dir << "/fit.json\n";
    return 0;
  }
  if (algo != "direct")
    throw InputError("unknown algorithm: " + algo);

  Vector lambdas;
  if (!lambda_v.empty()) {
    lambdas = parse_double_list(lambda_v, "lambda");
    if (lambdas.size() != 1)
      throw InputError("the direct algorithm takes a single lambda");
  } else {
    AugmentedSystem sys = build_augmented(dataset, rho_v);
    if (has_pairs) sys = add_paired_rows(std::move(sys), pairs);
    PenaltySpec spec;
    spec.alpha = alpha_v;
    lambdas = lambda_grid(sys.x_tilde, sys.y_tilde, spec, n_lambda_v,
                          min_ratio_v);
  }

  CoopPath path =
      coop_direct_fit(dataset, rho_v, lambdas, alpha_v, {},
                      has_pairs ? &pairs : nullptr, tol, max_sweeps);
  FitBundle bundle = make_bundle(path.fits.back(), dataset);
  if (has_pairs) {
    bundle.has_paired_discrepancy = true;
    bundle.paired_discrepancy = paired_discrepancy(path.fits.back(), pairs);
  }
  write_json_file(out_dir + "/fit.json", fit_to_json(bundle));
  std::cout << "wrote " << out_dir << "/fit.json\n";
  if (lambdas.size() > 1) {
    write_path_csv(out_dir + "/path.csv", path);
    std::cout << "wrote " << out_dir << "/path.csv\n";
  }
  return 0;
}

int cmd_cv(CLI::App& app, const std::vector<std::string>& view_args,
           const std::string& response_path, bool header,
           const std::string& config_path, const std::string& output_dir,
           const std::string& rho_grid_arg, int n_lambda, double min_ratio,
           double alpha, int k_folds, std::uint64_t seed,
           const std::string& rule_name, bool adaptive, unsigned threads) {
  ConfigMerge config(app, config_path);
  auto views = view_args;
  auto response = response_path;
  auto head = header;
  auto out_dir = output_dir;
  auto rho_grid_v = rho_grid_arg;
  auto n_lambda_v = n_lambda;
  auto min_ratio_v = min_ratio;
  auto alpha_v = alpha;
  auto k_v = k_folds;
  auto seed_v = seed;
  auto rule_v = rule_name;
  auto adaptive_v = adaptive;
  auto threads_v = threads;
  config.merge("view", "views", views);
  config.merge("response", "response", response);
  config.merge("header", "header", head);
  config.merge("output-dir", "output_dir", out_dir);
  config.merge("rho-grid", "rho_grid", rho_grid_v);
  config.merge("n-lambda", "n_lambda", n_lambda_v);
  config.merge("min-ratio", "min_ratio", min_ratio_v);
  config.merge("alpha-mix", "alpha_mix", alpha_v);
  config.merge("k-folds", "k_folds", k_v);
  config.merge("seed", "seed", seed_v);
  config.merge("rule", "rule", rule_v);
  config.merge("adaptive", "adaptive", adaptive_v);
  config.merge("threads", "threads", threads_v);

  MultiViewDataset dataset =
      load_dataset(views, response, head, Family::gaussian);
  std::filesystem::create_directories(out_dir);

  CVOptions opt;
  opt.rho_grid = parse_double_list(rho_grid_v, "rho grid");
  opt.n_lambda = n_lambda_v;
  opt.min_ratio = min_ratio_v;
  opt.alpha = alpha_v;
  opt.k_folds = k_v;
  opt.seed = seed_v;
  opt.threads = threads_v;
  if (rule_v == "min")
    opt.rule = SelectionRule::min_error;
  else if (rule_v == "1se" || rule_v == "one_se")
    opt.rule = SelectionRule::one_se;
  else
    throw InputError("unknown selection rule: " + rule_v);

  const CVResult result =
      adaptive_v ? adaptive_direct(dataset, opt) : cv_coop(dataset, opt);
  write_json_file(out_dir + "/cv.json", cv_to_json(result, dataset));
  std::cout << "wrote " << out_dir << "/cv.json\n"
            << "selected rho=" << result.selected_rho
            << " lambda=" << result.selected_lambda << "\n";
  return 0;
}

int cmd_predict(const std::string& fit_path,
                const std::vector<std::string>& view_args, bool header,
                const std::string& output_path) {
  if (fit_path.empty()) throw InputError("no fit file given");
  const FitBundle bundle = fit_from_json(read_json_file(fit_path));
  if (bundle.column_means.empty())
    throw InputError("fit file lacks standardization statistics");

  std::vector<Matrix> raw(bundle.fit.thetas.size());
  std::vector<bool> seen(bundle.fit.thetas.size(), false);
  if (view_args.empty()) throw InputError("no views given (use --view)");
  for (const auto& arg : view_args) {
    const auto [name, path] = split_view_arg(arg);
    bool matched = false;
    for (std::size_t m = 0; m < bundle.fit.view_names.size(); ++m) {
      if (bundle.fit.view_names[m] == name) {
        raw[m] = load_view(path, header, name).values;
        seen[m] = true;
        matched = true;
        break;
      }
    }
    if (!matched) throw InputError("fit has no view named " + name);
  }
  for (std::size_t m = 0; m < seen.size(); ++m)
    if (!seen[m])
      throw InputError("missing view: " + bundle.fit.view_names[m]);

  const Vector predictions = predict_with_stats(
      bundle.fit, bundle.column_means, bundle.column_sds, raw);
  const std::string column =
      bundle.fit.family == Family::binomial ? "probability" : "prediction";
  if (!output_path.empty() &&
      std::filesystem::path(output_path).has_parent_path())
    std::filesystem::create_directories(
        std::filesystem::path(output_path).parent_path());
  write_csv(output_path, predictions, column);
  std::cout << "wrote " << output_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& output_dir, Index n,
                 const std::string& p_arg, Index p_u, double s_u,
                 const std::string& t_arg, const std::string& beta_arg,
                 double sigma, double snr, std::uint64_t seed) {
  sim::FactorSimParams params;
  params.n = n;
  const Vector p = parse_double_list(p_arg, "p");
  for (Index i = 0; i < p.size(); ++i)
    params.p.push_back(static_cast<Index>(p[i]));
  params.p_u = p_u;
  params.s_u = s_u;
  const Vector t = parse_double_list(t_arg, "t");
  for (Index i = 0; i < t.size(); ++i) params.t.push_back(t[i]);
  Vector beta = parse_double_list(beta_arg, "beta-u");
  if (beta.size() == 1) beta = Vector::Constant(p_u, beta[0]);
  params.beta_u = beta;
  params.seed = seed;

  if (sigma > 0 && snr > 0)
    throw InputError("give either --sigma or --snr, not both");
  sim::SimulatedDataset data;
  if (sigma > 0) {
    params.sigma = sigma;
    data = sim::gen_factor_dataset(params);
  } else {
    data = sim::gen_factor_dataset_snr(params, snr > 0 ? snr : 1.8);
  }

  std::filesystem::create_directories(output_dir);
  nlohmann::json sidecar;
  sidecar["schema"] = 1;
  sidecar["n"] = params.n;
  sidecar["p"] = params.p;
  sidecar["p_u"] = params.p_u;
  sidecar["s_u"] = params.s_u;
  sidecar["t"] = params.t;
  sidecar["beta_u"] = std::vector<double>(
      params.beta_u.data(), params.beta_u.data() + params.beta_u.size());
  sidecar["sigma"] = data.sigma;
  sidecar["realized_snr"] = data.realized_snr;
  sidecar["seed"] = params.seed;
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t m = 0; m < data.x.size(); ++m) {
    const std::string name = "view" + std::to_string(m + 1);
    const std::string file = output_dir + "/" + name + ".csv";
    write_csv(file, data.x[m], {});
    files.push_back(name + ".csv");
  }
  sidecar["view_files"] = files;
  sidecar["response_file"] = "response.csv";
  Matrix ycol(data.y.size(), 1);
  ycol.col(0) = data.y;
  write_csv(output_dir + "/response.csv", ycol, {});
  write_json_file(output_dir + "/params.json", sidecar);
  std::cout << "wrote " << data.x.size() << " views, response, params to "
            << output_dir << " (realized SNR " << data.realized_snr << ")\n";
  return 0;
}

int cmd_theory_check(const std::string& output_path, double gamma_x,
                     double gamma_z, double gamma_y, double sigma_x,
                     double sigma_z, double sigma_y, Index n, int instances,
                     std::uint64_t seed) {
  theory::LatentParams params;
  params.gamma_x = gamma_x;
  params.gamma_z = gamma_z;
  params.gamma_y = gamma_y;
  params.sigma_x = sigma_x;
  params.sigma_z = sigma_z;
  params.sigma_y = sigma_y;

  const theory::TheoryReport report =
      theory::run_theory_checks(params, n, instances, seed);
  const nlohmann::json j =
      theory_report_to_json(report, params, n, instances, seed);
  if (!output_path.empty()) {
    if (std::filesystem::path(output_path).has_parent_path())
      std::filesystem::create_directories(
          std::filesystem::path(output_path).parent_path());
    write_json_file(output_path, j);
    std::cout << "wrote " << output_path << "\n";
  }
  for (const auto& check : report.checks)
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name
              << " observed=" << check.observed
              << " threshold=" << check.threshold << "\n";
  if (!report.all_pass)
    throw NumericError("theory self-checks failed");
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"cooperative multiview regression toolkit"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit at fixed settings or a path");
  std::vector<std::string> fit_views;
  std::string fit_response, fit_family = "gaussian", fit_config;
  std::string fit_output = ".", fit_lambda, fit_algorithm = "direct";
  std::string fit_pairs;
  bool fit_header = false;
  double fit_rho = 0.0, fit_min_ratio = 1e-3, fit_alpha = 1.0;
  double fit_tol = 1e-7;
  int fit_n_lambda = 50, fit_max_sweeps = 10000;
  fit->add_option("--view", fit_views, "view as name=path (repeatable)");
  fit->add_option("--response", fit_response, "response CSV path");
  fit->add_flag("--header", fit_header, "input files have a header line");
  fit->add_option("--family", fit_family, "gaussian or binomial");
  fit->add_option("--config", fit_config, "JSON config file (flags win)");
  fit->add_option("--output-dir", fit_output, "output directory");
  fit->add_option("--rho", fit_rho, "agreement weight");
  fit->add_option("--lambda", fit_lambda,
                  "penalty level (comma list = per view, one_at_a_time)");
  fit->add_option("--algorithm", fit_algorithm, "direct or one_at_a_time");
  fit->add_option("--n-lambda", fit_n_lambda, "path length when no --lambda");
  fit->add_option("--min-ratio", fit_min_ratio, "smallest/largest lambda");
  fit->add_option("--alpha-mix", fit_alpha, "l1 share of the penalty");
  fit->add_option("--pairs", fit_pairs, "paired-feature penalty JSON");
  fit->add_option("--tol", fit_tol, "solver tolerance");
  fit->add_option("--max-sweeps", fit_max_sweeps, "solver sweep cap");

  // cv
  auto* cv = app.add_subcommand("cv", "cross-validate over (rho, lambda)");
  std::vector<std::string> cv_views;
  std::string cv_response, cv_config, cv_output = ".";
  std::string cv_rho_grid = "0,0.25,0.5,1,2,4,8", cv_rule = "min";
  bool cv_header = false, cv_adaptive = false;
  double cv_min_ratio = 1e-3, cv_alpha = 1.0;
  int cv_n_lambda = 50, cv_k = 10;
  std::uint64_t cv_seed = 1;
  unsigned cv_threads = 1;
  cv->add_option("--view", cv_views, "view as name=path (repeatable)");
  cv->add_option("--response", cv_response, "response CSV path");
  cv->add_flag("--header", cv_header, "input files have a header line");
  cv->add_option("--config", cv_config, "JSON config file (flags win)");
  cv->add_option("--output-dir", cv_output, "output directory");
  cv->add_option("--rho-grid", cv_rho_grid, "comma list of rho values");
  cv->add_option("--n-lambda", cv_n_lambda, "lambda grid length");
  cv->add_option("--min-ratio", cv_min_ratio, "smallest/largest lambda");
  cv->add_option("--alpha-mix", cv_alpha, "l1 share of the penalty");
  cv->add_option("--k-folds", cv_k, "number of folds");
  cv->add_option("--seed", cv_seed, "fold shuffle seed");
  cv->add_option("--rule", cv_rule, "min or 1se");
  cv->add_flag("--adaptive", cv_adaptive,
               "tune a per-view penalty ratio first");
  cv->add_option("--threads", cv_threads, "worker threads");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "score new data");
  std::string predict_fit, predict_output = "predictions.csv";
  std::vector<std::string> predict_views;
  bool predict_header = false;
  predict_cmd->add_option("--fit", predict_fit, "fit.json from a fit run");
  predict_cmd->add_option("--view", predict_views,
                          "view as name=path (repeatable)");
  predict_cmd->add_flag("--header", predict_header,
                        "input files have a header line");
  predict_cmd->add_option("--output", predict_output, "output CSV");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw a factor dataset");
  std::string sim_output = "sim", sim_p = "100,100", sim_t = "2,2";
  std::string sim_beta = "2";
  Index sim_n = 200, sim_p_u = 30;
  double sim_s_u = 1.0, sim_sigma = -1.0, sim_snr = -1.0;
  std::uint64_t sim_seed = 1;
  simulate->add_option("--output-dir", sim_output, "output directory");
  simulate->add_option("--n", sim_n, "rows");
  simulate->add_option("--p", sim_p, "columns per view (comma list)");
  simulate->add_option("--p-u", sim_p_u, "shared factors");
  simulate->add_option("--s-u", sim_s_u, "factor scale");
  simulate->add_option("--t", sim_t, "factor strength per view");
  simulate->add_option("--beta-u", sim_beta,
                       "factor coefficients (scalar or comma list)");
  simulate->add_option("--sigma", sim_sigma, "noise SD");
  simulate->add_option("--snr", sim_snr, "target signal-to-noise ratio");
  simulate->add_option("--seed", sim_seed, "seed");

  // theory-check
  auto* theory_cmd =
      app.add_subcommand("theory-check", "run the closed-form self-checks");
  std::string theory_output = "theory_report.json";
  double th_gamma_x = 1, th_gamma_z = 1, th_gamma_y = 1;
  double th_sigma_x = 1, th_sigma_z = 1, th_sigma_y = 1;
  Index th_n = 200;
  int th_instances = 50;
  std::uint64_t th_seed = 1;
  theory_cmd->add_option("--output", theory_output, "report JSON path");
  theory_cmd->add_option("--gamma-x", th_gamma_x, "factor loading of x");
  theory_cmd->add_option("--gamma-z", th_gamma_z, "factor loading of z");
  theory_cmd->add_option("--gamma-y", th_gamma_y, "factor loading of y");
  theory_cmd->add_option("--sigma-x", th_sigma_x, "noise SD of x");
  theory_cmd->add_option("--sigma-z", th_sigma_z, "noise SD of z");
  theory_cmd->add_option("--sigma-y", th_sigma_y, "noise SD of y");
  theory_cmd->add_option("--n", th_n, "rows per draw");
  theory_cmd->add_option("--instances", th_instances, "number of draws");
  theory_cmd->add_option("--seed", th_seed, "seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed())
      return cmd_fit(*fit, fit_views, fit_response, fit_header, fit_family,
                     fit_config, fit_output, fit_rho, fit_lambda,
                     fit_algorithm, fit_n_lambda, fit_min_ratio, fit_alpha,
                     fit_pairs, fit_tol, fit_max_sweeps);
    if (cv->parsed())
      return cmd_cv(*cv, cv_views, cv_response, cv_header, cv_config,
                    cv_output, cv_rho_grid, cv_n_lambda, cv_min_ratio,
                    cv_alpha, cv_k, cv_seed, cv_rule, cv_adaptive,
                    cv_threads);
    if (predict_cmd->parsed())
      return cmd_predict(predict_fit, predict_views, predict_header,
                         predict_output);
    if (simulate->parsed())
      return cmd_simulate(sim_output, sim_n, sim_p, sim_p_u, sim_s_u, sim_t,
                          sim_beta, sim_sigma, sim_snr, sim_seed);
    if (theory_cmd->parsed())
      return cmd_theory_check(theory_output, th_gamma_x, th_gamma_z,
                              th_gamma_y, th_sigma_x, th_sigma_z, th_sigma_y,
                              th_n, th_instances, th_seed);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace coop
