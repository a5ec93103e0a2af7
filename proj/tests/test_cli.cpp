#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "coop/cli.hpp"
#include "coop/serialize.hpp"
#include "test_utils.hpp"

using namespace coop;
using testutil::TempDir;
using testutil::write_text;

namespace {

int run(const std::vector<std::string>& args) { return run_command(args); }

// Writes a small two-view regression problem into dir.
void write_problem(const TempDir& dir, std::uint64_t seed = 31, Index n = 40) {
  Rng rng(seed);
  Matrix x = rng.normal_matrix(n, 4);
  Matrix z = rng.normal_matrix(n, 3);
  Vector y = 2.0 * x.col(0) - z.col(1) + 0.3 * rng.normal_vector(n);
  write_csv(dir.file("x.csv"), x, {});
  write_csv(dir.file("z.csv"), z, {});
  Matrix ym(n, 1);
  ym.col(0) = y;
  write_csv(dir.file("y.csv"), ym, {});
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fit writes a model file and a path table") {
  TempDir dir;
  write_problem(dir);

  // Fixed penalty: one model, no path.
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho", "0.5", "--lambda", "0.3", "--output-dir",
             dir.file("out1")}) == 0);
  nlohmann::json fit = read_json_file(dir.file("out1/fit.json"));
  CHECK(fit["schema"] == 1);
  CHECK(fit["rho"] == 0.5);
  CHECK(fit["lambda"] == 0.3);
  CHECK(fit["views"][0]["name"] == "a");
  CHECK(fit["views"][1]["name"] == "b");
  CHECK(fit["converged"] == true);

  // No penalty given: a path plus the model at its smallest value.
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho", "1", "--n-lambda", "7", "--output-dir",
             dir.file("out2")}) == 0);
  std::ifstream path_csv(dir.file("out2/path.csv"));
  std::string header;
  std::getline(path_csv, header);
  CHECK(header == "lambda,objective,df_total,df_a,df_b");
  int rows = 0;
  for (std::string line; std::getline(path_csv, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("predictions reuse the stored standardization") {
  TempDir dir;
  write_problem(dir, 32);
  REQUIRE(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
               "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
               "--rho", "0.25", "--lambda", "0.05", "--output-dir",
               dir.file("m")}) == 0);
  CHECK(run({"predict", "--fit", dir.file("m/fit.json"), "--view",
             "a=" + dir.file("x.csv"), "--view", "b=" + dir.file("z.csv"),
             "--output", dir.file("preds.csv")}) == 0);

  DataView preds = load_view(dir.file("preds.csv"), true);
  REQUIRE(preds.rows() == 40);
  CHECK(preds.column_names[0] == "prediction");

  // Against an in-process reconstruction.
  FitBundle bundle = fit_from_json(read_json_file(dir.file("m/fit.json")));
  DataView xv = load_view(dir.file("x.csv"), false);
  DataView zv = load_view(dir.file("z.csv"), false);
  Vector manual = predict_with_stats(bundle.fit, bundle.column_means,
                                     bundle.column_sds,
                                     {xv.values, zv.values});
  CHECK((preds.values.col(0) - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cross-validation emits a selection report") {
  TempDir dir;
  write_problem(dir, 33, 30);
  CHECK(run({"cv", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho-grid", "0,0.5,1", "--n-lambda", "6", "--k-folds", "3",
             "--seed", "4", "--output-dir", dir.file("cv")}) == 0);
  nlohmann::json cv = read_json_file(dir.file("cv/cv.json"));
  CHECK(cv["schema"] == 1);
  CHECK(cv["rho_grid"].size() == 3);
  CHECK(cv["selected"].contains("rho"));
  CHECK(cv["folds"]["seed"] == 4);
  CHECK(cv["fit"]["schema"] == 1);

  CHECK(run({"cv", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho-grid", "0,1", "--n-lambda", "6", "--k-folds", "3",
             "--rule", "1se", "--adaptive", "--output-dir",
             dir.file("cv2")}) == 0);
  nlohmann::json cv2 = read_json_file(dir.file("cv2/cv.json"));
  CHECK(cv2["rule"] == "one_se");
  CHECK(cv2.contains("adaptive"));
  CHECK(cv2["adaptive"].size() == 2);
}

TEST_CASE("simulation writes views, response, and a parameter sidecar") {
  TempDir dir;
  CHECK(run({"simulate", "--n", "50", "--p", "6,5", "--p-u", "3", "--t",
             "2,1", "--snr", "1.8", "--seed", "12", "--output-dir",
             dir.file("sim")}) == 0);
  DataView v1 = load_view(dir.file("sim/view1.csv"), false);
  DataView v2 = load_view(dir.file("sim/view2.csv"), false);
  Vector y = load_response_values(dir.file("sim/response.csv"), false);
  CHECK(v1.rows() == 50);
  CHECK(v1.cols() == 6);
  CHECK(v2.cols() == 5);
  CHECK(y.size() == 50);
  nlohmann::json params = read_json_file(dir.file("sim/params.json"));
  CHECK(params["schema"] == 1);
  CHECK(params["realized_snr"] == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(params["seed"] == 12);

  // Same seed, same files.
  CHECK(run({"simulate", "--n", "50", "--p", "6,5", "--p-u", "3", "--t",
             "2,1", "--snr", "1.8", "--seed", "12", "--output-dir",
             dir.file("sim2")}) == 0);
  CHECK(testutil::slurp(dir.file("sim2/view1.csv")) ==
        testutil::slurp(dir.file("sim/view1.csv")));
}

TEST_CASE("binomial fits produce probabilities") {
  TempDir dir;
  Rng rng(34);
  Matrix x = rng.normal_matrix(50, 3);
  Matrix z = rng.normal_matrix(50, 3);
  Vector y(50);
  for (Index i = 0; i < 50; ++i)
    y[i] = x(i, 0) + z(i, 0) > 0 ? 1.0 : 0.0;
  write_csv(dir.file("x.csv"), x, {});
  write_csv(dir.file("z.csv"), z, {});
  Matrix ym(50, 1);
  ym.col(0) = y;
  write_csv(dir.file("y.csv"), ym, {});

  CHECK(run({"fit", "--family", "binomial", "--view",
             "a=" + dir.file("x.csv"), "--view", "b=" + dir.file("z.csv"),
             "--response", dir.file("y.csv"), "--rho", "0.5", "--lambda",
             "0.5", "--output-dir", dir.file("out")}) == 0);
  nlohmann::json fit = read_json_file(dir.file("out/fit.json"));
  CHECK(fit["family"] == "binomial");

  CHECK(run({"predict", "--fit", dir.file("out/fit.json"), "--view",
             "a=" + dir.file("x.csv"), "--view", "b=" + dir.file("z.csv"),
             "--output", dir.file("p.csv")}) == 0);
  DataView p = load_view(dir.file("p.csv"), true);
  CHECK(p.column_names[0] == "probability");
  CHECK(p.values.minCoeff() > 0.0);
  CHECK(p.values.maxCoeff() < 1.0);
}

TEST_CASE("paired feature penalties show up in the report") {
  TempDir dir;
  write_problem(dir, 35);
  auto fit_with_rho2 = [&](double rho2, const std::string& out) {
    nlohmann::json pairs;
    pairs["rho2"] = rho2;
    pairs["pairs"] = nlohmann::json::array();
    pairs["pairs"].push_back(
        {{"view_a", "a"}, {"col_a", 0}, {"view_b", "b"}, {"col_b", 0}});
    write_json_file(dir.file("pairs.json"), pairs);
    REQUIRE(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
                 "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
                 "--rho", "0.5", "--lambda", "0.05", "--pairs",
                 dir.file("pairs.json"), "--output-dir", dir.file(out)}) == 0);
    nlohmann::json fit = read_json_file(dir.file(out + "/fit.json"));
    REQUIRE(fit.contains("paired_discrepancy"));
    return fit["paired_discrepancy"].get<double>();
  };
  const double weak = fit_with_rho2(10.0, "out_weak");
  const double strong = fit_with_rho2(1e4, "out_strong");
  CHECK(strong < weak);
  CHECK(strong < 1e-3);
}

TEST_CASE("config files fill in unset flags only") {
  TempDir dir;
  write_problem(dir, 36);
  nlohmann::json config;
  config["rho"] = 2.0;
  config["lambda"] = "0.4";
  write_json_file(dir.file("config.json"), config);

  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--config", dir.file("config.json"), "--output-dir",
             dir.file("c1")}) == 0);
  CHECK(read_json_file(dir.file("c1/fit.json"))["rho"] == 2.0);

  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--config", dir.file("config.json"), "--rho", "0.25",
             "--output-dir", dir.file("c2")}) == 0);
  CHECK(read_json_file(dir.file("c2/fit.json"))["rho"] == 0.25);
}

TEST_CASE("the one-at-a-time solver is reachable from the command line") {
  TempDir dir;
  write_problem(dir, 37);
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho", "0.5", "--lambda", "0.3", "--algorithm",
             "one_at_a_time", "--output-dir", dir.file("iter")}) == 0);
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--view",
             "b=" + dir.file("z.csv"), "--response", dir.file("y.csv"),
             "--rho", "0.5", "--lambda", "0.3", "--output-dir",
             dir.file("direct")}) == 0);
  nlohmann::json a = read_json_file(dir.file("iter/fit.json"));
  nlohmann::json b = read_json_file(dir.file("direct/fit.json"));
  CHECK(a["algorithm"] == "one_at_a_time");
  CHECK(b["algorithm"] == "direct");
  for (int m = 0; m < 2; ++m)
    for (std::size_t j = 0; j < a["views"][m]["coefficients"].size(); ++j)
      CHECK(a["views"][m]["coefficients"][j].get<double>() ==
            doctest::Approx(b["views"][m]["coefficients"][j].get<double>())
                .epsilon(1e-3));
}

TEST_CASE("theory self-checks run from the command line") {
  TempDir dir;
  CHECK(run({"theory-check", "--n", "100", "--instances", "5", "--seed", "2",
             "--output", dir.file("report.json")}) == 0);
  nlohmann::json report = read_json_file(dir.file("report.json"));
  CHECK(report["all_pass"] == true);
}

TEST_CASE("input problems exit with 2, numeric failures with 3") {
  TempDir dir;
  write_problem(dir, 38);

  CHECK(run({"fit", "--view", "a=" + dir.file("nope.csv"), "--response",
             dir.file("y.csv"), "--rho", "0.5", "--lambda", "0.1",
             "--output-dir", dir.file("o")}) == 2);
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--response",
             dir.file("y.csv"), "--rho", "-1", "--lambda", "0.1",
             "--output-dir", dir.file("o")}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--response",
             dir.file("y.csv"), "--rho", "0.5", "--lambda", "not-a-number",
             "--output-dir", dir.file("o")}) == 2);

  // A flat response defeats the penalty grid: numeric failure.
  Matrix flat(40, 1);
  flat.col(0).setConstant(5.0);
  write_csv(dir.file("flat.csv"), flat, {});
  CHECK(run({"fit", "--view", "a=" + dir.file("x.csv"), "--response",
             dir.file("flat.csv"), "--rho", "0.5", "--output-dir",
             dir.file("o")}) == 3);

  CHECK(run({"--help"}) == 0);
  CHECK(run({"fit", "--help"}) == 0);
}

}  // TEST_SUITE
