#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coop/cooperative.hpp"
#include "coop/model_selection.hpp"
#include "coop/theory.hpp"

namespace coop {

// A fit plus the per-view standardization statistics needed to score new
// raw data later.
struct FitBundle {
  CoopFit fit;
  std::vector<Vector> column_means;
  std::vector<Vector> column_sds;
  std::vector<std::vector<std::string>> column_names;
  bool has_paired_discrepancy = false;
  double paired_discrepancy = 0.0;
};

FitBundle make_bundle(const CoopFit& fit, const MultiViewDataset& dataset);

nlohmann::json fit_to_json(const FitBundle& bundle);
FitBundle fit_from_json(const nlohmann::json& j);

nlohmann::json cv_to_json(const CVResult& result,
                          const MultiViewDataset& dataset);

nlohmann::json theory_report_to_json(const theory::TheoryReport& report,
                                     const theory::LatentParams& params,
                                     Index n, int n_instances,
                                     std::uint64_t seed);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& column_names);
void write_csv(const std::string& path, const Vector& values,
               const std::string& column_name);

}  // namespace coop
