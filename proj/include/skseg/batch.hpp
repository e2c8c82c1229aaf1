#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skseg/metrics.hpp"
#include "skseg/stats.hpp"

namespace skseg {

struct EvaluateOptions {
  std::string pred_name = "c_f";  // stage file used when predictions are per-slice directories
  double pred_threshold = 0.8;    // prediction pixel is foreground iff value / 255 > threshold
  int target_scale = 1;           // targets are pixel-replicated by this factor first
  SsimMode ssim_mode = SsimMode::kGlobal;
  double c1 = kSsimC1, c2 = kSsimC2;
  StdConvention conv = StdConvention::kPopulation;
};

struct EvaluateResult {
  std::vector<SliceRecord> records;
  std::vector<std::string> errors;  // "patient/slice: message"
  std::size_t slices = 0;
};

// Targets: <target>/<patient>/<id>.png, or <target>/<id>.png for a single
// patient. Predictions: <pred>/<patient>/<id>.png or
// <pred>/<patient>/<id>/<pred_name>.png. Writes <out>/<patient>/report.csv
// and <out>/per_patient.csv.
EvaluateResult evaluate_dirs(const std::filesystem::path& pred, const std::filesystem::path& target,
                             const std::filesystem::path& out, const EvaluateOptions& opts);

// A report.csv file, or a directory holding <patient>/report.csv files
// (or report.csv directly). Patient ids come from the parent directory.
std::vector<SliceRecord> load_reports(const std::filesystem::path& source);

// Writes <out>/comparison.csv and <out>/boxplot.csv.
std::vector<MethodSummary> compare_reports(const std::filesystem::path& a, const std::string& name_a,
                                           const std::filesystem::path& b, const std::string& name_b,
                                           const std::filesystem::path& out, StdConvention conv,
                                           Index boxplot_index);

}  // namespace skseg
