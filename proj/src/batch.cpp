#include "skseg/batch.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "skseg/error.hpp"
#include "skseg/image_io.hpp"
#include "skseg/imgproc.hpp"

namespace skseg {
namespace fs = std::filesystem;
namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool dirs) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (dirs ? it->is_directory() : (it->is_regular_file() && it->path().extension() == ".png")) {
      out.push_back(it->path());
    }
  }
  if (ec) fail(ErrorCode::kIo, dir.string() + ": cannot read directory: " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::string patient_of(const fs::path& dir) {
  std::string name = fs::absolute(dir).lexically_normal().filename().string();
  if (name.empty()) name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  return name.empty() ? "series" : name;
}

BinaryMask load_prediction(const fs::path& path, double threshold) {
  const GrayImage img = load_image(path);
  std::vector<std::uint8_t> bits(img.size());
  const auto px = img.data();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = px[i] / 255.0 > threshold ? 1 : 0;
  return BinaryMask(img.width(), img.height(), std::move(bits));
}

}  // namespace

EvaluateResult evaluate_dirs(const fs::path& pred, const fs::path& target, const fs::path& out,
                             const EvaluateOptions& opts) {
  std::error_code ec;
  if (!fs::is_directory(target, ec)) fail(ErrorCode::kIo, target.string() + ": not a readable directory");
  if (!fs::is_directory(pred, ec)) fail(ErrorCode::kIo, pred.string() + ": not a readable directory");
  if (opts.target_scale < 1) fail(ErrorCode::kInvalidArgument, "evaluate: target scale must be >= 1");

  std::vector<std::pair<std::string, fs::path>> groups;
  if (!sorted_entries(target, false).empty()) {
    groups.emplace_back(patient_of(target), target);
  } else {
    for (const auto& d : sorted_entries(target, true)) groups.emplace_back(d.filename().string(), d);
  }

  EvaluateResult result;
  std::vector<PatientRow> rows;
  for (const auto& [patient, tdir] : groups) {
    const bool flat = tdir == target;
    std::string report = report_csv_header();
    for (const auto& tfile : sorted_entries(tdir, false)) {
      const std::string id = tfile.stem().string();
      ++result.slices;
      try {
        const fs::path base = flat ? pred : pred / patient;
        fs::path pfile = base / (id + ".png");
        if (!fs::exists(pfile, ec)) pfile = base / id / (opts.pred_name + ".png");
        if (!fs::exists(pfile, ec)) {
          fail(ErrorCode::kIo, "prediction not found for slice '" + id + "' under " + base.string());
        }
        const BinaryMask p = load_prediction(pfile, opts.pred_threshold);
        const BinaryMask t = replicate_upscale(load_mask(tfile), opts.target_scale);
        SimilarityReport r = evaluate_masks(p, t, opts.ssim_mode, opts.c1, opts.c2);
        report += report_csv_row(id, r);
        result.records.push_back({patient, id, r});
      } catch (const std::exception& e) {
        result.errors.push_back(patient + "/" + id + ": " + e.what());
      }
    }
    const fs::path pdir = out / patient;
    fs::create_directories(pdir, ec);
    if (ec) fail(ErrorCode::kIo, pdir.string() + ": cannot create directory: " + ec.message());
    write_text_file(pdir / "report.csv", report);
  }
  if (!result.records.empty()) {
    write_text_file(out / "per_patient.csv", per_patient_csv(per_patient_table(result.records, opts.conv)));
  }
  return result;
}

std::vector<SliceRecord> load_reports(const fs::path& source) {
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) {
    return parse_report_csv(read_text_file(source), patient_of(source.parent_path().empty() ? fs::path(".") : source.parent_path()));
  }
  if (!fs::is_directory(source, ec)) fail(ErrorCode::kIo, source.string() + ": file not found");
  std::vector<SliceRecord> out;
  if (fs::exists(source / "report.csv", ec)) {
    out = parse_report_csv(read_text_file(source / "report.csv"), patient_of(source));
  }
  for (const auto& d : sorted_entries(source, true)) {
    if (!fs::exists(d / "report.csv", ec)) continue;
    auto recs = parse_report_csv(read_text_file(d / "report.csv"), d.filename().string());
    out.insert(out.end(), recs.begin(), recs.end());
  }
  if (out.empty()) fail(ErrorCode::kIo, source.string() + ": no report.csv found");
  return out;
}

std::vector<MethodSummary> compare_reports(const fs::path& a, const std::string& name_a,
                                           const fs::path& b, const std::string& name_b,
                                           const fs::path& out, StdConvention conv,
                                           Index boxplot_index) {
  if (name_a.empty() || name_b.empty() || name_a == name_b ||
      name_a.find(',') != std::string::npos || name_b.find(',') != std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "compare: method names must be distinct, non-empty, without commas");
  }
  const auto ra = load_reports(a);
  const auto rb = load_reports(b);
  auto summaries = compare_methods(name_a, ra, name_b, rb, conv);

  std::vector<BoxplotEntry> entries;
  for (const auto* set : {&ra, &rb}) {
    const std::string& method = set == &ra ? name_a : name_b;
    for (const auto& r : *set) {
      const double v = index_value(r.report, boxplot_index);
      if (std::isnan(v)) continue;
      BoxplotEntry e;
      e.group = r.patient;
      e.method = method;
      e.slice = r.slice;
      e.value = v;
      entries.push_back(e);
    }
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorCode::kIo, out.string() + ": cannot create directory: " + ec.message());
  write_text_file(out / "comparison.csv", comparison_csv(summaries));
  write_text_file(out / "boxplot.csv", boxplot_csv(boxplot_entries(std::move(entries))));
  return summaries;
}

}  // namespace skseg
