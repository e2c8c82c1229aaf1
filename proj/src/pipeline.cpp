#include "skseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "skseg/error.hpp"
#include "skseg/image_io.hpp"
#include "skseg/stats.hpp"

namespace skseg {
namespace fs = std::filesystem;
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

SliceOutput run_stages(const SliceInput& in, const PipelineConfig& cfg, const SkParams& sk,
                       bool use_sk) {
  cfg.validate();
  if (in.cm) require_same_shape(in.basal, *in.cm, "segment_slice: basal vs cm");
  const int R = sk.scale;

  GrayImage b_sk = stage("sk_reconstruct", [&] {
    return use_sk ? sk_reconstruct(in.basal, sk) : replicate_upscale(in.basal, R);
  });
  const BinaryMask vessel =
      ellipse_mask(b_sk.width(), b_sk.height(), in.vessel_ellipse.scaled(R));
  GrayImage c = apply_mask(b_sk, vessel);
  GrayImage c_r = stage("wavelet_residual",
                        [&] { return wavelet_residual(c, cfg.wavelet_levels, cfg.wavelet_basis); });
  BinaryMask c_p = plaque_mask(b_sk, vessel, cfg.plaque_threshold, cfg.plaque_grow);
  GrayImage removed = subtract_plaques(c_r, c_p);
  GrayImage normalized = normalize_minmax(removed);
  GrayImage equalized = equalize(normalized);
  BinaryMask thresholded = stage("adaptive_threshold", [&] {
    return adaptive_threshold(equalized, cfg.adapt_window, cfg.adapt_offset,
                              cfg.adapt_vessel_support ? std::optional<BinaryMask>(vessel)
                                                       : std::nullopt);
  });
  BinaryMask c_f = mask_and_not(mask_and(dilate(thresholded, cfg.dilation_radius), vessel), c_p);

  GrayImage overlay = superpose(c_f, b_sk);
  SliceOutput out{std::move(b_sk), std::move(c_f), std::move(c_p), std::move(overlay),
                  std::nullopt, std::nullopt, std::nullopt, {}, std::nullopt};
  if (in.cm) {
    out.cm_b = stage("prepare_target", [&] { return prepare_target(*in.cm, out.c_p, cfg, sk, vessel); });
    out.map = colored_map(out.c_f, *out.cm_b);
    out.report = evaluate_masks(out.c_f, *out.cm_b, cfg.ssim_mode, cfg.ssim_c1, cfg.ssim_c2);
  }
  if (cfg.keep_intermediates) {
    out.intermediates.emplace("c", std::move(c));
    out.intermediates.emplace("c_r", std::move(c_r));
    out.intermediates.emplace("normalized", std::move(normalized));
    out.intermediates.emplace("equalized", std::move(equalized));
    out.thresholded = std::move(thresholded);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != ' ' && ch != '\t') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

bool is_patient_dir(const fs::path& p) {
  std::error_code ec;
  return fs::is_directory(p / "basal", ec);
}

std::vector<std::string> png_stems(const fs::path& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->path().extension() == ".png") out.push_back(it->path().stem().string());
  }
  if (ec) fail(ErrorCode::kIo, dir.string() + ": cannot read directory: " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

struct Job {
  std::string patient;
  fs::path dir;
  std::string id;
  std::optional<Ellipse> ellipse;
};

SliceResult run_job(const Job& job, const PipelineConfig& cfg, const SkParams& sk,
                    const SeriesOptions& opts) {
  SliceResult r{job.patient, job.id, std::nullopt, {}};
  try {
    if (!job.ellipse) fail(ErrorCode::kInvalidArgument, "no rois.csv entry for slice '" + job.id + "'");
    SliceInput in{load_image(job.dir / "basal" / (job.id + ".png")), std::nullopt, *job.ellipse};
    const fs::path cm_path = job.dir / "cm" / (job.id + ".png");
    std::error_code ec;
    if (fs::exists(cm_path, ec)) in.cm = load_image(cm_path);
    SliceOutput out = opts.no_sk ? segment_slice_nosk(in, cfg, sk) : segment_slice(in, cfg, sk);
    if (opts.out_dir) {
      const fs::path d = *opts.out_dir / job.patient / job.id;
      fs::create_directories(d, ec);
      if (ec) fail(ErrorCode::kIo, d.string() + ": cannot create directory: " + ec.message());
      write_slice_outputs(d, out);
      // Only what the summary needs is kept once the images are on disk.
      out.intermediates.clear();
      out.thresholded.reset();
    }
    r.output = std::move(out);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

void PipelineConfig::validate() const {
  if (wavelet_levels < 1) fail(ErrorCode::kInvalidArgument, "pipeline: wavelet_levels must be >= 1");
  if (adapt_window < 3 || adapt_window % 2 == 0) {
    fail(ErrorCode::kInvalidArgument, "pipeline: adapt_window must be odd and >= 3");
  }
  if (!(eta >= 0.0 && eta <= 255.0)) fail(ErrorCode::kInvalidArgument, "pipeline: eta must lie in [0, 255]");
  if (dilation_radius < 0 || plaque_grow < 0) {
    fail(ErrorCode::kInvalidArgument, "pipeline: dilation radii must be >= 0");
  }
  if (!std::isfinite(adapt_offset) || !std::isfinite(plaque_threshold)) {
    fail(ErrorCode::kInvalidArgument, "pipeline: thresholds must be finite");
  }
}

SliceOutput segment_slice(const SliceInput& input, const PipelineConfig& cfg, const SkParams& sk) {
  return run_stages(input, cfg, sk, true);
}

SliceOutput segment_slice_nosk(const SliceInput& input, const PipelineConfig& cfg,
                               const SkParams& sk) {
  return run_stages(input, cfg, sk, false);
}

BinaryMask prepare_target(const GrayImage& cm, const BinaryMask& c_p, const PipelineConfig& cfg,
                          const SkParams& sk, const std::optional<BinaryMask>& vessel) {
  if (c_p.width() != cm.width() * sk.scale || c_p.height() != cm.height() * sk.scale) {
    fail(ErrorCode::kDimensionMismatch, "prepare_target: plaque mask must be " +
                                            std::to_string(sk.scale) + "x the CM dimensions");
  }
  GrayImage cm_sk = sk_reconstruct(cm, sk);
  if (vessel) cm_sk = apply_mask(cm_sk, *vessel);
  return binarize(subtract_plaques(cm_sk, c_p), cfg.eta, cfg.binarize_strict);
}

void write_slice_outputs(const fs::path& dir, const SliceOutput& out) {
  save_image(out.b_sk, dir / "b_sk.png");
  for (const auto& [name, img] : out.intermediates) save_image(img, dir / (name + ".png"));
  if (out.thresholded) save_image(*out.thresholded, dir / "thresholded.png");
  save_image(out.c_f, dir / "c_f.png");
  save_image(out.c_p, dir / "c_p.png");
  save_image(out.overlay, dir / "overlay.png");
  if (out.cm_b) save_image(*out.cm_b, dir / "cm_b.png");
  if (out.map) save_image(*out.map, dir / "map.png");
}

std::size_t SeriesResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(slices.begin(), slices.end(), [](const SliceResult& s) { return !s.output; }));
}

std::map<std::string, Ellipse> parse_rois_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, Ellipse> out;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (n == 1) {
      if (f != std::vector<std::string>{"id", "cx", "cy", "a", "b", "angle"}) {
        fail(ErrorCode::kInvalidArgument, "rois.csv: header must be id,cx,cy,a,b,angle");
      }
      continue;
    }
    if (f.size() != 6) {
      fail(ErrorCode::kInvalidArgument, "rois.csv: line " + std::to_string(n) + " has " +
                                            std::to_string(f.size()) + " fields, expected 6");
    }
    double v[5];
    for (int k = 0; k < 5; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(f[k + 1].c_str(), &end);
      if (f[k + 1].empty() || *end != '\0' || !std::isfinite(v[k])) {
        fail(ErrorCode::kInvalidArgument, "rois.csv: line " + std::to_string(n) +
                                              ": malformed number '" + f[k + 1] + "'");
      }
    }
    if (v[2] < 0 || v[3] < 0) {
      fail(ErrorCode::kInvalidArgument, "rois.csv: line " + std::to_string(n) + ": negative semi-axis");
    }
    if (!out.emplace(f[0], Ellipse{v[0], v[1], v[2], v[3], v[4]}).second) {
      fail(ErrorCode::kInvalidArgument, "rois.csv: duplicate id '" + f[0] + "'");
    }
  }
  if (n == 0) fail(ErrorCode::kInvalidArgument, "rois.csv: empty file");
  return out;
}

SeriesResult run_series(const fs::path& root, const PipelineConfig& cfg, const SkParams& sk,
                        const SeriesOptions& opts) {
  cfg.validate();
  sk.validate();
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::kIo, root.string() + ": not a readable directory");

  std::vector<std::pair<std::string, fs::path>> patients;
  if (is_patient_dir(root)) {
    patients.emplace_back(fs::absolute(root).lexically_normal().filename().string(), root);
    if (patients.back().first.empty()) patients.back().first = "series";
  } else {
    for (fs::directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
      if (is_patient_dir(it->path())) patients.emplace_back(it->path().filename().string(), it->path());
    }
    if (ec) fail(ErrorCode::kIo, root.string() + ": cannot read directory: " + ec.message());
    std::sort(patients.begin(), patients.end());
  }

  std::vector<Job> jobs;
  for (const auto& [name, dir] : patients) {
    const auto rois = parse_rois_csv(read_text_file(dir / "rois.csv"));
    for (const auto& id : png_stems(dir / "basal")) {
      const auto it = rois.find(id);
      jobs.push_back({name, dir, id, it == rois.end() ? std::nullopt : std::optional(it->second)});
    }
  }

  SeriesResult result;
  result.slices.resize(jobs.size());
  int workers = opts.parallelism > 0 ? opts.parallelism
                                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      result.slices[i] = run_job(jobs[i], cfg, sk, opts);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (opts.out_dir) {
    std::size_t start = 0;
    while (start < result.slices.size()) {
      std::size_t end = start;
      const std::string& patient = result.slices[start].patient;
      while (end < result.slices.size() && result.slices[end].patient == patient) ++end;
      const fs::path pdir = *opts.out_dir / patient;
      fs::create_directories(pdir, ec);
      if (ec) fail(ErrorCode::kIo, pdir.string() + ": cannot create directory: " + ec.message());
      std::string report = report_csv_header();
      std::string errors;
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = result.slices[i];
        if (s.output && s.output->report) report += report_csv_row(s.id, *s.output->report);
        if (!s.output) {
          std::string msg;
          for (char ch : s.error) {
            if (ch == '"') msg += '"';
            msg += ch == '\n' ? ' ' : ch;
          }
          errors += s.id + ",\"" + msg + "\"\n";
        }
      }
      write_text_file(pdir / "report.csv", report);
      if (!errors.empty()) {
        write_text_file(pdir / "errors.csv", "slice,error\n" + errors);
      } else {
        fs::remove(pdir / "errors.csv", ec);
      }
      start = end;
    }
  }
  return result;
}

}  // namespace skseg
