#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skseg/imgproc.hpp"
#include "skseg/metrics.hpp"
#include "skseg/sk.hpp"

namespace skseg {

struct PipelineConfig {
  int wavelet_levels = 1;
  WaveletBasis wavelet_basis = WaveletBasis::kAtrous;
  double eta = 127.0;
  double plaque_threshold = 200.0;
  int plaque_grow = 1;
  int adapt_window = 121;
  double adapt_offset = 80.0;
  bool adapt_vessel_support = true;  // local mean over window cells inside the vessel only
  int dilation_radius = 3;
  bool binarize_strict = true;
  bool keep_intermediates = true;
  SsimMode ssim_mode = SsimMode::kGlobal;
  double ssim_c1 = kSsimC1;
  double ssim_c2 = kSsimC2;

  void validate() const;
};

struct SliceInput {
  GrayImage basal;
  std::optional<GrayImage> cm;
  Ellipse vessel_ellipse;  // input-pixel coordinates, shared by basal and CM
};

struct SliceOutput {
  GrayImage b_sk;
  BinaryMask c_f;
  BinaryMask c_p;
  GrayImage overlay;
  std::optional<BinaryMask> cm_b;
  std::optional<RgbImage> map;
  std::optional<SimilarityReport> report;
  std::map<std::string, GrayImage> intermediates;  // c, c_r, normalized, equalized
  std::optional<BinaryMask> thresholded;
};

SliceOutput segment_slice(const SliceInput& input, const PipelineConfig& cfg, const SkParams& sk);
// Same stages with pixel replication in place of the SK reconstruction of the basal image.
SliceOutput segment_slice_nosk(const SliceInput& input, const PipelineConfig& cfg,
                               const SkParams& sk);

// CM_b = binarize(subtract_plaques(mask(sk_reconstruct(cm))), eta). The vessel
// mask, when given, is applied before binarizing.
BinaryMask prepare_target(const GrayImage& cm, const BinaryMask& c_p, const PipelineConfig& cfg,
                          const SkParams& sk, const std::optional<BinaryMask>& vessel = std::nullopt);

// Writes every stage as <dir>/<stage>.png.
void write_slice_outputs(const std::filesystem::path& dir, const SliceOutput& out);

struct SeriesOptions {
  bool no_sk = false;
  int parallelism = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> out_dir;
};

struct SliceResult {
  std::string patient;
  std::string id;
  std::optional<SliceOutput> output;  // empty when the slice failed
  std::string error;
};

struct SeriesResult {
  std::vector<SliceResult> slices;  // sorted by patient, then slice id
  std::size_t failures() const;
};

// Root layout: <root>/<patient>/{basal,cm}/<id>.png plus <root>/<patient>/rois.csv
// with columns id,cx,cy,a,b,angle. A root that itself contains basal/ is a
// single patient. When out_dir is set, writes <out>/<patient>/<id>/<stage>.png
// and <out>/<patient>/report.csv (plus errors.csv when a slice failed).
SeriesResult run_series(const std::filesystem::path& root, const PipelineConfig& cfg,
                        const SkParams& sk, const SeriesOptions& opts = {});

std::map<std::string, Ellipse> parse_rois_csv(const std::string& text);

}  // namespace skseg
