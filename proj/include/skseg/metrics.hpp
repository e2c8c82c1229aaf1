#pragma once

#include <cstdint>
#include <string>

#include "skseg/model.hpp"

namespace skseg {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool operator==(const ConfusionCounts&) const = default;
};

struct Indices {
  double dci = 0.0, ti = 0.0, em = 0.0;
  double bpn = 0.0;          // NaN when tp = 0
  bool both_empty = false;   // tp + fp + fn = 0; dci = ti = 1, em = 0 by convention
  bool bpn_defined() const;
};

struct SimilarityReport {
  ConfusionCounts counts;
  Indices indices;
  double ssim = 0.0;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& target);
Indices similarity(const ConfusionCounts& counts);

// (0.01 * 255)^2 and (0.03 * 255)^2, written out so they match the decimal
// configuration defaults bit for bit.
inline constexpr double kSsimC1 = 6.5025;
inline constexpr double kSsimC2 = 58.5225;

enum class SsimMode { kGlobal, kWindowed };
const char* ssim_mode_name(SsimMode m) noexcept;
SsimMode parse_ssim_mode(const std::string& name);

// Whole-image statistics with divisor N.
double ssim(const GrayImage& x, const GrayImage& y, double c1 = kSsimC1, double c2 = kSsimC2);
// Mean of the global formula over every window x window patch (valid positions).
double ssim_windowed(const GrayImage& x, const GrayImage& y, int window = 7, double c1 = kSsimC1,
                     double c2 = kSsimC2);
double loss_ssim(const GrayImage& y, const GrayImage& y_pred);

// Mask as a 0/255 image, the form used for SSIM between binary results.
GrayImage mask_image(const BinaryMask& mask);

SimilarityReport evaluate_masks(const BinaryMask& pred, const BinaryMask& target,
                                SsimMode mode = SsimMode::kGlobal, double c1 = kSsimC1,
                                double c2 = kSsimC2);

}  // namespace skseg
