#pragma once

#include <optional>
#include <string>

#include "skseg/model.hpp"

namespace skseg {

struct Ellipse {
  double cx = 0.0, cy = 0.0;  // centre in plane coordinates
  double a = 0.0, b = 0.0;    // semi-axes along the rotated x and y directions
  double angle = 0.0;         // radians, counter-clockwise from the x axis

  Ellipse scaled(double s) const { return {cx * s, cy * s, a * s, b * s, angle}; }
};

// True iff the pixel centre (p + 0.5, q + 0.5) lies inside or on the ellipse.
// A zero semi-axis marks only the pixel containing the centre.
BinaryMask ellipse_mask(int width, int height, const Ellipse& e);

GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask);

enum class WaveletBasis {
  kHaar,    // decimated orthonormal Haar; residual = 2^L x 2^L block means
  kAtrous,  // undecimated B3-spline starlet, mirror boundary
};
const char* basis_name(WaveletBasis b) noexcept;
WaveletBasis parse_basis(const std::string& name);

// Level-`levels` approximation with every detail band zeroed, same size as
// the input. Haar pads by edge replication to a multiple of 2^levels and crops.
GrayImage wavelet_residual(const GrayImage& img, int levels,
                           WaveletBasis basis = WaveletBasis::kHaar);

// Flagged pixels set to 0.
GrayImage subtract_plaques(const GrayImage& img, const BinaryMask& plaques);

// Affine map of [min, max] onto [0, 255]; constant images map to 0.
GrayImage normalize_minmax(const GrayImage& img);

// 256-bin histogram equalization of the rounded intensities, normalized by
// the lowest occupied CDF value. A single occupied bin maps to 255.
GrayImage equalize(const GrayImage& img);

// True iff v > local mean + offset over a window x window box with edge
// replication. With `support`, the mean is taken over window cells inside
// the support only, and pixels outside it are false.
BinaryMask adaptive_threshold(const GrayImage& img, int window, double offset,
                              const std::optional<BinaryMask>& support = std::nullopt);

// Minkowski dilation by a (2r+1) x (2r+1) square.
BinaryMask dilate(const BinaryMask& mask, int radius);

BinaryMask plaque_mask(const GrayImage& basal_sk, const BinaryMask& vessel, double threshold,
                       int grow);

BinaryMask binarize(const GrayImage& img, double eta, bool strict = true);

// TP green, FP red, FN white, TN black.
RgbImage colored_map(const BinaryMask& pred, const BinaryMask& target);

// Background with mask pixels forced to 255.
GrayImage superpose(const BinaryMask& binary, const GrayImage& background);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
BinaryMask replicate_upscale(const BinaryMask& mask, int scale);

}  // namespace skseg
