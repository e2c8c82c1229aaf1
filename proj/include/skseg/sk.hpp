#pragma once

#include <vector>

#include "skseg/kernels.hpp"
#include "skseg/model.hpp"

namespace skseg {

// How the step function is extended outside the image footprint (0, W] x (0, H].
enum class Border {
  kZero,       // identically 0 outside, as in the step-function image model
  kReplicate,  // nearest edge pixel
};

const char* border_name(Border b) noexcept;
Border parse_border(const std::string& name);

struct SkParams {
  double w = 20.0;      // sampling rate
  int scale = 2;        // output pixels per input pixel per axis
  int truncation = 0;   // lattice window half-width; 0 selects default_truncation(kernel)
  KernelSpec kernel = KernelSpec::jackson(12, 1.0);
  Border border = Border::kZero;
  bool clamp = true;    // clamp to [0, 255] after summation
  bool force_direct = false;

  int effective_truncation() const;
  void validate() const;
};

// w^2 times the integral of the step function over
// [k1/w, (k1+1)/w] x [k2/w, (k2+1)/w]. k1 runs along x (columns).
double integral_mean(const GrayImage& img, long long k1, long long k2, double w,
                     Border border = Border::kZero);

// S_w f evaluated at output pixel centres ((p + 0.5)/R, (q + 0.5)/R).
// Product kernels use a separable row/column factorization unless
// params.force_direct is set; Wendland always uses the direct double sum.
GrayImage sk_reconstruct(const GrayImage& img, const SkParams& params);

// Integer-factor pixel replication, the neutral upscaler for ablations.
GrayImage replicate_upscale(const GrayImage& img, int scale);

}  // namespace skseg
