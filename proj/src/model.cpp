#include "skseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "skseg/error.hpp"

namespace skseg {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "raster dimensions must be positive, got " +
                                          std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t area(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  if (!std::isfinite(fill)) fail(ErrorCode::kNumeric, "GrayImage: non-finite fill value");
  data_.assign(area(width, height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != area(width, height)) {
    fail(ErrorCode::kInvalidArgument, "GrayImage: data length " + std::to_string(data_.size()) +
                                          " does not match " + std::to_string(width) + "x" +
                                          std::to_string(height));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      fail(ErrorCode::kNumeric, "GrayImage: non-finite intensity at pixel (" +
                                    std::to_string(i % width_) + ", " +
                                    std::to_string(i / width_) + ")");
    }
  }
}

double GrayImage::min() const noexcept { return *std::min_element(data_.begin(), data_.end()); }
double GrayImage::max() const noexcept { return *std::max_element(data_.begin(), data_.end()); }
double GrayImage::mean() const noexcept {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(area(width, height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != area(width, height)) {
    fail(ErrorCode::kInvalidArgument, "BinaryMask: bit count does not match dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(3 * area(width, height), 0);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != 3 * area(width, height)) {
    fail(ErrorCode::kInvalidArgument, "RgbImage: data length does not match 3 x width x height");
  }
}

std::uint8_t quantize(double v) noexcept {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace skseg
