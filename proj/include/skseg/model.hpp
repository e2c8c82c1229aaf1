#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace skseg {

// Real-valued grayscale raster, row-major, canonical range [0, 255].
// Pixel (x, y) covers the unit square (x, x + 1] x (y, y + 1] of the plane.
class GrayImage {
 public:
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const double> data() const noexcept { return data_; }

  double min() const noexcept;
  double max() const noexcept;
  double mean() const noexcept;

  bool operator==(const GrayImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

// Boolean raster; true is white/foreground.
class BinaryMask {
 public:
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;  // 0 or 1
};

class RgbImage {
 public:
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  struct Pixel {
    std::uint8_t r, g, b;
    bool operator==(const Pixel&) const = default;
  };
  Pixel at(int x, int y) const noexcept {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  bool operator==(const RgbImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

template <typename A, typename B>
bool same_shape(const A& a, const B& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

// Throws kDimensionMismatch naming `what` when the rasters differ in shape.
template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what);

// Rounds half-up and clamps to [0, 255]; the only quantization rule used at
// file boundaries.
std::uint8_t quantize(double v) noexcept;

}  // namespace skseg

#include "skseg/error.hpp"

#include <string>

namespace skseg {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (!same_shape(a, b)) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
             std::to_string(b.height()) + ")");
  }
}

}  // namespace skseg
