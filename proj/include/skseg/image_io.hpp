#pragma once

#include <filesystem>

#include "skseg/model.hpp"

namespace skseg {

// Reads an 8-bit PNG. Grayscale is taken as is; RGB is collapsed by the
// channel mean; alpha is ignored. Other bit depths are rejected.
GrayImage load_image(const std::filesystem::path& path);

// Lossless 8-bit PNG. Gray intensities are quantized with `quantize`;
// masks map true -> 255, false -> 0.
void save_image(const GrayImage& img, const std::filesystem::path& path);
void save_image(const BinaryMask& mask, const std::filesystem::path& path);
void save_image(const RgbImage& img, const std::filesystem::path& path);

// Reads a PNG and thresholds it at 127 (true iff value > 127).
BinaryMask load_mask(const std::filesystem::path& path);

}  // namespace skseg
