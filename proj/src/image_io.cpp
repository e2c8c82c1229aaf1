#include "skseg/image_io.hpp"

#include <png.h>

#include <array>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "skseg/error.hpp"

namespace skseg {
namespace {

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& cause) {
  fail(ErrorCode::kIo, path.string() + ": " + cause);
}

struct Header {
  int bit_depth;
  int color_type;
};

// The simplified libpng API silently widens 1/2/4-bit data, so the IHDR
// fields are read directly to reject anything that is not 8 bits deep.
Header read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    io_error(path, std::filesystem::exists(path) ? "cannot open for reading" : "file not found");
  }
  std::array<unsigned char, 29> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (in.gcount() != static_cast<std::streamsize>(head.size()) ||
      png_sig_cmp(head.data(), 0, 8) != 0) {
    io_error(path, "decode failure: not a PNG file");
  }
  if (std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
    io_error(path, "decode failure: missing IHDR chunk");
  }
  return {head[24], head[25]};
}

void write_png(const std::filesystem::path& path, int width, int height, png_uint_32 format,
               const std::uint8_t* pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels, 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_error(path, "write failure: " + msg);
  }
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  const Header header = read_header(path);
  if (header.color_type != PNG_COLOR_TYPE_PALETTE && header.bit_depth != 8) {
    io_error(path, "unsupported bit depth " + std::to_string(header.bit_depth) + " (expected 8)");
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_error(path, "decode failure: " + msg);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);

  std::vector<png_byte> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_error(path, "decode failure: " + msg);
  }

  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const png_byte* px = raw.data() + i * channels;
    data[i] = color ? (static_cast<double>(px[0]) + px[1] + px[2]) / 3.0
                    : static_cast<double>(px[0]);
  }
  return GrayImage(width, height, std::move(data));
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const GrayImage img = load_image(path);
  std::vector<std::uint8_t> bits(img.size());
  const auto px = img.data();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = px[i] > 127.0 ? 1 : 0;
  return BinaryMask(img.width(), img.height(), std::move(bits));
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.size());
  const auto px = img.data();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(px[i]);
  write_png(path, img.width(), img.height(), PNG_FORMAT_GRAY, bytes.data());
}

void save_image(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.size());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = bits[i] ? 255 : 0;
  write_png(path, mask.width(), mask.height(), PNG_FORMAT_GRAY, bytes.data());
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, img.data().data());
}

}  // namespace skseg
