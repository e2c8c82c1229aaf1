#include "skseg/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "skseg/error.hpp"

namespace skseg {
namespace {

std::size_t idx(int x, int y, int width) {
  return static_cast<std::size_t>(y) * width + x;
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Mirror index without edge repetition: ... c b | a b c d | c b ...
int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Summed-area table of an edge-replicated copy padded by `pad` on each side.
struct BoxSums {
  int pad, pw, ph;
  std::vector<double> s;  // (pw + 1) x (ph + 1)

  BoxSums(std::span<const double> v, int width, int height, int pad_)
      : pad(pad_), pw(width + 2 * pad_), ph(height + 2 * pad_),
        s(static_cast<std::size_t>(pw + 1) * (ph + 1), 0.0) {
    for (int y = 0; y < ph; ++y) {
      const int sy = clampi(y - pad, 0, height - 1);
      double run = 0.0;
      for (int x = 0; x < pw; ++x) {
        const int sx = clampi(x - pad, 0, width - 1);
        run += v[idx(sx, sy, width)];
        s[idx(x + 1, y + 1, pw + 1)] = s[idx(x + 1, y, pw + 1)] + run;
      }
    }
  }

  // Sum over the window of half-width `pad` centred on image pixel (x, y).
  double window(int x, int y) const {
    const int x0 = x, y0 = y, x1 = x + 2 * pad + 1, y1 = y + 2 * pad + 1;
    return s[idx(x1, y1, pw + 1)] - s[idx(x0, y1, pw + 1)] - s[idx(x1, y0, pw + 1)] +
           s[idx(x0, y0, pw + 1)];
  }
};

GrayImage haar_residual(const GrayImage& img, int levels) {
  const int W = img.width(), H = img.height();
  const int block = 1 << levels;
  const int bw = (W + block - 1) / block, bh = (H + block - 1) / block;
  const double inv = 1.0 / (static_cast<double>(block) * block);
  std::vector<double> out(img.size());
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      double s = 0.0;
      for (int y = by * block; y < (by + 1) * block; ++y) {
        const int sy = std::min(y, H - 1);
        for (int x = bx * block; x < (bx + 1) * block; ++x) s += img.at(std::min(x, W - 1), sy);
      }
      const double m = s * inv;
      for (int y = by * block; y < std::min((by + 1) * block, H); ++y) {
        for (int x = bx * block; x < std::min((bx + 1) * block, W); ++x) out[idx(x, y, W)] = m;
      }
    }
  }
  return GrayImage(W, H, std::move(out));
}

GrayImage atrous_residual(const GrayImage& img, int levels) {
  static constexpr std::array<double, 5> h = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int W = img.width(), H = img.height();
  std::vector<double> c(img.data().begin(), img.data().end());
  std::vector<double> t(c.size());
  for (int j = 0; j < levels; ++j) {
    const int hole = 1 << j;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        double s = 0.0;
        for (int m = 0; m < 5; ++m) s += h[m] * c[idx(mirror(x + hole * (m - 2), W), y, W)];
        t[idx(x, y, W)] = s;
      }
    }
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        double s = 0.0;
        for (int m = 0; m < 5; ++m) s += h[m] * t[idx(x, mirror(y + hole * (m - 2), H), W)];
        c[idx(x, y, W)] = s;
      }
    }
  }
  return GrayImage(W, H, std::move(c));
}

}  // namespace

BinaryMask ellipse_mask(int width, int height, const Ellipse& e) {
  if (!(e.a >= 0.0) || !(e.b >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "ellipse_mask: semi-axes must be >= 0");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
  if (e.a == 0.0 || e.b == 0.0) {
    // Pixel x covers (x, x + 1].
    const double px = std::ceil(e.cx) - 1.0, py = std::ceil(e.cy) - 1.0;
    if (px >= 0 && py >= 0 && px < width && py < height) {
      bits[idx(static_cast<int>(px), static_cast<int>(py), width)] = 1;
    }
    return BinaryMask(width, height, std::move(bits));
  }
  const double cs = std::cos(e.angle), sn = std::sin(e.angle);
  const double a2 = e.a * e.a, b2 = e.b * e.b;
  for (int q = 0; q < height; ++q) {
    for (int p = 0; p < width; ++p) {
      const double dx = p + 0.5 - e.cx, dy = q + 0.5 - e.cy;
      const double u = dx * cs + dy * sn;
      const double v = -dx * sn + dy * cs;
      bits[idx(p, q, width)] = u * u * b2 + v * v * a2 <= a2 * b2 ? 1 : 0;
    }
  }
  return BinaryMask(width, height, std::move(bits));
}

GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask) {
  require_same_shape(img, mask, "apply_mask");
  std::vector<double> out(img.data().begin(), img.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) out[i] = 0.0;
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

const char* basis_name(WaveletBasis b) noexcept {
  return b == WaveletBasis::kHaar ? "haar" : "atrous";
}

WaveletBasis parse_basis(const std::string& name) {
  if (name == "haar") return WaveletBasis::kHaar;
  if (name == "atrous") return WaveletBasis::kAtrous;
  fail(ErrorCode::kConfig, "unknown wavelet basis '" + name + "' (expected haar or atrous)");
}

GrayImage wavelet_residual(const GrayImage& img, int levels, WaveletBasis basis) {
  if (levels < 1) fail(ErrorCode::kInvalidArgument, "wavelet_residual: levels must be >= 1");
  if (levels > 30 || (1LL << levels) > std::max(img.width(), img.height())) {
    fail(ErrorCode::kInvalidArgument,
         "wavelet_residual: " + std::to_string(levels) + " levels too large for a " +
             std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }
  return basis == WaveletBasis::kHaar ? haar_residual(img, levels) : atrous_residual(img, levels);
}

GrayImage subtract_plaques(const GrayImage& img, const BinaryMask& plaques) {
  require_same_shape(img, plaques, "subtract_plaques");
  std::vector<double> out(img.data().begin(), img.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (plaques[i]) out[i] = 0.0;
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage normalize_minmax(const GrayImage& img) {
  const double lo = img.min(), hi = img.max();
  if (hi == lo) return GrayImage(img.width(), img.height(), 0.0);
  std::vector<double> out(img.size());
  const auto px = img.data();
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp((px[i] - lo) * scale, 0.0, 255.0);
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage equalize(const GrayImage& img) {
  const auto px = img.data();
  std::vector<std::uint8_t> level(px.size());
  std::array<std::size_t, 256> hist{};
  for (std::size_t i = 0; i < px.size(); ++i) {
    level[i] = quantize(px[i]);
    ++hist[level[i]];
  }
  std::array<std::size_t, 256> cdf{};
  std::size_t run = 0, cmin = 0;
  for (int v = 0; v < 256; ++v) {
    run += hist[v];
    cdf[v] = run;
    if (cmin == 0 && hist[v] > 0) cmin = run;
  }
  const std::size_t n = px.size();
  std::vector<double> out(n, 255.0);
  if (n != cmin) {
    const double denom = static_cast<double>(n - cmin);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = std::floor(static_cast<double>(cdf[level[i]] - cmin) / denom * 255.0 + 0.5);
    }
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

BinaryMask adaptive_threshold(const GrayImage& img, int window, double offset,
                              const std::optional<BinaryMask>& support) {
  if (window < 3 || window % 2 == 0) {
    fail(ErrorCode::kInvalidArgument,
         "adaptive_threshold: window must be odd and >= 3, got " + std::to_string(window));
  }
  if (support) require_same_shape(img, *support, "adaptive_threshold");
  const int W = img.width(), H = img.height();
  const int pad = window / 2;
  const auto px = img.data();
  std::vector<std::uint8_t> bits(px.size(), 0);

  if (!support) {
    const BoxSums sums(px, W, H, pad);
    const double area = static_cast<double>(window) * window;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        bits[idx(x, y, W)] = px[idx(x, y, W)] > sums.window(x, y) / area + offset ? 1 : 0;
      }
    }
    return BinaryMask(W, H, std::move(bits));
  }

  std::vector<double> inside(px.size()), weighted(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    inside[i] = (*support)[i] ? 1.0 : 0.0;
    weighted[i] = inside[i] * px[i];
  }
  const BoxSums num(weighted, W, H, pad);
  const BoxSums den(inside, W, H, pad);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::size_t i = idx(x, y, W);
      if (!(*support)[i]) continue;
      const double count = den.window(x, y);
      if (count <= 0.0) continue;
      bits[i] = px[i] > num.window(x, y) / count + offset ? 1 : 0;
    }
  }
  return BinaryMask(W, H, std::move(bits));
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidArgument, "dilate: radius must be >= 0");
  if (radius == 0) return mask;
  const int W = mask.width(), H = mask.height();
  std::vector<std::uint8_t> rows(mask.size(), 0), out(mask.size(), 0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!mask.at(x, y)) continue;
      for (int d = std::max(0, x - radius); d <= std::min(W - 1, x + radius); ++d) rows[idx(d, y, W)] = 1;
    }
  }
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!rows[idx(x, y, W)]) continue;
      for (int d = std::max(0, y - radius); d <= std::min(H - 1, y + radius); ++d) out[idx(x, d, W)] = 1;
    }
  }
  return BinaryMask(W, H, std::move(out));
}

BinaryMask plaque_mask(const GrayImage& basal_sk, const BinaryMask& vessel, double threshold,
                       int grow) {
  require_same_shape(basal_sk, vessel, "plaque_mask");
  const auto px = basal_sk.data();
  std::vector<std::uint8_t> bits(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) bits[i] = px[i] > threshold && vessel[i] ? 1 : 0;
  return dilate(BinaryMask(basal_sk.width(), basal_sk.height(), std::move(bits)), grow);
}

BinaryMask binarize(const GrayImage& img, double eta, bool strict) {
  const auto px = img.data();
  std::vector<std::uint8_t> bits(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) bits[i] = (strict ? px[i] > eta : px[i] >= eta) ? 1 : 0;
  return BinaryMask(img.width(), img.height(), std::move(bits));
}

RgbImage colored_map(const BinaryMask& pred, const BinaryMask& target) {
  require_same_shape(pred, target, "colored_map");
  std::vector<std::uint8_t> rgb(3 * pred.size(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::uint8_t* px = rgb.data() + 3 * i;
    if (pred[i] && target[i]) {
      px[1] = 255;
    } else if (pred[i]) {
      px[0] = 255;
    } else if (target[i]) {
      px[0] = px[1] = px[2] = 255;
    }
  }
  return RgbImage(pred.width(), pred.height(), std::move(rgb));
}

GrayImage superpose(const BinaryMask& binary, const GrayImage& background) {
  require_same_shape(binary, background, "superpose");
  std::vector<double> out(background.data().begin(), background.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (binary[i]) out[i] = 255.0;
  }
  return GrayImage(background.width(), background.height(), std::move(out));
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "mask_and");
  std::vector<std::uint8_t> bits(a.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a[i] && b[i];
  return BinaryMask(a.width(), a.height(), std::move(bits));
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "mask_and_not");
  std::vector<std::uint8_t> bits(a.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a[i] && !b[i];
  return BinaryMask(a.width(), a.height(), std::move(bits));
}

BinaryMask replicate_upscale(const BinaryMask& mask, int scale) {
  if (scale < 1) fail(ErrorCode::kInvalidArgument, "replicate_upscale: scale must be >= 1");
  const int P = mask.width() * scale, Q = mask.height() * scale;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(P) * Q);
  for (int q = 0; q < Q; ++q) {
    for (int p = 0; p < P; ++p) bits[idx(p, q, P)] = mask.at(p / scale, q / scale);
  }
  return BinaryMask(P, Q, std::move(bits));
}

}  // namespace skseg
