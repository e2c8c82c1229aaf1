#include "skseg/sk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "skseg/error.hpp"

namespace skseg {
namespace {

struct Overlap {
  int pixel;
  double length;
};

// Pieces of the cell [k/w, (k+1)/w] falling on pixels (i, i+1] of an axis of
// length n. Under kReplicate the parts outside (0, n] go to the edge pixels.
std::vector<Overlap> cell_overlaps(long long k, double w, int n, Border border) {
  std::vector<Overlap> out;
  const double a = static_cast<double>(k) / w;
  const double b = static_cast<double>(k + 1) / w;
  if (border == Border::kReplicate) {
    if (a < 0.0) out.push_back({0, std::min(b, 0.0) - a});
    if (b > n) out.push_back({n - 1, b - std::max(a, static_cast<double>(n))});
  }
  const double lo = std::max(a, 0.0);
  const double hi = std::min(b, static_cast<double>(n));
  if (hi > lo) {
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(n - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = first; i <= last; ++i) {
      const double len = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (len > 0.0) out.push_back({i, len});
    }
  }
  return out;
}

// Range of lattice indices whose window may contribute at coordinate x.
std::pair<long long, long long> window(double wx, int T) {
  const auto centre = static_cast<long long>(std::floor(wx));
  return {centre - T, centre + T};
}

// Cells that can carry non-zero mass: all under kReplicate, the footprint under kZero.
std::pair<long long, long long> support(double w, int n, Border border) {
  if (border == Border::kReplicate) {
    return {std::numeric_limits<long long>::min() / 4, std::numeric_limits<long long>::max() / 4};
  }
  return {0, static_cast<long long>(std::ceil(w * n)) - 1};
}

// G(p, i) = sum_k chi_1(w x_p - k) * w * |cell_k  intersect  pixel_i|.
std::vector<double> axis_matrix(int n, const SkParams& params) {
  const int R = params.scale;
  const int out_n = n * R;
  const int T = params.effective_truncation();
  const auto [s_lo, s_hi] = support(params.w, n, params.border);
  std::vector<double> g(static_cast<std::size_t>(out_n) * n, 0.0);
  for (int p = 0; p < out_n; ++p) {
    const double x = (p + 0.5) / R;
    const double wx = params.w * x;
    auto [lo, hi] = window(wx, T);
    lo = std::max(lo, s_lo);
    hi = std::min(hi, s_hi);
    double* row = g.data() + static_cast<std::size_t>(p) * n;
    for (long long k = lo; k <= hi; ++k) {
      const double kv = kernel_1d(wx - static_cast<double>(k), params.kernel);
      if (kv == 0.0) continue;
      for (const Overlap& o : cell_overlaps(k, params.w, n, params.border)) {
        row[o.pixel] += kv * params.w * o.length;
      }
    }
  }
  return g;
}

[[noreturn]] void non_finite(int p, int q) {
  fail(ErrorCode::kNumeric, "sk_reconstruct: non-finite value at output pixel (" +
                                std::to_string(p) + ", " + std::to_string(q) + ")");
}

GrayImage finish(int width, int height, std::vector<double> out, bool clamp) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      non_finite(static_cast<int>(i % width), static_cast<int>(i / width));
    }
    if (clamp) out[i] = std::clamp(out[i], 0.0, 255.0);
  }
  return GrayImage(width, height, std::move(out));
}

GrayImage separable(const GrayImage& img, const SkParams& params) {
  const int W = img.width(), H = img.height();
  const int P = W * params.scale, Q = H * params.scale;
  const std::vector<double> gx = axis_matrix(W, params);
  const std::vector<double> gy = W == H ? gx : axis_matrix(H, params);
  const auto a = img.data();

  // tmp = A * Gx^T  (H x P)
  std::vector<double> tmp(static_cast<std::size_t>(H) * P, 0.0);
  for (int j = 0; j < H; ++j) {
    for (int p = 0; p < P; ++p) {
      const double* grow = gx.data() + static_cast<std::size_t>(p) * W;
      const double* arow = a.data() + static_cast<std::size_t>(j) * W;
      double s = 0.0;
      for (int i = 0; i < W; ++i) s += arow[i] * grow[i];
      tmp[static_cast<std::size_t>(j) * P + p] = s;
    }
  }
  // out = Gy * tmp  (Q x P)
  std::vector<double> out(static_cast<std::size_t>(Q) * P, 0.0);
  for (int q = 0; q < Q; ++q) {
    const double* grow = gy.data() + static_cast<std::size_t>(q) * H;
    double* orow = out.data() + static_cast<std::size_t>(q) * P;
    for (int j = 0; j < H; ++j) {
      const double gv = grow[j];
      if (gv == 0.0) continue;
      const double* trow = tmp.data() + static_cast<std::size_t>(j) * P;
      for (int p = 0; p < P; ++p) orow[p] += gv * trow[p];
    }
  }
  return finish(P, Q, std::move(out), params.clamp);
}

GrayImage direct(const GrayImage& img, const SkParams& params) {
  const int W = img.width(), H = img.height();
  const int R = params.scale;
  const int P = W * R, Q = H * R;
  const int T = params.effective_truncation();
  const double w = params.w;

  // Integral means over every cell any output pixel can reach.
  const long long x0 = window(w * (0.5 / R), T).first;
  const long long x1 = window(w * ((P - 0.5) / R), T).second;
  const long long y0 = window(w * (0.5 / R), T).first;
  const long long y1 = window(w * ((Q - 0.5) / R), T).second;
  const auto [sx_lo, sx_hi] = support(w, W, params.border);
  const auto [sy_lo, sy_hi] = support(w, H, params.border);
  const long long kx_lo = std::max(x0, sx_lo), kx_hi = std::min(x1, sx_hi);
  const long long ky_lo = std::max(y0, sy_lo), ky_hi = std::min(y1, sy_hi);
  const long long nx = std::max(0LL, kx_hi - kx_lo + 1);
  const long long ny = std::max(0LL, ky_hi - ky_lo + 1);
  if (nx * ny > 200'000'000LL) {
    fail(ErrorCode::kInvalidArgument, "sk_reconstruct: direct summation window too large");
  }
  std::vector<double> means(static_cast<std::size_t>(nx * ny), 0.0);
  for (long long b = 0; b < ny; ++b) {
    for (long long a = 0; a < nx; ++a) {
      means[static_cast<std::size_t>(b * nx + a)] =
          integral_mean(img, kx_lo + a, ky_lo + b, w, params.border);
    }
  }

  // Tensor-product kernels: tabulate chi(w x - k1) per output column so the
  // double sum below does not re-evaluate the 1-D factor for every cell.
  const bool tensor = params.kernel.separable();
  std::vector<double> kx;
  if (tensor) {
    kx.assign(static_cast<std::size_t>(P * nx), 0.0);
    for (int p = 0; p < P; ++p) {
      const double wx = w * ((p + 0.5) / R);
      auto [xlo, xhi] = window(wx, T);
      for (long long k1 = std::max(xlo, kx_lo); k1 <= std::min(xhi, kx_hi); ++k1) {
        kx[static_cast<std::size_t>(p * nx + (k1 - kx_lo))] = kernel_1d(wx - static_cast<double>(k1), params.kernel);
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(P) * Q, 0.0);
  for (int q = 0; q < Q; ++q) {
    const double wy = w * ((q + 0.5) / R);
    auto [ylo, yhi] = window(wy, T);
    ylo = std::max(ylo, ky_lo);
    yhi = std::min(yhi, ky_hi);
    for (int p = 0; p < P; ++p) {
      const double wx = w * ((p + 0.5) / R);
      auto [xlo, xhi] = window(wx, T);
      xlo = std::max(xlo, kx_lo);
      xhi = std::min(xhi, kx_hi);
      double s = 0.0;
      if (tensor) {
        const double* krow = kx.data() + static_cast<std::size_t>(p * nx);
        for (long long k2 = ylo; k2 <= yhi; ++k2) {
          const double ky = kernel_1d(wy - static_cast<double>(k2), params.kernel);
          const double* mrow = means.data() + static_cast<std::size_t>((k2 - ky_lo) * nx);
          for (long long k1 = xlo; k1 <= xhi; ++k1) s += krow[k1 - kx_lo] * ky * mrow[k1 - kx_lo];
        }
        out[static_cast<std::size_t>(q) * P + p] = s;
        continue;
      }
      for (long long k2 = ylo; k2 <= yhi; ++k2) {
        const double* mrow = means.data() + static_cast<std::size_t>((k2 - ky_lo) * nx);
        for (long long k1 = xlo; k1 <= xhi; ++k1) {
          const double m = mrow[k1 - kx_lo];
          if (m == 0.0) continue;
          s += kernel_2d(wx - static_cast<double>(k1), wy - static_cast<double>(k2), params.kernel) * m;
        }
      }
      out[static_cast<std::size_t>(q) * P + p] = s;
    }
  }
  return finish(P, Q, std::move(out), params.clamp);
}

}  // namespace

const char* border_name(Border b) noexcept {
  return b == Border::kZero ? "zero" : "replicate";
}

Border parse_border(const std::string& name) {
  if (name == "zero") return Border::kZero;
  if (name == "replicate") return Border::kReplicate;
  fail(ErrorCode::kConfig, "unknown border policy '" + name + "' (expected zero or replicate)");
}

int SkParams::effective_truncation() const {
  return truncation > 0 ? truncation : default_truncation(kernel);
}

void SkParams::validate() const {
  if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "sk: w must be positive");
  if (scale < 1) fail(ErrorCode::kInvalidArgument, "sk: scale must be >= 1");
  if (truncation < 0) fail(ErrorCode::kInvalidArgument, "sk: truncation must be >= 0 (0 selects the default)");
  if (kernel.family == KernelFamily::kJackson && !(kernel.c > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "sk: Jackson spec has no normalization constant");
  }
}

double integral_mean(const GrayImage& img, long long k1, long long k2, double w, Border border) {
  if (!(w > 0.0)) fail(ErrorCode::kInvalidArgument, "integral_mean: w must be positive");
  const auto ox = cell_overlaps(k1, w, img.width(), border);
  if (ox.empty()) return 0.0;
  const auto oy = cell_overlaps(k2, w, img.height(), border);
  double s = 0.0;
  for (const Overlap& b : oy) {
    double row = 0.0;
    for (const Overlap& a : ox) row += img.at(a.pixel, b.pixel) * a.length;
    s += row * b.length;
  }
  return s * w * w;
}

GrayImage sk_reconstruct(const GrayImage& img, const SkParams& params) {
  params.validate();
  if (params.kernel.separable() && !params.force_direct) return separable(img, params);
  return direct(img, params);
}

GrayImage replicate_upscale(const GrayImage& img, int scale) {
  if (scale < 1) fail(ErrorCode::kInvalidArgument, "replicate_upscale: scale must be >= 1");
  const int P = img.width() * scale, Q = img.height() * scale;
  std::vector<double> out(static_cast<std::size_t>(P) * Q);
  for (int q = 0; q < Q; ++q) {
    for (int p = 0; p < P; ++p) out[static_cast<std::size_t>(q) * P + p] = img.at(p / scale, q / scale);
  }
  return GrayImage(P, Q, std::move(out));
}

}  // namespace skseg
