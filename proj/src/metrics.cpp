#include "skseg/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "skseg/error.hpp"

namespace skseg {
namespace {

double ssim_from_moments(double mx, double my, double vx, double vy, double cxy, double c1,
                         double c2) {
  return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

bool Indices::bpn_defined() const { return !std::isnan(bpn); }

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& target) {
  require_same_shape(pred, target, "confusion");
  ConfusionCounts c;
  const auto p = pred.bits(), t = target.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && t[i]) ++c.tp;
    else if (p[i]) ++c.fp;
    else if (t[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Indices similarity(const ConfusionCounts& c) {
  Indices r;
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double uni = tp + fp + fn;
  if (uni == 0.0) {
    r.dci = r.ti = 1.0;
    r.em = 0.0;
    r.both_empty = true;
  } else {
    r.dci = 2 * tp / ((tp + fp) + (tp + fn));
    r.ti = tp / uni;
    r.em = (fp + fn) / uni;
  }
  r.bpn = c.tp == 0 ? std::numeric_limits<double>::quiet_NaN() : (fp - fn) / tp;
  return r;
}

const char* ssim_mode_name(SsimMode m) noexcept {
  return m == SsimMode::kGlobal ? "global" : "windowed";
}

SsimMode parse_ssim_mode(const std::string& name) {
  if (name == "global") return SsimMode::kGlobal;
  if (name == "windowed") return SsimMode::kWindowed;
  fail(ErrorCode::kConfig, "unknown ssim mode '" + name + "' (expected global or windowed)");
}

double ssim(const GrayImage& x, const GrayImage& y, double c1, double c2) {
  require_same_shape(x, y, "ssim");
  const auto a = x.data(), b = y.data();
  const double n = static_cast<double>(a.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mx += a[i];
    my += b[i];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dx = a[i] - mx, dy = b[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cxy += dx * dy;
  }
  return ssim_from_moments(mx, my, vx / n, vy / n, cxy / n, c1, c2);
}

double ssim_windowed(const GrayImage& x, const GrayImage& y, int window, double c1, double c2) {
  require_same_shape(x, y, "ssim_windowed");
  if (window < 1) fail(ErrorCode::kInvalidArgument, "ssim_windowed: window must be >= 1");
  const int W = x.width(), H = x.height();
  if (window > W || window > H) return ssim(x, y, c1, c2);
  const double n = static_cast<double>(window) * window;
  double total = 0.0;
  std::size_t count = 0;
  for (int y0 = 0; y0 + window <= H; ++y0) {
    for (int x0 = 0; x0 + window <= W; ++x0) {
      double mx = 0.0, my = 0.0;
      for (int j = y0; j < y0 + window; ++j) {
        for (int i = x0; i < x0 + window; ++i) {
          mx += x.at(i, j);
          my += y.at(i, j);
        }
      }
      mx /= n;
      my /= n;
      double vx = 0.0, vy = 0.0, cxy = 0.0;
      for (int j = y0; j < y0 + window; ++j) {
        for (int i = x0; i < x0 + window; ++i) {
          const double dx = x.at(i, j) - mx, dy = y.at(i, j) - my;
          vx += dx * dx;
          vy += dy * dy;
          cxy += dx * dy;
        }
      }
      total += ssim_from_moments(mx, my, vx / n, vy / n, cxy / n, c1, c2);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double loss_ssim(const GrayImage& y, const GrayImage& y_pred) { return 1.0 - ssim(y, y_pred); }

GrayImage mask_image(const BinaryMask& mask) {
  std::vector<double> v(mask.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? 255.0 : 0.0;
  return GrayImage(mask.width(), mask.height(), std::move(v));
}

SimilarityReport evaluate_masks(const BinaryMask& pred, const BinaryMask& target, SsimMode mode,
                                double c1, double c2) {
  SimilarityReport r;
  r.counts = confusion(pred, target);
  r.indices = similarity(r.counts);
  const GrayImage a = mask_image(pred), b = mask_image(target);
  r.ssim = mode == SsimMode::kGlobal ? ssim(a, b, c1, c2) : ssim_windowed(a, b, 7, c1, c2);
  return r;
}

}  // namespace skseg
