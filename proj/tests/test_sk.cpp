#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "skseg/error.hpp"
#include "skseg/sk.hpp"
#include "test_support.hpp"

using namespace skseg;
using skseg::testing::make_image;
using skseg::testing::random_image;

namespace {

// Value of the step function at plane point (x, y).
double step_value(const GrayImage& img, double x, double y, Border border) {
  long px = static_cast<long>(std::ceil(x)) - 1;
  long py = static_cast<long>(std::ceil(y)) - 1;
  const bool inside = px >= 0 && py >= 0 && px < img.width() && py < img.height();
  if (!inside) {
    if (border == Border::kZero) return 0.0;
    px = std::clamp<long>(px, 0, img.width() - 1);
    py = std::clamp<long>(py, 0, img.height() - 1);
  }
  return img.at(static_cast<int>(px), static_cast<int>(py));
}

// Midpoint oversampling of the cell; exact when the subcell grid refines the
// pixel grid.
double oversampled_mean(const GrayImage& img, long k1, long k2, double w, int n, Border border) {
  const double h = 1.0 / (w * n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sum += step_value(img, k1 / w + (i + 0.5) * h, k2 / w + (j + 0.5) * h, border);
    }
  }
  return sum / (static_cast<double>(n) * n);
}

double l1_distance(const GrayImage& a, const GrayImage& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a.data()[i] - b.data()[i]);
  return s / static_cast<double>(a.size());
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::fabs(a.data()[i] - b.data()[i]));
  return s;
}

}  // namespace

TEST(IntegralMean, MatchesOversampling) {
  std::mt19937_64 gen(11);
  const GrayImage img = random_image(gen, 7, 5);
  for (Border border : {Border::kZero, Border::kReplicate}) {
    for (double w : {0.8, 2.0, 2.5}) {
      for (long k1 = -3; k1 <= 10; ++k1) {
        for (long k2 = -3; k2 <= 8; ++k2) {
          // 1 / (w n) divides 1 for these (w, n) pairs.
          const int n = w == 0.8 ? 400 : 40;
          EXPECT_NEAR(integral_mean(img, k1, k2, w, border), oversampled_mean(img, k1, k2, w, n, border),
                      1e-9)
              << "w=" << w << " k=(" << k1 << "," << k2 << ")";
        }
      }
    }
  }
}

TEST(IntegralMean, SingleCellInsidePixel) {
  const GrayImage img(4, 4, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
  // w = 20: cell k = 25 lies in (1.25, 1.3], pixel 1.
  EXPECT_NEAR(integral_mean(img, 25, 45, 20.0), img.at(1, 2), 1e-12);
  EXPECT_DOUBLE_EQ(integral_mean(img, -1, 0, 20.0), 0.0);
  EXPECT_DOUBLE_EQ(integral_mean(img, -1, 0, 20.0, Border::kReplicate), img.at(0, 0));
}

TEST(SkReconstruct, OutputDimensions) {
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 5;
  for (int R : {1, 2, 3}) {
    p.scale = R;
    const GrayImage out = sk_reconstruct(GrayImage(9, 6, 10.0), p);
    EXPECT_EQ(out.width(), 9 * R);
    EXPECT_EQ(out.height(), 6 * R);
  }
}

TEST(SkReconstruct, ConstantReproductionReplicate) {
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 20;
  p.scale = 2;
  p.border = Border::kReplicate;
  for (double v : {0.0, 37.0, 200.0, 255.0}) {
    const GrayImage out = sk_reconstruct(GrayImage(64, 64, v), p);
    double dev = 0.0;
    for (double x : out.data()) dev = std::max(dev, std::fabs(x - v));
    EXPECT_LE(dev, 1e-3 * 255) << "value " << v;
  }
}

TEST(SkReconstruct, ConstantReproductionInteriorZeroBorder) {
  // Away from the footprint edge the zero extension is invisible.
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 20;
  p.scale = 2;
  const GrayImage out = sk_reconstruct(GrayImage(64, 64, 100.0), p);
  for (int y = 40; y < 88; ++y)
    for (int x = 40; x < 88; ++x) EXPECT_NEAR(out.at(x, y), 100.0, 0.255);
  EXPECT_LT(out.at(0, 0), 90.0);
}

TEST(SkReconstruct, RangeConfinement) {
  std::mt19937_64 gen(3);
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 10;
  p.border = Border::kReplicate;
  p.clamp = false;
  for (int t = 0; t < 10; ++t) {
    const GrayImage img = random_image(gen, 12, 10, 40.0, 180.0);
    const GrayImage out = sk_reconstruct(img, p);
    EXPECT_GE(out.min(), img.min() - 1e-3 * 255);
    EXPECT_LE(out.max(), img.max() + 1e-3 * 255);
  }
}

TEST(SkReconstruct, ClampingBoundsOutput) {
  // Sharp edges overshoot without clamping; with it the output stays in range.
  const GrayImage img = make_image(16, 16, [](int x, int) { return x < 8 ? 0.0 : 255.0; });
  SkParams p;
  p.kernel = KernelSpec::vallee_poussin();
  p.truncation = 400;
  p.w = 4;
  const GrayImage clamped = sk_reconstruct(img, p);
  EXPECT_GE(clamped.min(), 0.0);
  EXPECT_LE(clamped.max(), 255.0);
}

TEST(SkReconstruct, StepEdgeConvergence) {
  const GrayImage img = make_image(32, 32, [](int x, int) { return x < 16 ? 0.0 : 255.0; });
  const GrayImage ideal = replicate_upscale(img, 2);
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.border = Border::kReplicate;
  double prev = 1e300;
  for (double w : {5.0, 10.0, 20.0, 40.0}) {
    p.w = w;
    const double err = l1_distance(sk_reconstruct(img, p), ideal);
    EXPECT_LT(err, prev) << "w = " << w;
    prev = err;
  }
}

TEST(SkReconstruct, SeparableMatchesDirect) {
  std::mt19937_64 gen(5);
  const GrayImage img = random_image(gen, 10, 8);
  for (Border border : {Border::kZero, Border::kReplicate}) {
    for (const KernelSpec& k : {KernelSpec::jackson(6), KernelSpec::jackson(3, 1.5)}) {
      SkParams p;
      p.kernel = k;
      p.w = 3.5;
      p.scale = 2;
      p.truncation = 30;
      p.border = border;
      p.clamp = false;
      const GrayImage fast = sk_reconstruct(img, p);
      p.force_direct = true;
      const GrayImage direct = sk_reconstruct(img, p);
      EXPECT_LE(max_abs_diff(fast, direct), 1e-9);
    }
  }
}

TEST(SkReconstruct, Linearity) {
  std::mt19937_64 gen(9);
  const GrayImage f = random_image(gen, 12, 9), g = random_image(gen, 12, 9);
  const GrayImage combo = make_image(12, 9, [&](int x, int y) { return 0.3 * f.at(x, y) + 1.7 * g.at(x, y); });
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 6;
  p.clamp = false;
  const GrayImage sf = sk_reconstruct(f, p), sg = sk_reconstruct(g, p), sc = sk_reconstruct(combo, p);
  for (std::size_t i = 0; i < sc.size(); ++i)
    EXPECT_NEAR(sc.data()[i], 0.3 * sf.data()[i] + 1.7 * sg.data()[i], 1e-9);
}

TEST(SkReconstruct, IntegerShiftEquivariance) {
  std::mt19937_64 gen(13);
  const GrayImage core = random_image(gen, 6, 6);
  auto embed = [&](int ox) {
    return make_image(30, 16, [&](int x, int y) {
      const int u = x - ox, v = y - 5;
      return (u >= 0 && u < 6 && v >= 0 && v < 6) ? core.at(u, v) : 0.0;
    });
  };
  SkParams p;
  p.kernel = KernelSpec::jackson(6);
  p.w = 4;
  p.scale = 3;
  p.clamp = false;
  const GrayImage a = sk_reconstruct(embed(6), p), b = sk_reconstruct(embed(7), p);
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x + 3 < a.width(); ++x) EXPECT_NEAR(b.at(x + 3, y), a.at(x, y), 1e-9);
}

TEST(SkReconstruct, WendlandUsesDirectPath) {
  SkParams p;
  p.kernel = KernelSpec::wendland(2, 1);
  p.w = 4;
  const GrayImage out = sk_reconstruct(GrayImage(8, 8, 100.0), p);
  EXPECT_EQ(out.width(), 16);
  EXPECT_GT(out.max(), 0.0);
}

TEST(SkReconstruct, Deterministic) {
  std::mt19937_64 gen(21);
  const GrayImage img = random_image(gen, 20, 20);
  SkParams p;
  EXPECT_EQ(sk_reconstruct(img, p), sk_reconstruct(img, p));
}

TEST(SkParams, Validation) {
  SkParams p;
  p.w = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.scale = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.truncation = -1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.w = std::nan("");
  EXPECT_THROW(sk_reconstruct(GrayImage(2, 2), p), Error);
}

TEST(ReplicateUpscale, Blocks) {
  const GrayImage img(2, 1, {4, 9});
  const GrayImage up = replicate_upscale(img, 3);
  EXPECT_EQ(up.width(), 6);
  EXPECT_EQ(up.height(), 3);
  EXPECT_EQ(up.at(2, 2), 4);
  EXPECT_EQ(up.at(3, 0), 9);
}

TEST(Border, ParseRoundTrip) {
  EXPECT_EQ(parse_border(border_name(Border::kReplicate)), Border::kReplicate);
  EXPECT_EQ(parse_border("zero"), Border::kZero);
  EXPECT_THROW(parse_border("wrap"), Error);
}
