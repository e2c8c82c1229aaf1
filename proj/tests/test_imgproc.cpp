#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "skseg/error.hpp"
#include "skseg/imgproc.hpp"
#include "test_support.hpp"

using namespace skseg;
using skseg::testing::make_image;
using skseg::testing::make_mask;
using skseg::testing::random_image;
using skseg::testing::random_mask;

namespace {

// Orthonormal 2-D Haar analysis to `levels`, details zeroed, then synthesis.
std::vector<double> haar_oracle(std::vector<double> v, int n, int levels) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<double> t(v.size());
  int size = n;
  for (int l = 0; l < levels; ++l, size /= 2) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size / 2; ++x) {
        const double a = v[y * n + 2 * x], b = v[y * n + 2 * x + 1];
        t[y * n + x] = (a + b) * r;
        t[y * n + size / 2 + x] = (a - b) * r;
      }
    }
    for (int x = 0; x < size; ++x) {
      for (int y = 0; y < size / 2; ++y) {
        const double a = t[(2 * y) * n + x], b = t[(2 * y + 1) * n + x];
        v[y * n + x] = (a + b) * r;
        v[(size / 2 + y) * n + x] = (a - b) * r;
      }
    }
  }
  // Keep only the coarse approximation block.
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (x >= size || y >= size) v[y * n + x] = 0.0;
  for (; size < n; size *= 2) {
    for (int x = 0; x < 2 * size; ++x) {
      for (int y = 0; y < size; ++y) {
        const double a = v[y * n + x], d = v[(size + y) * n + x];
        t[(2 * y) * n + x] = (a + d) * r;
        t[(2 * y + 1) * n + x] = (a - d) * r;
      }
    }
    for (int y = 0; y < 2 * size; ++y) {
      for (int x = 0; x < size; ++x) {
        const double a = t[y * n + x], d = t[y * n + size + x];
        v[y * n + 2 * x] = (a + d) * r;
        v[y * n + 2 * x + 1] = (a - d) * r;
      }
    }
  }
  return v;
}

}  // namespace

TEST(EllipseMask, CircleAndRotation) {
  const BinaryMask m = ellipse_mask(20, 20, {10, 10, 5, 5, 0.0});
  EXPECT_TRUE(m.at(9, 9));
  EXPECT_TRUE(m.at(14, 9));   // centre (14.5, 9.5) at distance 4.53
  EXPECT_FALSE(m.at(15, 9));  // (15.5, 9.5) at distance 5.52
  const auto area = static_cast<double>(m.count());
  EXPECT_NEAR(area, std::numbers::pi * 25, 8.0);
  // A quarter turn swaps the axes.
  const BinaryMask a = ellipse_mask(30, 30, {15, 15, 9, 4, 0.0});
  const BinaryMask b = ellipse_mask(30, 30, {15, 15, 4, 9, std::numbers::pi / 2});
  EXPECT_EQ(a, b);
}

TEST(EllipseMask, DegenerateAxis) {
  const BinaryMask m = ellipse_mask(5, 5, {2.3, 3.7, 0.0, 2.0, 0.0});
  EXPECT_EQ(m.count(), 1u);
  EXPECT_TRUE(m.at(2, 3));
  EXPECT_THROW(ellipse_mask(5, 5, {2, 2, -1, 1, 0}), Error);
}

TEST(ApplyMask, ZerosOutside) {
  const GrayImage img(2, 2, {1, 2, 3, 4});
  const GrayImage out = apply_mask(img, BinaryMask(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1}));
  EXPECT_EQ(out, GrayImage(2, 2, {1, 0, 0, 4}));
  EXPECT_THROW(apply_mask(img, BinaryMask(3, 2)), Error);
}

TEST(WaveletResidual, HaarMatchesOrthonormalTransform) {
  std::mt19937_64 gen(17);
  for (int levels : {1, 2, 3, 5}) {
    const GrayImage img = random_image(gen, 32, 32);
    const GrayImage res = wavelet_residual(img, levels, WaveletBasis::kHaar);
    const auto oracle = haar_oracle({img.data().begin(), img.data().end()}, 32, levels);
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(res.data()[i], oracle[i], 1e-9);
  }
}

TEST(WaveletResidual, HaarPreservesMeanOnDyadicSize) {
  std::mt19937_64 gen(19);
  const GrayImage img = random_image(gen, 64, 32);
  EXPECT_NEAR(wavelet_residual(img, 4).mean(), img.mean(), 1e-9);
}

TEST(WaveletResidual, HaarNonDyadicSizeUsesReplicatePadding) {
  const GrayImage img(3, 1, {0, 6, 9});
  // Padded to 4 x 2 by replication: blocks {0,6 | 0,6} and {9,9 | 9,9}.
  const GrayImage res = wavelet_residual(img, 1);
  EXPECT_DOUBLE_EQ(res.at(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(res.at(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(res.at(2, 0), 9.0);
}

TEST(WaveletResidual, AtrousConstantAndSmoothing) {
  EXPECT_EQ(wavelet_residual(GrayImage(40, 30, 77.0), 3, WaveletBasis::kAtrous),
            GrayImage(40, 30, 77.0));
  std::mt19937_64 gen(23);
  const GrayImage img = random_image(gen, 48, 48);
  auto roughness = [](const GrayImage& g) {
    double s = 0.0;
    for (int y = 0; y < g.height(); ++y)
      for (int x = 1; x < g.width(); ++x) s += std::fabs(g.at(x, y) - g.at(x - 1, y));
    return s;
  };
  const GrayImage r2 = wavelet_residual(img, 2, WaveletBasis::kAtrous);
  const GrayImage r4 = wavelet_residual(img, 4, WaveletBasis::kAtrous);
  EXPECT_LT(roughness(r2), roughness(img));
  EXPECT_LT(roughness(r4), roughness(r2));
  EXPECT_GE(r4.min(), img.min() - 1e-9);
  EXPECT_LE(r4.max(), img.max() + 1e-9);
}

TEST(WaveletResidual, AtrousImpulseResponse) {
  // One level on an interior impulse gives the outer product of the B3 filter.
  GrayImage img = make_image(9, 9, [](int x, int y) { return x == 4 && y == 4 ? 256.0 : 0.0; });
  const GrayImage res = wavelet_residual(img, 1, WaveletBasis::kAtrous);
  const double h[5] = {1, 4, 6, 4, 1};
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const double e = (std::abs(x - 4) <= 2 && std::abs(y - 4) <= 2) ? h[x - 2] * h[y - 2] : 0.0;
      EXPECT_DOUBLE_EQ(res.at(x, y), e);
    }
  }
}

TEST(WaveletResidual, RejectsTooManyLevels) {
  EXPECT_THROW(wavelet_residual(GrayImage(16, 16), 5), Error);
  EXPECT_NO_THROW(wavelet_residual(GrayImage(16, 16), 4));
  EXPECT_THROW(wavelet_residual(GrayImage(16, 16), 0), Error);
}

TEST(NormalizeMinmax, MapsRange) {
  const GrayImage out = normalize_minmax(GrayImage(3, 1, {10, 20, 30}));
  EXPECT_EQ(out, GrayImage(3, 1, {0, 127.5, 255}));
  EXPECT_EQ(normalize_minmax(GrayImage(2, 2, 5.0)), GrayImage(2, 2, 0.0));
}

TEST(Equalize, KnownHistogram) {
  // Levels 0, 0, 1, 2: cdf 2, 3, 4, min 2 -> 0, 127.5 -> 128, 255.
  const GrayImage out = equalize(GrayImage(4, 1, {0, 0, 1, 2}));
  EXPECT_EQ(out, GrayImage(4, 1, {0, 0, 128, 255}));
  EXPECT_EQ(equalize(GrayImage(3, 3, 42.0)), GrayImage(3, 3, 255.0));
}

TEST(Equalize, IdempotentAndMonotone) {
  std::mt19937_64 gen(29);
  for (int t = 0; t < 20; ++t) {
    const GrayImage img = skseg::testing::random_integer_image(gen, 16, 16);
    const GrayImage e = equalize(img);
    EXPECT_EQ(equalize(e), e);
    for (std::size_t i = 0; i < img.size(); ++i) {
      for (std::size_t j = 0; j < img.size(); j += 7) {
        if (img.data()[i] < img.data()[j]) EXPECT_LE(e.data()[i], e.data()[j]);
      }
    }
    EXPECT_EQ(e.max(), 255.0);
    EXPECT_EQ(e.min(), 0.0);
  }
}

TEST(AdaptiveThreshold, MatchesBruteForce) {
  std::mt19937_64 gen(31);
  const GrayImage img = random_image(gen, 13, 11);
  const BinaryMask support = random_mask(gen, 13, 11, 0.7);
  const int window = 5, r = 2;
  const double offset = 3.0;
  const BinaryMask plain = adaptive_threshold(img, window, offset);
  const BinaryMask masked = adaptive_threshold(img, window, offset, support);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 13; ++x) {
      double s = 0.0, sm = 0.0, cm = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int u = std::clamp(x + dx, 0, 12), v = std::clamp(y + dy, 0, 10);
          s += img.at(u, v);
          if (support.at(u, v)) {
            sm += img.at(u, v);
            cm += 1.0;
          }
        }
      }
      EXPECT_EQ(plain.at(x, y), img.at(x, y) > s / 25.0 + offset);
      const bool expect = support.at(x, y) && cm > 0 && img.at(x, y) > sm / cm + offset;
      EXPECT_EQ(masked.at(x, y), expect);
    }
  }
  EXPECT_THROW(adaptive_threshold(img, 4, 0), Error);
}

TEST(Dilate, SquareStructuringElement) {
  const BinaryMask m = make_mask(9, 9, [](int x, int y) { return x == 4 && y == 4; });
  const BinaryMask d = dilate(m, 2);
  EXPECT_EQ(d.count(), 25u);
  EXPECT_TRUE(d.at(2, 6));
  EXPECT_FALSE(d.at(1, 4));
  EXPECT_EQ(dilate(m, 0), m);
  // Dilation is extensive and monotone in the radius.
  std::mt19937_64 gen(37);
  const BinaryMask r = random_mask(gen, 20, 20, 0.05);
  const BinaryMask d1 = dilate(r, 1), d2 = dilate(r, 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_LE(r[i], d1[i]);
    EXPECT_LE(d1[i], d2[i]);
  }
}

TEST(Binarize, StrictAndInclusive) {
  const GrayImage img(3, 1, {126, 127, 128});
  EXPECT_EQ(binarize(img, 127), BinaryMask(3, 1, std::vector<std::uint8_t>{0, 0, 1}));
  EXPECT_EQ(binarize(img, 127, false), BinaryMask(3, 1, std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(PlaqueMask, ThresholdInsideVessel) {
  const GrayImage img = make_image(7, 7, [](int x, int y) { return (x == 3 && y == 3) || x == 0 ? 250.0 : 50.0; });
  const BinaryMask vessel = make_mask(7, 7, [](int x, int) { return x > 0; });
  const BinaryMask p = plaque_mask(img, vessel, 200, 1);
  EXPECT_EQ(p.count(), 9u);
  EXPECT_FALSE(p.at(0, 0));
}

TEST(ColoredMap, Colors) {
  const BinaryMask pred(4, 1, std::vector<std::uint8_t>{1, 1, 0, 0});
  const BinaryMask target(4, 1, std::vector<std::uint8_t>{1, 0, 1, 0});
  const RgbImage map = colored_map(pred, target);
  EXPECT_EQ(map.at(0, 0), (RgbImage::Pixel{0, 255, 0}));
  EXPECT_EQ(map.at(1, 0), (RgbImage::Pixel{255, 0, 0}));
  EXPECT_EQ(map.at(2, 0), (RgbImage::Pixel{255, 255, 255}));
  EXPECT_EQ(map.at(3, 0), (RgbImage::Pixel{0, 0, 0}));
}

TEST(MaskOps, Algebra) {
  std::mt19937_64 gen(41);
  const BinaryMask a = random_mask(gen, 10, 10), b = random_mask(gen, 10, 10);
  const BinaryMask both = mask_and(a, b), diff = mask_and_not(a, b);
  EXPECT_EQ(mask_and(diff, b).count(), 0u);
  EXPECT_EQ(both.count() + diff.count(), a.count());
  const GrayImage s = superpose(a, GrayImage(10, 10, 3.0));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(s.data()[i], a[i] ? 255.0 : 3.0);
  const BinaryMask up = replicate_upscale(a, 2);
  EXPECT_EQ(up.count(), 4 * a.count());
}

TEST(WaveletBasis, Parse) {
  EXPECT_EQ(parse_basis("haar"), WaveletBasis::kHaar);
  EXPECT_EQ(parse_basis(basis_name(WaveletBasis::kAtrous)), WaveletBasis::kAtrous);
  EXPECT_THROW(parse_basis("db4"), Error);
}
