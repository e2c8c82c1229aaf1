#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "skseg/skseg.h"
#include "temp_dir.hpp"

namespace fs = std::filesystem;
using skseg::testing::TempDir;

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(skseg_version(), "1.0.0");
  EXPECT_STREQ(skseg_status_name(SKSEG_OK), "ok");
  EXPECT_STRNE(skseg_status_name(SKSEG_ERR_IO), skseg_status_name(SKSEG_ERR_CONFIG));
}

TEST(CApi, ConfigRoundTrip) {
  skseg_config* cfg = nullptr;
  ASSERT_EQ(skseg_config_new(&cfg), SKSEG_OK);
  EXPECT_EQ(skseg_config_set(cfg, "sk.w", "12.5"), SKSEG_OK);
  char buf[8];
  size_t needed = 0;
  EXPECT_EQ(skseg_config_get(cfg, "sk.w", buf, sizeof buf, &needed), SKSEG_OK);
  EXPECT_STREQ(buf, "12.5");
  EXPECT_EQ(needed, 4u);
  char tiny[3];
  EXPECT_EQ(skseg_config_get(cfg, "sk.w", tiny, sizeof tiny, &needed), SKSEG_OK);
  EXPECT_STREQ(tiny, "12");
  EXPECT_EQ(skseg_config_set(cfg, "sk.w", "zero"), SKSEG_ERR_CONFIG);
  EXPECT_NE(std::string(skseg_last_error()).find("sk.w"), std::string::npos);
  EXPECT_EQ(skseg_config_set(cfg, "no.such", "1"), SKSEG_ERR_CONFIG);
  EXPECT_EQ(skseg_config_set(nullptr, "sk.w", "1"), SKSEG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(skseg_config_load(cfg, "/nonexistent/x.conf"), SKSEG_ERR_IO);
  skseg_config_free(cfg);
  skseg_config_free(nullptr);
}

TEST(CApi, KeyTable) {
  const size_t n = skseg_config_key_count();
  ASSERT_GT(n, 10u);
  bool found = false;
  for (size_t i = 0; i < n; ++i) {
    if (std::string(skseg_config_key_name(i)) == "sk.w") {
      found = true;
      EXPECT_STREQ(skseg_config_key_default(i), "20");
    }
    EXPECT_NE(skseg_config_key_type(i), nullptr);
    EXPECT_NE(skseg_config_key_help(i), nullptr);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(skseg_config_key_name(n), nullptr);
}

TEST(CApi, ImageLifecycleAndReconstruct) {
  std::vector<double> px(16 * 12, 80.0);
  skseg_image* img = nullptr;
  ASSERT_EQ(skseg_image_new(16, 12, px.data(), &img), SKSEG_OK);
  EXPECT_EQ(skseg_image_width(img), 16);
  EXPECT_EQ(skseg_image_height(img), 12);
  skseg_config* cfg = nullptr;
  ASSERT_EQ(skseg_config_new(&cfg), SKSEG_OK);
  skseg_config_set(cfg, "kernel.k", "6");
  skseg_config_set(cfg, "sk.border", "replicate");
  skseg_image* out = nullptr;
  ASSERT_EQ(skseg_reconstruct(cfg, img, &out), SKSEG_OK);
  EXPECT_EQ(skseg_image_width(out), 32);
  std::vector<double> got(32 * 24);
  ASSERT_EQ(skseg_image_copy(out, got.data(), got.size()), SKSEG_OK);
  for (double v : got) EXPECT_NEAR(v, 80.0, 0.255);
  EXPECT_EQ(skseg_image_copy(out, got.data(), 3), SKSEG_ERR_INVALID_ARGUMENT);

  TempDir dir("capi");
  const std::string path = (dir / "o.png").string();
  EXPECT_EQ(skseg_image_save(out, path.c_str()), SKSEG_OK);
  skseg_image* back = nullptr;
  EXPECT_EQ(skseg_image_load(path.c_str(), &back), SKSEG_OK);
  EXPECT_EQ(skseg_image_width(back), 32);
  EXPECT_EQ(skseg_image_load((dir / "none.png").string().c_str(), &back), SKSEG_ERR_IO);

  EXPECT_EQ(skseg_image_new(0, 5, px.data(), &img), SKSEG_ERR_INVALID_ARGUMENT);
  std::vector<double> bad = {1.0, NAN, 2.0, 3.0};
  skseg_image* nanimg = nullptr;
  EXPECT_EQ(skseg_image_new(2, 2, bad.data(), &nanimg), SKSEG_ERR_NUMERIC);
  skseg_image_free(back);
  skseg_image_free(out);
  skseg_image_free(img);
  skseg_config_free(cfg);
}

TEST(CApi, CheckKernel) {
  skseg_config* cfg = nullptr;
  ASSERT_EQ(skseg_config_new(&cfg), SKSEG_OK);
  skseg_config_set(cfg, "kernel.k", "6");
  skseg_kernel_report r{};
  ASSERT_EQ(skseg_check_kernel(cfg, 1.0, 0.0, 10.0, 0.01, 200, &r), SKSEG_OK);
  EXPECT_LE(r.k2_max_deviation, 1e-3);
  EXPECT_TRUE(std::isfinite(r.m_beta));
  EXPECT_EQ(r.bounded_near_zero, 1);
  EXPECT_EQ(skseg_check_kernel(cfg, 1.0, 0.0, 10.0, -1.0, 200, &r), SKSEG_ERR_INVALID_ARGUMENT);
  EXPECT_GT(skseg_kernel_value_2d(cfg, 0.0, 0.0), 0.0);
  skseg_config_free(cfg);
}

TEST(CApi, BatchRoundTrip) {
  TempDir dir("capi");
  const std::string in = (dir / "in").string(), seg = (dir / "seg").string();
  ASSERT_EQ(skseg_phantom(nullptr, in.c_str(), 42, 3, 1, 3.0), SKSEG_OK) << skseg_last_error();
  skseg_batch_summary s{};
  ASSERT_EQ(skseg_segment_series(nullptr, in.c_str(), seg.c_str(), 0, &s), SKSEG_OK) << skseg_last_error();
  EXPECT_EQ(s.slices, 3u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_STREQ(skseg_last_warnings(), "");
  const std::string eval = (dir / "eval").string(), truth = (dir / "in/truth/lumen").string();
  ASSERT_EQ(skseg_evaluate(nullptr, seg.c_str(), truth.c_str(), eval.c_str(), "c_f", 0.8, 2, &s), SKSEG_OK)
      << skseg_last_error();
  EXPECT_EQ(s.slices, 3u);
  EXPECT_TRUE(fs::exists(dir / "eval/per_patient.csv"));
  double ma = 0, mb = 0;
  ASSERT_EQ(skseg_compare(nullptr, seg.c_str(), eval.c_str(), "cm", "truth", (dir / "cmp").string().c_str(),
                          &ma, &mb),
            SKSEG_OK)
      << skseg_last_error();
  EXPECT_GT(ma, 0.5);
  EXPECT_GT(mb, 0.5);
  EXPECT_EQ(skseg_compare(nullptr, seg.c_str(), eval.c_str(), "x", "x", (dir / "cmp").string().c_str(),
                          &ma, &mb),
            SKSEG_ERR_INVALID_ARGUMENT);

  std::ofstream((dir / "in/P01/basal/s002.png").string(), std::ios::trunc) << "junk";
  ASSERT_EQ(skseg_segment_series(nullptr, in.c_str(), seg.c_str(), 0, &s), SKSEG_OK);
  EXPECT_EQ(s.failures, 1u);
  EXPECT_NE(std::string(skseg_last_warnings()).find("s002"), std::string::npos);
  EXPECT_EQ(skseg_segment_series(nullptr, "/nonexistent/dir", seg.c_str(), 0, &s), SKSEG_ERR_IO);
}
