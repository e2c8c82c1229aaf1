#include "skseg/skseg.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>

#include "skseg/batch.hpp"
#include "skseg/config.hpp"
#include "skseg/error.hpp"
#include "skseg/image_io.hpp"
#include "skseg/kernels.hpp"
#include "skseg/phantom.hpp"
#include "skseg/pipeline.hpp"
#include "skseg/sk.hpp"

struct skseg_config {
  skseg::RunConfig cfg;
};

struct skseg_image {
  skseg::GrayImage img;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_warnings;

skseg_status to_status(skseg::ErrorCode c) {
  switch (c) {
    case skseg::ErrorCode::kInvalidArgument: return SKSEG_ERR_INVALID_ARGUMENT;
    case skseg::ErrorCode::kDimensionMismatch: return SKSEG_ERR_DIMENSION;
    case skseg::ErrorCode::kIo: return SKSEG_ERR_IO;
    case skseg::ErrorCode::kNumeric: return SKSEG_ERR_NUMERIC;
    case skseg::ErrorCode::kConfig: return SKSEG_ERR_CONFIG;
  }
  return SKSEG_ERR_INTERNAL;
}

template <typename F>
skseg_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return SKSEG_OK;
  } catch (const skseg::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SKSEG_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) skseg::fail(skseg::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

const skseg::RunConfig& config_or_default(const skseg_config* cfg) {
  static const skseg::RunConfig defaults;
  return cfg ? cfg->cfg : defaults;
}

}  // namespace

extern "C" {

const char* skseg_version(void) { return "1.0.0"; }

const char* skseg_status_name(skseg_status status) {
  switch (status) {
    case SKSEG_OK: return "ok";
    case SKSEG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SKSEG_ERR_DIMENSION: return "dimension mismatch";
    case SKSEG_ERR_IO: return "i/o error";
    case SKSEG_ERR_NUMERIC: return "numeric error";
    case SKSEG_ERR_CONFIG: return "configuration error";
    case SKSEG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* skseg_last_error(void) { return g_last_error.c_str(); }
const char* skseg_last_warnings(void) { return g_last_warnings.c_str(); }

skseg_status skseg_config_new(skseg_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new skseg_config{};
  });
}

void skseg_config_free(skseg_config* cfg) { delete cfg; }

skseg_status skseg_config_set(skseg_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    cfg->cfg.set(key, value);
  });
}

skseg_status skseg_config_load(skseg_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(path, "path");
    cfg->cfg.load_file(path);
  });
}

skseg_status skseg_config_get(const skseg_config* cfg, const char* key, char* buf, size_t cap,
                              size_t* needed) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    const std::string& v = cfg->cfg.get(key);
    if (needed) *needed = v.size();
    if (buf && cap > 0) {
      const size_t n = std::min(v.size(), cap - 1);
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
  });
}

size_t skseg_config_key_count(void) { return skseg::config_keys().size(); }

static const skseg::ConfigKey* key_at(size_t i) {
  const auto& keys = skseg::config_keys();
  return i < keys.size() ? &keys[i] : nullptr;
}

const char* skseg_config_key_name(size_t i) { return key_at(i) ? key_at(i)->name : nullptr; }
const char* skseg_config_key_type(size_t i) { return key_at(i) ? key_at(i)->type : nullptr; }
const char* skseg_config_key_default(size_t i) {
  return key_at(i) ? key_at(i)->default_value : nullptr;
}
const char* skseg_config_key_help(size_t i) { return key_at(i) ? key_at(i)->help : nullptr; }

skseg_status skseg_image_new(int width, int height, const double* data, skseg_image** out) {
  return guarded([&] {
    require(out, "out");
    require(data, "data");
    if (width < 1 || height < 1) {
      skseg::fail(skseg::ErrorCode::kInvalidArgument, "image dimensions must be positive");
    }
    const size_t n = static_cast<size_t>(width) * static_cast<size_t>(height);
    *out = new skseg_image{skseg::GrayImage(width, height, std::vector<double>(data, data + n))};
  });
}

skseg_status skseg_image_load(const char* path, skseg_image** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new skseg_image{skseg::load_image(path)};
  });
}

skseg_status skseg_image_save(const skseg_image* img, const char* path) {
  return guarded([&] {
    require(img, "img");
    require(path, "path");
    skseg::save_image(img->img, path);
  });
}

void skseg_image_free(skseg_image* img) { delete img; }
int skseg_image_width(const skseg_image* img) { return img ? img->img.width() : 0; }
int skseg_image_height(const skseg_image* img) { return img ? img->img.height() : 0; }

skseg_status skseg_image_copy(const skseg_image* img, double* buf, size_t len) {
  return guarded([&] {
    require(img, "img");
    require(buf, "buf");
    if (len < img->img.size()) {
      skseg::fail(skseg::ErrorCode::kInvalidArgument, "buffer holds fewer than width * height values");
    }
    const auto d = img->img.data();
    std::copy(d.begin(), d.end(), buf);
  });
}

skseg_status skseg_reconstruct(const skseg_config* cfg, const skseg_image* in, skseg_image** out) {
  return guarded([&] {
    require(in, "in");
    require(out, "out");
    const skseg::SkParams p = config_or_default(cfg).sk();
    *out = new skseg_image{skseg::sk_reconstruct(in->img, p)};
  });
}

skseg_status skseg_check_kernel(const skseg_config* cfg, double beta, double start, double stop,
                                double step, int truncation, skseg_kernel_report* out) {
  return guarded([&] {
    require(out, "out");
    const skseg::KernelSpec spec = config_or_default(cfg).kernel();
    // Non-positive truncation: 200 lattice steps for product kernels, the SK
    // window for Wendland (the direct double sum is quadratic in it).
    if (truncation <= 0) truncation = spec.separable() ? 200 : skseg::default_truncation(spec);
    const auto r = skseg::verify_kernel(spec, beta, skseg::KernelProbe{start, stop, step, truncation});
    *out = {r.k2_max_deviation, r.m0, r.m_beta, r.beta, r.l1_norm, r.bounded_near_zero ? 1 : 0};
  });
}

double skseg_kernel_value_2d(const skseg_config* cfg, double x, double y) {
  double v = 0.0;
  const skseg_status st = guarded([&] { v = skseg::kernel_2d(x, y, config_or_default(cfg).kernel()); });
  return st == SKSEG_OK ? v : std::numeric_limits<double>::quiet_NaN();
}

skseg_status skseg_segment_series(const skseg_config* cfg, const char* in_dir, const char* out_dir,
                                  int no_sk, skseg_batch_summary* summary) {
  g_last_warnings.clear();
  return guarded([&] {
    require(in_dir, "in_dir");
    const auto& c = config_or_default(cfg);
    skseg::SeriesOptions opts;
    opts.no_sk = no_sk != 0;
    opts.parallelism = c.parallelism();
    if (out_dir) opts.out_dir = out_dir;
    const auto res = skseg::run_series(in_dir, c.pipeline(), c.sk(), opts);
    for (const auto& s : res.slices) {
      if (!s.output) g_last_warnings += s.patient + "/" + s.id + ": " + s.error + "\n";
    }
    if (summary) *summary = {res.slices.size(), res.failures()};
  });
}

skseg_status skseg_evaluate(const skseg_config* cfg, const char* pred_dir, const char* target_dir,
                            const char* out_dir, const char* pred_name, double pred_threshold,
                            int target_scale, skseg_batch_summary* summary) {
  g_last_warnings.clear();
  return guarded([&] {
    require(pred_dir, "pred_dir");
    require(target_dir, "target_dir");
    require(out_dir, "out_dir");
    const auto& c = config_or_default(cfg);
    skseg::EvaluateOptions opts;
    if (pred_name) opts.pred_name = pred_name;
    opts.pred_threshold = pred_threshold;
    opts.target_scale = target_scale;
    const auto p = c.pipeline();
    opts.ssim_mode = p.ssim_mode;
    opts.c1 = p.ssim_c1;
    opts.c2 = p.ssim_c2;
    opts.conv = c.std_convention();
    const auto res = skseg::evaluate_dirs(pred_dir, target_dir, out_dir, opts);
    for (const auto& e : res.errors) g_last_warnings += e + "\n";
    if (summary) *summary = {res.slices, res.errors.size()};
  });
}

skseg_status skseg_compare(const skseg_config* cfg, const char* a, const char* b,
                           const char* name_a, const char* name_b, const char* out_dir,
                           double* mean_dci_a, double* mean_dci_b) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out_dir, "out_dir");
    const auto& c = config_or_default(cfg);
    const auto s = skseg::compare_reports(a, name_a ? name_a : "A", b, name_b ? name_b : "B", out_dir,
                                          c.std_convention(), c.boxplot_index());
    if (mean_dci_a) *mean_dci_a = s[0].by_index[0].mean;
    if (mean_dci_b) *mean_dci_b = s[1].by_index[0].mean;
  });
}

skseg_status skseg_phantom(const skseg_config* cfg, const char* out_dir, uint64_t seed, int count,
                           int patients, double noise_sigma) {
  (void)cfg;
  return guarded([&] {
    require(out_dir, "out_dir");
    skseg::write_suite(out_dir, seed, count, patients, noise_sigma);
  });
}

}  // extern "C"
