#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <deque>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skseg/skseg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

struct ConfigDeleter {
  void operator()(skseg_config* c) const { skseg_config_free(c); }
};
struct ImageDeleter {
  void operator()(skseg_image* i) const { skseg_image_free(i); }
};
using Config = std::unique_ptr<skseg_config, ConfigDeleter>;
using Image = std::unique_ptr<skseg_image, ImageDeleter>;

// Raised for failures reported by the library; carries the exit code.
struct Failure {
  int code;
};

void check(skseg_status st, const char* what) {
  if (st == SKSEG_OK) return;
  std::cerr << "skseg: " << what << ": " << skseg_last_error() << "\n";
  throw Failure{kExitFailure};
}

std::string config_help() {
  std::string out = "Configuration keys (--set key=value, or `key = value` in --config files):\n";
  for (size_t i = 0; i < skseg_config_key_count(); ++i) {
    char line[512];
    std::snprintf(line, sizeof line, "  %-28s %-34s default %-10s %s\n", skseg_config_key_name(i),
                  skseg_config_key_type(i), *skseg_config_key_default(i) ? skseg_config_key_default(i) : "\"\"",
                  skseg_config_key_help(i));
    out += line;
  }
  out += "Precedence: defaults < --config file < --set < dedicated flags.\n"
         "Exit codes: 0 success, 1 failure, 2 usage error, 3 partial per-slice failure.\n";
  return out;
}

// Shared --config / --set handling plus flag-to-key bindings.
struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::deque<std::string> storage;  // stable addresses for CLI11
  std::vector<std::pair<std::string, std::string*>> bound;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "configuration file");
    app->add_option("--set", sets, "override one configuration key (key=value); repeatable");
    app->footer(config_help());
  }

  // A flag whose value, when given, overrides `key`.
  CLI::Option* bind(CLI::App* app, const std::string& flag, const std::string& key,
                    const std::string& help) {
    std::string& slot = storage.emplace_back();
    bound.emplace_back(key, &slot);
    return app->add_option(flag, slot, help + " [" + key + "]");
  }

  Config build() const {
    skseg_config* raw = nullptr;
    check(skseg_config_new(&raw), "config");
    Config cfg(raw);
    if (!config_file.empty()) check(skseg_config_load(cfg.get(), config_file.c_str()), "config");
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "skseg: --set expects key=value, got '" << kv << "'\n";
        throw Failure{kExitUsage};
      }
      check(skseg_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "config");
    }
    for (const auto& [key, value] : bound) {
      if (!value->empty()) check(skseg_config_set(cfg.get(), key.c_str(), value->c_str()), "config");
    }
    return cfg;
  }
};

std::string get(const Config& cfg, const char* key) {
  size_t n = 0;
  check(skseg_config_get(cfg.get(), key, nullptr, 0, &n), "config");
  std::string v(n + 1, '\0');
  check(skseg_config_get(cfg.get(), key, v.data(), v.size(), nullptr), "config");
  v.resize(n);
  return v;
}

std::string require_key(const Config& cfg, const char* key, const char* flag) {
  std::string v = get(cfg, key);
  if (v.empty()) {
    std::cerr << "skseg: missing " << flag << " (or " << key << " in the config)\n";
    throw Failure{kExitUsage};
  }
  return v;
}

int batch_exit(const skseg_batch_summary& s, const char* verb) {
  const char* warnings = skseg_last_warnings();
  if (*warnings) std::cerr << warnings;
  std::cout << verb << " " << s.slices << " slice(s), " << s.failures << " failed\n";
  if (s.failures == 0) return kExitOk;
  return s.failures == s.slices ? kExitFailure : kExitPartial;
}

int run_check_kernel(const Config& cfg, double beta, double start, double stop, double step,
                     int truncation) {
  skseg_kernel_report r{};
  check(skseg_check_kernel(cfg.get(), beta, start, stop, step, truncation, &r), "check-kernel");
  std::printf("family: %s\n", get(cfg, "kernel.family").c_str());
  std::printf("k2_max_deviation: %.12g\n", r.k2_max_deviation);
  std::printf("m0: %.12g\n", r.m0);
  std::printf("m_beta: %.12g\n", r.m_beta);
  std::printf("beta: %.12g\n", r.beta);
  std::printf("l1_norm: %.12g\n", r.l1_norm);
  std::printf("bounded_near_zero: %s\n", r.bounded_near_zero ? "true" : "false");
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"skseg: sampling Kantorovich reconstruction and lumen segmentation toolkit"};
  app.require_subcommand(1, 1);
  app.footer("Run `skseg <command> --help` for the options of each command.");

  // reconstruct
  Common rc;
  auto* reconstruct = app.add_subcommand("reconstruct", "SK reconstruction / rescaling of one image");
  rc.attach(reconstruct);
  rc.bind(reconstruct, "--in", "io.input", "input PNG");
  rc.bind(reconstruct, "--out", "io.output", "output PNG");
  rc.bind(reconstruct, "--w", "sk.w", "sampling rate");
  rc.bind(reconstruct, "--scale", "sk.scale", "rescaling factor R");
  rc.bind(reconstruct, "--family", "kernel.family", "kernel family");
  rc.bind(reconstruct, "--k", "kernel.k", "Jackson order");
  rc.bind(reconstruct, "--alpha", "kernel.alpha", "Jackson stretch");
  rc.bind(reconstruct, "--truncation", "kernel.truncation_radius", "lattice window half-width");
  rc.bind(reconstruct, "--border", "sk.border", "border policy");

  // segment
  Common sc;
  bool no_sk = false;
  auto* segment = app.add_subcommand("segment", "segment every slice of a series directory");
  sc.attach(segment);
  sc.bind(segment, "--in", "io.input", "series directory");
  sc.bind(segment, "--out", "io.output", "output directory");
  sc.bind(segment, "--parallelism", "io.parallelism", "worker threads");
  segment->add_flag("--no-sk", no_sk, "replace the SK reconstruction with pixel replication");

  // evaluate
  Common ec;
  std::string pred_name = "c_f";
  double pred_threshold = 0.8;
  int target_scale = 1;
  auto* evaluate = app.add_subcommand("evaluate", "score prediction masks against target masks");
  ec.attach(evaluate);
  ec.bind(evaluate, "--pred", "io.input", "prediction directory");
  std::string target_dir;
  evaluate->add_option("--target", target_dir, "target mask directory")->required();
  ec.bind(evaluate, "--out", "io.output", "output directory");
  evaluate->add_option("--pred-name", pred_name, "stage file inside per-slice prediction directories")
      ->capture_default_str();
  evaluate->add_option("--pred-threshold", pred_threshold,
                       "prediction foreground iff value/255 > threshold")
      ->capture_default_str();
  evaluate->add_option("--target-scale", target_scale, "pixel-replicate targets by this factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // compare
  Common cc;
  std::string cmp_a, cmp_b, cmp_out = ".", name_a = "A", name_b = "B";
  auto* compare = app.add_subcommand("compare", "summary statistics and boxplot data for two report sets");
  cc.attach(compare);
  compare->add_option("a", cmp_a, "report.csv or directory of <patient>/report.csv (method A)")->required();
  compare->add_option("b", cmp_b, "report.csv or directory of <patient>/report.csv (method B)")->required();
  compare->add_option("--out", cmp_out, "output directory")->capture_default_str();
  compare->add_option("--name-a", name_a, "label of method A")->capture_default_str();
  compare->add_option("--name-b", name_b, "label of method B")->capture_default_str();

  // ablate
  Common ac;
  std::string truth_dir;
  int ablate_scale = 2;
  auto* ablate = app.add_subcommand("ablate", "segment with and without SK and compare the two");
  ac.attach(ablate);
  ac.bind(ablate, "--in", "io.input", "series directory");
  ac.bind(ablate, "--out", "io.output", "output directory");
  ac.bind(ablate, "--parallelism", "io.parallelism", "worker threads");
  ablate->add_option("--truth", truth_dir, "ground-truth lumen masks; scores against them instead of CM_b");
  ablate->add_option("--target-scale", ablate_scale, "pixel-replication factor for --truth masks")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // phantom
  Common pc;
  auto* phantom = app.add_subcommand("phantom", "write a seeded synthetic series with ground truth");
  pc.attach(phantom);
  pc.bind(phantom, "--out", "io.output", "output directory");
  pc.bind(phantom, "--seed", "phantom.seed", "base seed");
  pc.bind(phantom, "--count", "phantom.count", "number of slices");
  pc.bind(phantom, "--patients", "phantom.patients", "patient groups");
  pc.bind(phantom, "--noise-sigma", "phantom.noise_sigma", "Gaussian noise sigma");

  // check-kernel
  Common kc;
  double beta = 1.0, start = 0.0, stop = 10.0, step = 0.01;
  int truncation = 0;
  auto* check_kernel = app.add_subcommand("check-kernel", "probe the kernel axioms on the integer lattice");
  kc.attach(check_kernel);
  kc.bind(check_kernel, "--family", "kernel.family", "kernel family");
  kc.bind(check_kernel, "--k", "kernel.k", "Jackson order");
  kc.bind(check_kernel, "--alpha", "kernel.alpha", "Jackson stretch");
  kc.bind(check_kernel, "--m", "kernel.m", "Wendland power");
  kc.bind(check_kernel, "--smoothness", "kernel.smoothness", "Wendland recursion depth");
  check_kernel->add_option("--beta", beta, "moment order")->capture_default_str();
  check_kernel->add_option("--start", start, "probe start")->capture_default_str();
  check_kernel->add_option("--stop", stop, "probe stop")->capture_default_str();
  check_kernel->add_option("--step", step, "probe step")->capture_default_str();
  check_kernel->add_option("--truncation", truncation,
                           "lattice half-width; 0 = 200 (product kernels) or the SK window (Wendland)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::ParseError& e) {
    std::cerr << "skseg: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*reconstruct) {
      const Config cfg = rc.build();
      const std::string in = require_key(cfg, "io.input", "--in");
      const std::string out = require_key(cfg, "io.output", "--out");
      skseg_image* raw = nullptr;
      check(skseg_image_load(in.c_str(), &raw), "reconstruct");
      const Image src(raw);
      skseg_image* res = nullptr;
      check(skseg_reconstruct(cfg.get(), src.get(), &res), "reconstruct");
      const Image dst(res);
      check(skseg_image_save(dst.get(), out.c_str()), "reconstruct");
      std::cout << "wrote " << out << " (" << skseg_image_width(dst.get()) << "x"
                << skseg_image_height(dst.get()) << ")\n";
      return kExitOk;
    }
    if (*segment) {
      const Config cfg = sc.build();
      const std::string in = require_key(cfg, "io.input", "--in");
      const std::string out = require_key(cfg, "io.output", "--out");
      skseg_batch_summary s{};
      check(skseg_segment_series(cfg.get(), in.c_str(), out.c_str(), no_sk ? 1 : 0, &s), "segment");
      return batch_exit(s, "segmented");
    }
    if (*evaluate) {
      const Config cfg = ec.build();
      const std::string pred = require_key(cfg, "io.input", "--pred");
      const std::string out = require_key(cfg, "io.output", "--out");
      skseg_batch_summary s{};
      check(skseg_evaluate(cfg.get(), pred.c_str(), target_dir.c_str(), out.c_str(), pred_name.c_str(),
                           pred_threshold, target_scale, &s),
            "evaluate");
      return batch_exit(s, "evaluated");
    }
    if (*compare) {
      const Config cfg = cc.build();
      double ma = 0.0, mb = 0.0;
      check(skseg_compare(cfg.get(), cmp_a.c_str(), cmp_b.c_str(), name_a.c_str(), name_b.c_str(),
                          cmp_out.c_str(), &ma, &mb),
            "compare");
      std::printf("mean dci: %s %.6f, %s %.6f\n", name_a.c_str(), ma, name_b.c_str(), mb);
      return kExitOk;
    }
    if (*ablate) {
      const Config cfg = ac.build();
      const std::string in = require_key(cfg, "io.input", "--in");
      const std::string out = require_key(cfg, "io.output", "--out");
      int code = kExitOk;
      for (int variant = 0; variant < 2; ++variant) {
        const std::string dir = out + (variant == 0 ? "/sk" : "/nosk");
        skseg_batch_summary s{};
        check(skseg_segment_series(cfg.get(), in.c_str(), dir.c_str(), variant, &s), "ablate");
        const int c = batch_exit(s, variant == 0 ? "segmented (sk)" : "segmented (no-sk)");
        if (c == kExitFailure) return kExitFailure;
        if (c == kExitPartial) code = kExitPartial;
        if (!truth_dir.empty()) {
          const std::string eval = out + (variant == 0 ? "/eval_sk" : "/eval_nosk");
          check(skseg_evaluate(cfg.get(), dir.c_str(), truth_dir.c_str(), eval.c_str(), "c_f", 0.8,
                               ablate_scale, &s),
                "ablate");
          if (batch_exit(s, "evaluated") != kExitOk) code = kExitPartial;
        }
      }
      const std::string a = out + (truth_dir.empty() ? "/sk" : "/eval_sk");
      const std::string b = out + (truth_dir.empty() ? "/nosk" : "/eval_nosk");
      double ma = 0.0, mb = 0.0;
      check(skseg_compare(cfg.get(), a.c_str(), b.c_str(), "sk", "nosk", (out + "/ablation").c_str(), &ma, &mb),
            "ablate");
      const bool met = ma >= mb - 0.02;
      std::printf("mean dci: sk %.6f, nosk %.6f, difference %.6f\n", ma, mb, ma - mb);
      std::printf("soft expectation (sk >= nosk - 0.02): %s\n", met ? "met" : "MISSED (flagged)");
      return code;
    }
    if (*phantom) {
      const Config cfg = pc.build();
      const std::string out = require_key(cfg, "io.output", "--out");
      const unsigned long long seed = std::stoull(get(cfg, "phantom.seed"));
      const int count = std::stoi(get(cfg, "phantom.count"));
      const int patients = std::stoi(get(cfg, "phantom.patients"));
      const double sigma = std::stod(get(cfg, "phantom.noise_sigma"));
      check(skseg_phantom(cfg.get(), out.c_str(), seed, count, patients, sigma), "phantom");
      std::cout << "wrote " << count << " phantom slice(s) to " << out << "\n";
      return kExitOk;
    }
    if (*check_kernel) {
      return run_check_kernel(kc.build(), beta, start, stop, step, truncation);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
