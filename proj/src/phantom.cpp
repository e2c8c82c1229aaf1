#include "skseg/phantom.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "skseg/error.hpp"
#include "skseg/image_io.hpp"
#include "skseg/random.hpp"
#include "skseg/stats.hpp"

namespace skseg {
namespace {

constexpr double kEta = 127.0;
constexpr double kPlaqueThreshold = 200.0;

[[noreturn]] void bad(const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "phantom: " + what);
}

std::vector<double> noisy(const std::vector<double>& base, double sigma, Rng& rng) {
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double v = sigma > 0.0 ? base[i] + sigma * rng.normal() : base[i];
    out[i] = quantize(v);
  }
  return out;
}

}  // namespace

void PhantomParams::validate() const {
  if (size < 16) bad("size must be >= 16");
  if (!(vessel_radius_min > 0.0) || !(vessel_radius_max >= vessel_radius_min)) {
    bad("vessel radius range must satisfy 0 < min <= max");
  }
  if (!(aspect_min > 0.0) || aspect_min > 1.0) bad("aspect_min must lie in (0, 1]");
  if (!(wall_thickness >= 0.0) || wall_thickness >= vessel_radius_min * aspect_min) {
    bad("wall thickness must be smaller than the minor vessel semi-axis");
  }
  if (!(lumen_fraction > 0.0) || lumen_fraction > 1.0) {
    bad("lumen fraction must lie in (0, 1]; the lumen must fit inside the vessel");
  }
  if (!(max_offset >= 0.0) || max_offset >= 1.0) bad("max_offset must lie in [0, 1)");
  if (!(centre_jitter >= 0.0) ||
      size / 2.0 - centre_jitter - vessel_radius_max - roi_margin < 0.0) {
    bad("vessel ellipse does not fit inside the frame");
  }
  if (n_calcium < 0) bad("n_calcium must be >= 0");
  if (!(calcium_radius > 0.0)) bad("calcium radius must be positive");
  if (!(noise_sigma >= 0.0)) bad("noise sigma must be >= 0");
  const auto& I = intensity;
  for (double v : {I.background, I.wall, I.thrombus, I.lumen_basal, I.lumen_cm, I.calcium}) {
    if (!(v >= 0.0 && v <= 255.0)) bad("intensities must lie in [0, 255]");
  }
  if (!(I.lumen_cm > kEta)) bad("lumen_cm must exceed the target threshold 127");
  for (double v : {I.background, I.wall, I.thrombus, I.lumen_basal}) {
    if (!(v < kEta)) bad("background, wall, thrombus and basal lumen must stay below 127");
  }
  if (!(I.calcium > kPlaqueThreshold)) bad("calcium must exceed the plaque threshold 200");
}

Phantom generate(const PhantomParams& p) {
  p.validate();
  Rng rng(p.seed);
  const int N = p.size;
  const double pi = std::numbers::pi;

  const double cx = N / 2.0 + rng.uniform(-p.centre_jitter, p.centre_jitter);
  const double cy = N / 2.0 + rng.uniform(-p.centre_jitter, p.centre_jitter);
  const double ra = rng.uniform(p.vessel_radius_min, p.vessel_radius_max);
  const double rb = ra * rng.uniform(p.aspect_min, 1.0);
  const double angle = rng.uniform(0.0, pi);
  const double ecc = rng.uniform(0.0, p.max_offset);
  const double phi = rng.uniform(0.0, 2.0 * pi);

  const double ia = ra - p.wall_thickness, ib = rb - p.wall_thickness;
  const double s = std::sqrt(p.lumen_fraction);
  const double off = p.thrombus ? (1.0 - s) * ib * ecc : 0.0;
  const Ellipse vessel_e{cx, cy, ra, rb, angle};
  const Ellipse inner_e{cx, cy, ia, ib, angle};
  const Ellipse lumen_e{cx + off * std::cos(phi), cy + off * std::sin(phi), ia * s, ib * s, angle};

  const BinaryMask vessel = ellipse_mask(N, N, vessel_e);
  const BinaryMask inner = ellipse_mask(N, N, inner_e);
  const BinaryMask lumen = mask_and(ellipse_mask(N, N, lumen_e), inner);

  // Calcium specks: whole footprint inside the vessel, one pixel clear of
  // the lumen and of every other speck.
  const BinaryMask lumen_guard = dilate(lumen, 1);
  std::vector<std::uint8_t> plaque(static_cast<std::size_t>(N) * N, 0);
  const int reach = static_cast<int>(std::ceil(p.calcium_radius));
  int placed = 0;
  for (int attempt = 0; placed < p.n_calcium; ++attempt) {
    if (attempt >= 20000) bad("cannot place " + std::to_string(p.n_calcium) + " calcium specks");
    const int sx = std::min(N - 1, static_cast<int>(rng.uniform() * N));
    const int sy = std::min(N - 1, static_cast<int>(rng.uniform() * N));
    std::vector<std::size_t> foot;
    bool ok = true;
    for (int dy = -reach; dy <= reach && ok; ++dy) {
      for (int dx = -reach; dx <= reach && ok; ++dx) {
        if (dx * dx + dy * dy > p.calcium_radius * p.calcium_radius) continue;
        const int x = sx + dx, y = sy + dy;
        if (x < 0 || y < 0 || x >= N || y >= N) {
          ok = false;
          break;
        }
        const std::size_t i = static_cast<std::size_t>(y) * N + x;
        if (!vessel[i] || lumen_guard[i]) ok = false;
        foot.push_back(i);
      }
    }
    if (!ok) continue;
    const BinaryMask guard = dilate(BinaryMask(N, N, plaque), 1);
    for (std::size_t i : foot) {
      if (guard[i]) ok = false;
    }
    if (!ok) continue;
    for (std::size_t i : foot) plaque[i] = 1;
    ++placed;
  }
  const BinaryMask truth_plaque(N, N, plaque);

  const auto& I = p.intensity;
  std::vector<double> basal(static_cast<std::size_t>(N) * N, I.background);
  for (std::size_t i = 0; i < basal.size(); ++i) {
    if (vessel[i]) basal[i] = I.wall;
    if (inner[i]) basal[i] = p.thrombus ? I.thrombus : I.wall;
  }
  std::vector<double> cm = basal;
  for (std::size_t i = 0; i < basal.size(); ++i) {
    if (lumen[i]) {
      basal[i] = I.lumen_basal;
      cm[i] = I.lumen_cm;
    }
    if (plaque[i]) basal[i] = cm[i] = I.calcium;
  }

  std::vector<double> basal_n = noisy(basal, p.noise_sigma, rng);
  std::vector<double> cm_n = noisy(cm, p.noise_sigma, rng);
  const Ellipse roi{cx, cy, ra + p.roi_margin, rb + p.roi_margin, angle};
  return Phantom{GrayImage(N, N, std::move(basal_n)), GrayImage(N, N, std::move(cm_n)), roi,
                 mask_and_not(lumen, truth_plaque), truth_plaque};
}

std::vector<SuiteMember> suite_schedule(std::uint64_t base_seed, int count, double noise_sigma) {
  if (count < 0) fail(ErrorCode::kInvalidArgument, "phantom suite: count must be >= 0");
  std::vector<SuiteMember> out;
  for (int i = 0; i < count; ++i) {
    SuiteMember m;
    char id[32];
    std::snprintf(id, sizeof id, "s%03d", i);
    m.id = id;
    m.params.seed = base_seed + static_cast<std::uint64_t>(i);
    m.params.lumen_fraction = count > 1 ? 0.2 + 0.7 * i / (count - 1) : 0.55;
    m.params.thrombus = i % 2 == 0;
    m.params.n_calcium = (i / 2) % 2 == 1 ? 1 + i % 3 : 0;
    m.params.noise_sigma = noise_sigma;
    out.push_back(m);
  }
  return out;
}

std::vector<Phantom> generate_suite(std::uint64_t base_seed, int count, double noise_sigma) {
  std::vector<Phantom> out;
  for (const auto& m : suite_schedule(base_seed, count, noise_sigma)) out.push_back(generate(m.params));
  return out;
}

void write_suite(const std::filesystem::path& out, std::uint64_t base_seed, int count,
                 int patients, double noise_sigma) {
  namespace fs = std::filesystem;
  if (patients < 1) fail(ErrorCode::kInvalidArgument, "phantom: patients must be >= 1");
  const auto members = suite_schedule(base_seed, count, noise_sigma);
  const int per = count == 0 ? 0 : (count + patients - 1) / patients;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorCode::kIo, out.string() + ": cannot create directory: " + ec.message());
  for (int g = 0; g < patients; ++g) {
    char pname[16];
    std::snprintf(pname, sizeof pname, "P%02d", g + 1);
    const fs::path pdir = out / pname;
    const fs::path truth_l = out / "truth" / "lumen" / pname;
    const fs::path truth_p = out / "truth" / "plaque" / pname;
    for (const auto& d : {pdir / "basal", pdir / "cm", truth_l, truth_p}) {
      fs::create_directories(d, ec);
      if (ec) fail(ErrorCode::kIo, d.string() + ": cannot create directory: " + ec.message());
    }
    std::string rois = "id,cx,cy,a,b,angle\n";
    for (int i = g * per; i < std::min(count, (g + 1) * per); ++i) {
      const auto& m = members[static_cast<std::size_t>(i)];
      const Phantom ph = generate(m.params);
      save_image(ph.basal, pdir / "basal" / (m.id + ".png"));
      save_image(ph.cm, pdir / "cm" / (m.id + ".png"));
      save_image(ph.truth_lumen, truth_l / (m.id + ".png"));
      save_image(ph.truth_plaque, truth_p / (m.id + ".png"));
      const auto& e = ph.ellipse;
      rois += m.id + "," + format_number(e.cx, 17) + "," + format_number(e.cy, 17) + "," +
              format_number(e.a, 17) + "," + format_number(e.b, 17) + "," +
              format_number(e.angle, 17) + "\n";
    }
    write_text_file(pdir / "rois.csv", rois);
  }
}

int connected_components(const BinaryMask& mask) {
  const int W = mask.width(), H = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::pair<int, int>> stack;
  int n = 0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * W + x;
      if (!mask[i] || seen[i]) continue;
      ++n;
      seen[i] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = px + dx, qy = py + dy;
            if (qx < 0 || qy < 0 || qx >= W || qy >= H) continue;
            const std::size_t j = static_cast<std::size_t>(qy) * W + qx;
            if (mask[j] && !seen[j]) {
              seen[j] = 1;
              stack.push_back({qx, qy});
            }
          }
        }
      }
    }
  }
  return n;
}

}  // namespace skseg
