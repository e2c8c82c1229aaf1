#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skseg/imgproc.hpp"
#include "skseg/model.hpp"

namespace skseg {

struct PhantomIntensities {
  double background = 55.0;
  double wall = 90.0;
  double thrombus = 95.0;
  double lumen_basal = 118.0;
  double lumen_cm = 220.0;
  double calcium = 240.0;
};

struct PhantomParams {
  std::uint64_t seed = 1;
  int size = 96;
  double vessel_radius_min = 22.0;  // major semi-axis drawn in [min, max]
  double vessel_radius_max = 30.0;
  double aspect_min = 0.8;          // minor / major drawn in [aspect_min, 1]
  double centre_jitter = 4.0;       // centre drawn in size/2 +- jitter
  double wall_thickness = 3.0;
  double lumen_fraction = 0.5;      // lumen area / inner vessel area
  bool thrombus = true;             // eccentric lumen in thrombus; concentric otherwise
  double max_offset = 0.9;          // eccentricity as a share of the free radius
  int n_calcium = 0;
  double calcium_radius = 1.5;
  double roi_margin = 1.0;          // ellipse semi-axes = vessel semi-axes + margin
  double noise_sigma = 0.0;
  PhantomIntensities intensity;

  void validate() const;
};

struct Phantom {
  GrayImage basal;
  GrayImage cm;
  Ellipse ellipse;
  BinaryMask truth_lumen;
  BinaryMask truth_plaque;
};

// Draw order from Rng(seed): centre x, centre y, major semi-axis, aspect,
// angle, eccentricity, eccentric direction; then calcium candidates (x, y
// pairs, rejection sampled); then one normal per pixel of the basal image,
// then of the CM image, both row-major. Noisy values are rounded half-up and
// clamped to [0, 255].
Phantom generate(const PhantomParams& params);

struct SuiteMember {
  std::string id;
  PhantomParams params;
};

// Member i: seed = base_seed + i, lumen fraction 0.2 + 0.7 i / (count - 1),
// thrombus on for even i, calcium on when (i / 2) is odd with 1 + i mod 3 specks.
std::vector<SuiteMember> suite_schedule(std::uint64_t base_seed, int count, double noise_sigma = 3.0);
std::vector<Phantom> generate_suite(std::uint64_t base_seed, int count, double noise_sigma = 3.0);

// Writes the series layout: <out>/<patient>/{basal,cm}/<id>.png,
// <out>/<patient>/rois.csv and <out>/truth/{lumen,plaque}/<patient>/<id>.png.
// Members are split into `patients` consecutive groups named P01, P02, ...
void write_suite(const std::filesystem::path& out, std::uint64_t base_seed, int count,
                 int patients, double noise_sigma);

// Counts 8-connected components.
int connected_components(const BinaryMask& mask);

}  // namespace skseg
