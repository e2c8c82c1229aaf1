#pragma once

#include <cstdint>
#include <random>

namespace skseg {

// Reference generator for phantoms. The engine is mt19937_64, whose output
// sequence is fixed by the C++ standard; the transforms below are spelled
// out so other implementations can reproduce every draw:
//   uniform()  = (next() >> 11) * 2^-53                    in [0, 1)
//   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)        one normal per two uniforms
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace skseg
