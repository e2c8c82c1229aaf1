#pragma once

#include <functional>
#include <string>

namespace skseg {

enum class KernelFamily { kJackson, kValleePoussin, kWendland };

const char* family_name(KernelFamily family) noexcept;
// Accepts "jackson", "vallee_poussin" (or "vp"), "wendland".
KernelFamily parse_family(const std::string& name);

// Immutable kernel description. Construct through the factories so the
// Jackson normalization constant is computed exactly once.
struct KernelSpec {
  KernelFamily family = KernelFamily::kJackson;
  int k = 12;          // Jackson order; the exponent is 2k
  double alpha = 1.0;  // Jackson stretch, >= 1
  int m = 2;           // Wendland power
  int smoothness = 1;  // Wendland recursion depth
  double c = 0.0;      // Jackson normalization c_k

  static KernelSpec jackson(int k, double alpha = 1.0);
  static KernelSpec vallee_poussin();
  static KernelSpec wendland(int m, int smoothness);

  // Product families factor into identical 1-D kernels per coordinate.
  bool separable() const noexcept { return family != KernelFamily::kWendland; }
};

// I_n = integral over the real line of (sin v / v)^n, by lobe-wise adaptive
// Gauss-Kronrod quadrature plus an averaged tail term.
double sinc_power_integral(int n);

// c_k such that the Jackson kernel has unit integral.
double jackson_constant(int k, double alpha);

double jackson_1d(double x, const KernelSpec& spec) noexcept;
double vallee_poussin_1d(double x) noexcept;
// phi_{m,smoothness}(r); throws kInvalidArgument for r < 0 or negative parameters.
double wendland(double r, int m, int smoothness);

// 1-D factor of a separable family (Jackson or de la Vallee Poussin).
double kernel_1d(double x, const KernelSpec& spec) noexcept;
double kernel_2d(double x, double y, const KernelSpec& spec);

// Half-width of the lattice window used by the SK operator when no explicit
// truncation is configured.
int default_truncation(const KernelSpec& spec);

struct KernelProbe {
  double start = 0.0;
  double stop = 10.0;
  double step = 0.01;
  int truncation = 200;  // lattice indices with |k - round(u)| <= truncation
};

struct KernelAxiomReport {
  double k2_max_deviation = 0.0;
  double m0 = 0.0;
  double m_beta = 0.0;
  double beta = 1.0;
  double l1_norm = 0.0;
  bool bounded_near_zero = false;
};

// Probes the bivariate kernel on the lattice Z^2. Probe coordinates are
// reduced to the first period, so every quantity is a sup (or mean) over
// [0, 1)^2 sampled at the probe step.
KernelAxiomReport verify_kernel(const KernelSpec& spec, double beta = 1.0,
                                const KernelProbe& probe = {});

// Same report for an arbitrary bivariate function, by direct double summation.
KernelAxiomReport verify_kernel(const std::function<double(double, double)>& chi, double beta,
                                const KernelProbe& probe);

}  // namespace skseg
