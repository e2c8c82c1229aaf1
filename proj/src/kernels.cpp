#include "skseg/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "skseg/error.hpp"

namespace skseg {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// sin(pi t) / (pi t) with exact zeros at nonzero integers.
double sinc(double t) noexcept {
  if (t == 0.0) return 1.0;
  return boost::math::sin_pi(t) / (kPi * t);
}

// Integer power by squaring, so jackson_1d does not depend on libm pow.
double ipow(double base, int e) noexcept {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

// Coefficients of phi_{m,n} as a polynomial in s = 1 - r.
std::vector<double> wendland_poly(int m, int smoothness) {
  std::vector<double> p(static_cast<std::size_t>(m) + 1, 0.0);
  p[m] = 1.0;
  for (int step = 0; step < smoothness; ++step) {
    // phi_{k+1}(s) = int_0^s (1 - u) p(u) du
    std::vector<double> q(p.size() + 2, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j + 1] += p[j] / static_cast<double>(j + 1);
      q[j + 2] -= p[j] / static_cast<double>(j + 2);
    }
    p = std::move(q);
  }
  return p;
}

void check_finite(double v, double x, double y) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::kNumeric,
         "verify_kernel: non-finite kernel value at (" + fmt_num(x) + ", " + fmt_num(y) + ")");
  }
}

void check_probe(const KernelProbe& probe, double beta) {
  if (!(probe.step > 0.0) || !std::isfinite(probe.step)) {
    fail(ErrorCode::kInvalidArgument, "verify_kernel: probe step must be positive");
  }
  if (!(probe.stop >= probe.start) || !std::isfinite(probe.start) || !std::isfinite(probe.stop)) {
    fail(ErrorCode::kInvalidArgument, "verify_kernel: probe range must satisfy start <= stop");
  }
  if (probe.truncation < 0) {
    fail(ErrorCode::kInvalidArgument, "verify_kernel: truncation must be non-negative");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::kInvalidArgument, "verify_kernel: beta must be positive");
  }
}

// Probe coordinates reduced modulo 1, deduplicated, ascending.
std::vector<double> period_points(const KernelProbe& probe) {
  const auto count = static_cast<long long>(std::floor((probe.stop - probe.start) / probe.step + 1e-9));
  if (count > 10'000'000) fail(ErrorCode::kInvalidArgument, "verify_kernel: probe grid too dense");
  std::set<long long> seen;
  std::vector<double> out;
  for (long long i = 0; i <= count; ++i) {
    const double u = probe.start + static_cast<double>(i) * probe.step;
    double f = u - std::floor(u);
    if (f >= 1.0) f = 0.0;
    const auto key = std::llround(f * 1e12);
    if (seen.insert(key).second) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool bounded_near_zero(const std::function<double(double, double)>& chi) {
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      const double v = chi(0.05 * i, 0.05 * j);
      if (!std::isfinite(v) || std::fabs(v) > 1e300) return false;
    }
  }
  return true;
}

// Per-coordinate window sums of a separable family at one probe coordinate.
struct AxisSums {
  double f;
  double signed_sum;
  double abs_sum;
  std::vector<double> weight;  // |chi_1(f - k)| over the window
  std::vector<double> dist;    // |f - k| over the window
};

AxisSums axis_sums(double f, const KernelSpec& spec, int truncation) {
  AxisSums a{f, 0.0, 0.0, {}, {}};
  const long long centre = std::llround(f);
  a.weight.reserve(2 * static_cast<std::size_t>(truncation) + 1);
  a.dist.reserve(a.weight.capacity());
  for (long long k = centre - truncation; k <= centre + truncation; ++k) {
    const double d = f - static_cast<double>(k);
    const double v = kernel_1d(d, spec);
    check_finite(v, d, 0.0);
    a.signed_sum += v;
    a.abs_sum += std::fabs(v);
    a.weight.push_back(std::fabs(v));
    a.dist.push_back(std::fabs(d));
  }
  return a;
}

double pair_moment(const AxisSums& a, const AxisSums& b, double beta) {
  if (beta == 2.0) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.weight.size(); ++i) ma += a.weight[i] * a.dist[i] * a.dist[i];
    for (std::size_t j = 0; j < b.weight.size(); ++j) mb += b.weight[j] * b.dist[j] * b.dist[j];
    return ma * b.abs_sum + a.abs_sum * mb;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.weight.size(); ++i) {
    const double wa = a.weight[i];
    if (wa == 0.0) continue;
    const double da2 = a.dist[i] * a.dist[i];
    double row = 0.0;
    if (beta == 1.0) {
      for (std::size_t j = 0; j < b.weight.size(); ++j) {
        row += b.weight[j] * std::sqrt(da2 + b.dist[j] * b.dist[j]);
      }
    } else {
      for (std::size_t j = 0; j < b.weight.size(); ++j) {
        row += b.weight[j] * std::pow(da2 + b.dist[j] * b.dist[j], 0.5 * beta);
      }
    }
    total += wa * row;
  }
  return total;
}

}  // namespace

const char* family_name(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::kJackson: return "jackson";
    case KernelFamily::kValleePoussin: return "vallee_poussin";
    case KernelFamily::kWendland: return "wendland";
  }
  return "unknown";
}

KernelFamily parse_family(const std::string& name) {
  if (name == "jackson") return KernelFamily::kJackson;
  if (name == "vallee_poussin" || name == "vp") return KernelFamily::kValleePoussin;
  if (name == "wendland") return KernelFamily::kWendland;
  fail(ErrorCode::kConfig, "unknown kernel family '" + name +
                               "' (expected jackson, vallee_poussin or wendland)");
}

double sinc_power_integral(int n) {
  if (n < 2 || n % 2 != 0) {
    fail(ErrorCode::kInvalidArgument, "sinc_power_integral: n must be even and >= 2");
  }
  const auto g = [n](double v) {
    if (v == 0.0) return 1.0;
    return ipow(std::sin(v) / v, n);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  // Lobe by lobe over [j pi, (j + 1) pi]; each lobe is smooth and one-signed.
  constexpr int kMaxLobes = 4096;
  double half = 0.0;
  int lobes = 0;
  for (; lobes < kMaxLobes; ++lobes) {
    const double a = lobes * kPi;
    half += GK::integrate(g, a, a + kPi, 4, 1e-15);
    // The tail term below leaves an O(L^{-n-1}) remainder.
    if (lobes >= 8 && std::pow((lobes + 1) * kPi, -1.0 - n) < 1e-17 * half) {
      ++lobes;
      break;
    }
  }
  // Tail beyond L: sin^n averages to C(n, n/2) / 2^n against v^-n.
  const double L = lobes * kPi;
  const double mean_sin = boost::math::binomial_coefficient<double>(n, n / 2) / std::ldexp(1.0, n);
  half += mean_sin * std::pow(L, 1.0 - n) / (n - 1);
  return 2.0 * half;
}

double jackson_constant(int k, double alpha) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "Jackson order k must be >= 1");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    fail(ErrorCode::kInvalidArgument, "Jackson alpha must be finite and >= 1");
  }
  // int sinc^{2k}(x / (2 k pi alpha)) dx = 2 k alpha * I_{2k}
  const double c = 1.0 / (2.0 * k * alpha * sinc_power_integral(2 * k));
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::kNumeric, "Jackson constant is not positive");
  return c;
}

KernelSpec KernelSpec::jackson(int k, double alpha) {
  KernelSpec s;
  s.family = KernelFamily::kJackson;
  s.k = k;
  s.alpha = alpha;
  s.c = jackson_constant(k, alpha);
  return s;
}

KernelSpec KernelSpec::vallee_poussin() {
  KernelSpec s;
  s.family = KernelFamily::kValleePoussin;
  s.c = 2.0 / kPi;
  return s;
}

KernelSpec KernelSpec::wendland(int m, int smoothness) {
  if (m < 0 || smoothness < 0) {
    fail(ErrorCode::kInvalidArgument, "Wendland parameters m and smoothness must be >= 0");
  }
  KernelSpec s;
  s.family = KernelFamily::kWendland;
  s.m = m;
  s.smoothness = smoothness;
  s.c = 1.0;
  return s;
}

double jackson_1d(double x, const KernelSpec& spec) noexcept {
  const double t = std::fabs(x) / (2.0 * spec.k * kPi * spec.alpha);
  return spec.c * ipow(sinc(t), 2 * spec.k);
}

double vallee_poussin_1d(double x) noexcept {
  const double a = std::fabs(x);
  if (a < 1e-4) {
    // sin(x/2) sin(3x/2) / x^2 = 3/4 - 5/16 x^2 + 7/160 x^4 - ...
    const double a2 = a * a;
    return (2.0 / kPi) * (0.75 - (15.0 / 48.0) * a2 + (63.0 / 1440.0) * a2 * a2);
  }
  const double t = a / (2.0 * kPi);
  return (2.0 / kPi) * boost::math::sin_pi(t) * boost::math::sin_pi(3.0 * t) / (a * a);
}

double wendland(double r, int m, int smoothness) {
  if (!(r >= 0.0)) fail(ErrorCode::kInvalidArgument, "wendland: r must be >= 0");
  if (m < 0 || smoothness < 0) {
    fail(ErrorCode::kInvalidArgument, "wendland: m and smoothness must be >= 0");
  }
  if (r > 1.0) return 0.0;
  const std::vector<double> p = wendland_poly(m, smoothness);
  const double s = 1.0 - r;
  double v = 0.0;
  for (std::size_t j = p.size(); j-- > 0;) v = v * s + p[j];
  return std::max(v, 0.0);
}

double kernel_1d(double x, const KernelSpec& spec) noexcept {
  switch (spec.family) {
    case KernelFamily::kJackson: return jackson_1d(x, spec);
    case KernelFamily::kValleePoussin: return vallee_poussin_1d(x);
    case KernelFamily::kWendland: return wendland(std::fabs(x), spec.m, spec.smoothness);
  }
  return 0.0;
}

double kernel_2d(double x, double y, const KernelSpec& spec) {
  if (spec.family == KernelFamily::kWendland) {
    return wendland(std::hypot(x, y), spec.m, spec.smoothness);
  }
  return kernel_1d(x, spec) * kernel_1d(y, spec);
}

int default_truncation(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::kJackson:
      return 3 * static_cast<int>(std::ceil(2.0 * spec.k * kPi * spec.alpha));
    case KernelFamily::kValleePoussin:
      // |theta| decays like x^-2, so the tail mass beyond T is about 4 / (pi T).
      return 12800;
    case KernelFamily::kWendland:
      return 2;
  }
  return 1;
}

KernelAxiomReport verify_kernel(const KernelSpec& spec, double beta, const KernelProbe& probe) {
  if (!spec.separable()) {
    return verify_kernel([&spec](double x, double y) { return kernel_2d(x, y, spec); }, beta,
                         probe);
  }
  check_probe(probe, beta);
  const std::vector<double> pts = period_points(probe);

  std::vector<AxisSums> axis;
  axis.reserve(pts.size());
  for (double f : pts) axis.push_back(axis_sums(f, spec, probe.truncation));

  KernelAxiomReport rep;
  rep.beta = beta;
  double abs_mean = 0.0;
  double abs_max = 0.0;
  for (const auto& a : axis) {
    abs_mean += a.abs_sum;
    abs_max = std::max(abs_max, a.abs_sum);
    for (const auto& b : axis) {
      rep.k2_max_deviation = std::max(rep.k2_max_deviation, std::fabs(a.signed_sum * b.signed_sum - 1.0));
    }
  }
  abs_mean /= static_cast<double>(axis.size());
  rep.m0 = abs_max * abs_max;
  rep.l1_norm = abs_mean * abs_mean;

  // Both factors are even, so the moment sup only needs f in [0, 1/2] and
  // unordered coordinate pairs.
  std::vector<const AxisSums*> folded;
  for (const auto& a : axis) {
    if (a.f <= 0.5) folded.push_back(&a);
  }
  for (const auto& a : axis) {
    if (a.f > 0.5) {
      const double mirror = 1.0 - a.f;
      const bool present = std::any_of(folded.begin(), folded.end(), [&](const AxisSums* p) {
        return std::fabs(p->f - mirror) < 1e-12;
      });
      if (!present) folded.push_back(&a);
    }
  }
  for (std::size_t i = 0; i < folded.size(); ++i) {
    for (std::size_t j = i; j < folded.size(); ++j) {
      rep.m_beta = std::max(rep.m_beta, pair_moment(*folded[i], *folded[j], beta));
    }
  }
  rep.bounded_near_zero =
      bounded_near_zero([&spec](double x, double y) { return kernel_2d(x, y, spec); });
  return rep;
}

KernelAxiomReport verify_kernel(const std::function<double(double, double)>& chi, double beta,
                                const KernelProbe& probe) {
  check_probe(probe, beta);
  const std::vector<double> pts = period_points(probe);
  const int T = probe.truncation;

  KernelAxiomReport rep;
  rep.beta = beta;
  double abs_mean = 0.0;
  for (double fx : pts) {
    const long long cx = std::llround(fx);
    for (double fy : pts) {
      const long long cy = std::llround(fy);
      double sum = 0.0, abs_sum = 0.0, moment = 0.0;
      for (long long kx = cx - T; kx <= cx + T; ++kx) {
        const double dx = fx - static_cast<double>(kx);
        for (long long ky = cy - T; ky <= cy + T; ++ky) {
          const double dy = fy - static_cast<double>(ky);
          const double v = chi(dx, dy);
          check_finite(v, dx, dy);
          sum += v;
          abs_sum += std::fabs(v);
          moment += std::fabs(v) * std::pow(dx * dx + dy * dy, 0.5 * beta);
        }
      }
      rep.k2_max_deviation = std::max(rep.k2_max_deviation, std::fabs(sum - 1.0));
      rep.m0 = std::max(rep.m0, abs_sum);
      rep.m_beta = std::max(rep.m_beta, moment);
      abs_mean += abs_sum;
    }
  }
  rep.l1_norm = abs_mean / static_cast<double>(pts.size() * pts.size());
  rep.bounded_near_zero = bounded_near_zero(chi);
  return rep;
}

}  // namespace skseg
