#include "skseg/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "skseg/error.hpp"

namespace skseg {
namespace {

const std::vector<ConfigKey> kKeys = {
    {"kernel.family", "jackson|vallee_poussin|wendland", "jackson", "SK kernel family"},
    {"kernel.k", "int>=1", "12", "Jackson order k (exponent 2k)"},
    {"kernel.alpha", "real", "1", "Jackson stretch alpha (>= 1)"},
    {"kernel.m", "int>=0", "2", "Wendland power m"},
    {"kernel.smoothness", "int>=0", "1", "Wendland recursion depth"},
    {"kernel.truncation_radius", "int>=0", "0", "lattice window half-width T; 0 = family default"},
    {"sk.w", "real>0", "20", "sampling rate w"},
    {"sk.scale", "int>=1", "2", "rescaling factor R"},
    {"sk.border", "zero|replicate", "zero", "step-function extension outside the image"},
    {"sk.clamp", "bool", "true", "clamp reconstructed intensities to [0, 255]"},
    {"pipeline.wavelet_levels", "int>=1", "1", "wavelet decomposition levels"},
    {"pipeline.wavelet_basis", "haar|atrous", "atrous", "wavelet basis of the residual stage"},
    {"pipeline.eta", "real", "127", "target binarization threshold eta"},
    {"pipeline.plaque_threshold", "real", "200", "basal intensity above which pixels are plaque"},
    {"pipeline.plaque_grow", "int>=0", "1", "dilation radius of the plaque mask"},
    {"pipeline.adapt_window", "int>=3", "121", "adaptive threshold window (odd)"},
    {"pipeline.adapt_offset", "real", "80", "adaptive threshold offset over the local mean"},
    {"pipeline.adapt_support", "vessel|frame", "vessel", "local mean over vessel pixels or the whole frame"},
    {"pipeline.dilation_radius", "int>=0", "3", "dilation radius after thresholding (square element)"},
    {"pipeline.binarize_strict", "bool", "true", "foreground iff intensity > eta (else >=)"},
    {"pipeline.keep_intermediates", "bool", "true", "write every stage image"},
    {"metrics.c1", "real", "6.5025", "SSIM constant C1"},
    {"metrics.c2", "real", "58.5225", "SSIM constant C2"},
    {"metrics.ssim_mode", "global|windowed", "global", "whole-image or 7x7 windowed SSIM"},
    {"stats.std", "population|sample", "population", "standard deviation divisor"},
    {"stats.boxplot_index", "dci|ti|em|bpn", "dci", "index exported to boxplot.csv"},
    {"io.input", "path", "", "input directory or file"},
    {"io.output", "path", "", "output directory or file"},
    {"io.parallelism", "int>=0", "0", "worker threads; 0 = available cores"},
    {"phantom.seed", "int>=0", "20240901", "base seed of the phantom suite"},
    {"phantom.count", "int>=0", "20", "phantoms in the suite"},
    {"phantom.patients", "int>=1", "1", "patient groups the suite is split into"},
    {"phantom.noise_sigma", "real", "3", "additive Gaussian noise sigma"},
};

const ConfigKey* find_key(const std::string& name) {
  for (const auto& k : kKeys) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

[[noreturn]] void bad_value(const ConfigKey& k, const std::string& value, const std::string& why) {
  fail(ErrorCode::kConfig, std::string("config key '") + k.name + "': invalid value '" + value +
                               "' (" + why + ")");
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return *end == '\0';
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return *end == '\0' && std::isfinite(out);
}

void check_value(const ConfigKey& k, const std::string& v) {
  const std::string type = k.type;
  if (type.rfind("int", 0) == 0) {
    long long n = 0;
    if (!parse_int(v, n)) bad_value(k, v, "expected an integer");
    if (type == "int>=0" && n < 0) bad_value(k, v, "must be >= 0");
    if (type == "int>=1" && n < 1) bad_value(k, v, "must be >= 1");
    if (type == "int>=3" && n < 3) bad_value(k, v, "must be >= 3");
  } else if (type.rfind("real", 0) == 0) {
    double x = 0.0;
    if (!parse_real(v, x)) bad_value(k, v, "expected a finite real number");
    if (type == "real>0" && !(x > 0.0)) bad_value(k, v, "must be > 0");
  } else if (type == "bool") {
    if (v != "true" && v != "false" && v != "1" && v != "0") bad_value(k, v, "expected true or false");
  } else if (type != "path") {
    std::istringstream choices(type);
    std::string c;
    while (std::getline(choices, c, '|')) {
      if (c == v) return;
    }
    bad_value(k, v, "expected one of " + type);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() { return kKeys; }

RunConfig::RunConfig() {
  for (const auto& k : kKeys) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const ConfigKey* k = find_key(key);
  if (!k) fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
  const std::string v = trim(value);
  check_value(*k, v);
  values_[key] = v;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
  return it->second;
}

void RunConfig::parse_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string raw, section;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(n) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kConfig, where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kConfig, where + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    try {
      set(key, value);
    } catch (const Error& e) {
      fail(ErrorCode::kConfig, where + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream probe(path);
  if (!probe) {
    fail(ErrorCode::kIo, path.string() + ": " +
                             (std::filesystem::exists(path) ? "cannot open for reading" : "file not found"));
  }
  std::ostringstream ss;
  ss << probe.rdbuf();
  parse_text(ss.str(), path.string());
}

int RunConfig::get_int(const std::string& key) const {
  long long n = 0;
  parse_int(get(key), n);
  return static_cast<int>(n);
}

double RunConfig::get_double(const std::string& key) const {
  double x = 0.0;
  parse_real(get(key), x);
  return x;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  return v == "true" || v == "1";
}

KernelSpec RunConfig::kernel() const {
  switch (parse_family(get("kernel.family"))) {
    case KernelFamily::kJackson: return KernelSpec::jackson(get_int("kernel.k"), get_double("kernel.alpha"));
    case KernelFamily::kValleePoussin: return KernelSpec::vallee_poussin();
    case KernelFamily::kWendland:
      return KernelSpec::wendland(get_int("kernel.m"), get_int("kernel.smoothness"));
  }
  fail(ErrorCode::kConfig, "unreachable kernel family");
}

SkParams RunConfig::sk() const {
  SkParams p;
  p.w = get_double("sk.w");
  p.scale = get_int("sk.scale");
  p.truncation = get_int("kernel.truncation_radius");
  p.kernel = kernel();
  p.border = parse_border(get("sk.border"));
  p.clamp = get_bool("sk.clamp");
  p.validate();
  return p;
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig c;
  c.wavelet_levels = get_int("pipeline.wavelet_levels");
  c.wavelet_basis = parse_basis(get("pipeline.wavelet_basis"));
  c.eta = get_double("pipeline.eta");
  c.plaque_threshold = get_double("pipeline.plaque_threshold");
  c.plaque_grow = get_int("pipeline.plaque_grow");
  c.adapt_window = get_int("pipeline.adapt_window");
  c.adapt_offset = get_double("pipeline.adapt_offset");
  c.adapt_vessel_support = get("pipeline.adapt_support") == "vessel";
  c.dilation_radius = get_int("pipeline.dilation_radius");
  c.binarize_strict = get_bool("pipeline.binarize_strict");
  c.keep_intermediates = get_bool("pipeline.keep_intermediates");
  c.ssim_c1 = get_double("metrics.c1");
  c.ssim_c2 = get_double("metrics.c2");
  c.ssim_mode = parse_ssim_mode(get("metrics.ssim_mode"));
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, e.what());
  }
  return c;
}

StdConvention RunConfig::std_convention() const { return parse_std_convention(get("stats.std")); }

Index RunConfig::boxplot_index() const {
  const std::string& v = get("stats.boxplot_index");
  for (Index i : kAllIndices) {
    if (v == index_name(i)) return i;
  }
  fail(ErrorCode::kConfig, "unknown boxplot index '" + v + "'");
}

int RunConfig::parallelism() const { return get_int("io.parallelism"); }

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace skseg
