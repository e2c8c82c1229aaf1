#include "skseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "skseg/error.hpp"

namespace skseg {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": malformed number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& s, const char* what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || s[0] == '-') {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": malformed count '" + s + "'");
  }
  return v;
}

}  // namespace

const char* std_convention_name(StdConvention c) noexcept {
  return c == StdConvention::kPopulation ? "population" : "sample";
}

StdConvention parse_std_convention(const std::string& name) {
  if (name == "population") return StdConvention::kPopulation;
  if (name == "sample") return StdConvention::kSample;
  fail(ErrorCode::kConfig, "unknown std convention '" + name + "' (expected population or sample)");
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) fail(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

StatsSummary summarize(const std::vector<double>& values, StdConvention conv) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "summarize: empty input");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "summarize: non-finite value");
  }
  std::vector<double> s = values;
  std::sort(s.begin(), s.end());
  StatsSummary r;
  r.n = s.size();
  double sum = 0.0;
  for (double v : s) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  double ss = 0.0;
  for (double v : s) ss += (v - r.mean) * (v - r.mean);
  const double denom = conv == StdConvention::kSample && r.n > 1 ? static_cast<double>(r.n - 1)
                                                                 : static_cast<double>(r.n);
  r.std = r.n > 1 ? std::sqrt(ss / denom) : 0.0;
  r.min = s.front();
  r.max = s.back();
  r.q25 = quantile_sorted(s, 0.25);
  r.q50 = quantile_sorted(s, 0.50);
  r.q75 = quantile_sorted(s, 0.75);
  return r;
}

const char* index_name(Index i) noexcept {
  switch (i) {
    case Index::kDci: return "dci";
    case Index::kTi: return "ti";
    case Index::kEm: return "em";
    case Index::kBpn: return "bpn";
  }
  return "?";
}

double index_value(const SimilarityReport& r, Index i) {
  switch (i) {
    case Index::kDci: return r.indices.dci;
    case Index::kTi: return r.indices.ti;
    case Index::kEm: return r.indices.em;
    case Index::kBpn: return r.indices.bpn;
  }
  return 0.0;
}

std::vector<double> index_values(const std::vector<SliceRecord>& records, Index i,
                                 std::size_t* dropped) {
  std::vector<double> out;
  std::size_t skip = 0;
  for (const auto& r : records) {
    const double v = index_value(r.report, i);
    if (std::isnan(v)) {
      ++skip;
      continue;
    }
    out.push_back(v);
  }
  if (dropped) *dropped = skip;
  return out;
}

namespace {

PatientRow make_row(const std::string& name, const std::vector<SliceRecord>& recs,
                    StdConvention conv) {
  PatientRow row;
  row.patient = name;
  row.n = recs.size();
  for (Index i : kAllIndices) {
    std::size_t dropped = 0;
    const auto v = index_values(recs, i, &dropped);
    const auto k = static_cast<std::size_t>(i);
    if (v.empty()) {
      row.mean[k] = row.std[k] = std::nan("");
    } else {
      const StatsSummary s = summarize(v, conv);
      row.mean[k] = s.mean;
      row.std[k] = s.std;
    }
    if (i == Index::kBpn) row.bpn_dropped = dropped;
  }
  return row;
}

}  // namespace

std::vector<PatientRow> per_patient_table(const std::vector<SliceRecord>& records,
                                          StdConvention conv) {
  if (records.empty()) fail(ErrorCode::kInvalidArgument, "per_patient_table: no records");
  std::map<std::string, std::vector<SliceRecord>> groups;
  for (const auto& r : records) groups[r.patient].push_back(r);
  std::vector<PatientRow> rows;
  for (auto& [name, recs] : groups) {
    std::sort(recs.begin(), recs.end(),
              [](const SliceRecord& a, const SliceRecord& b) { return a.slice < b.slice; });
    rows.push_back(make_row(name, recs, conv));
  }
  rows.push_back(make_row("total", records, conv));
  return rows;
}

MethodSummary summarize_method(const std::string& name, const std::vector<SliceRecord>& records,
                               StdConvention conv) {
  if (records.empty()) fail(ErrorCode::kInvalidArgument, "compare: method '" + name + "' has no reports");
  MethodSummary m;
  m.method = name;
  for (Index i : kAllIndices) {
    std::size_t dropped = 0;
    const auto v = index_values(records, i, &dropped);
    auto& s = m.by_index[static_cast<std::size_t>(i)];
    if (v.empty()) {
      const double nan = std::nan("");
      s = {0, nan, nan, nan, nan, nan, nan, nan};
    } else {
      s = summarize(v, conv);
    }
    if (i == Index::kBpn) m.bpn_dropped = dropped;
  }
  return m;
}

std::vector<MethodSummary> compare_methods(const std::string& name_a,
                                           const std::vector<SliceRecord>& a,
                                           const std::string& name_b,
                                           const std::vector<SliceRecord>& b,
                                           StdConvention conv) {
  return {summarize_method(name_a, a, conv), summarize_method(name_b, b, conv)};
}

std::vector<BoxplotEntry> boxplot_entries(std::vector<BoxplotEntry> values) {
  std::sort(values.begin(), values.end(), [](const BoxplotEntry& x, const BoxplotEntry& y) {
    return std::tie(x.group, x.method, x.slice) < std::tie(y.group, y.method, y.slice);
  });
  std::size_t start = 0;
  while (start < values.size()) {
    std::size_t end = start;
    while (end < values.size() && values[end].group == values[start].group &&
           values[end].method == values[start].method) {
      ++end;
    }
    std::vector<double> v;
    for (std::size_t i = start; i < end; ++i) v.push_back(values[i].value);
    std::sort(v.begin(), v.end());
    const double q25 = quantile_sorted(v, 0.25), q50 = quantile_sorted(v, 0.5),
                 q75 = quantile_sorted(v, 0.75);
    const double iqr = q75 - q25;
    for (std::size_t i = start; i < end; ++i) {
      auto& e = values[i];
      e.q25 = q25;
      e.q50 = q50;
      e.q75 = q75;
      e.lower_fence = q25 - 1.5 * iqr;
      e.upper_fence = q75 + 1.5 * iqr;
      e.outlier = e.value < e.lower_fence || e.value > e.upper_fence;
    }
    start = end;
  }
  return values;
}

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string per_patient_csv(const std::vector<PatientRow>& rows) {
  std::string out =
      "patient,n,dci_mean,ti_mean,em_mean,bpn_mean,dci_std,ti_std,em_std,bpn_std,bpn_dropped\n";
  for (const auto& r : rows) {
    out += r.patient + "," + std::to_string(r.n);
    for (double m : r.mean) out += "," + format_number(m);
    for (double s : r.std) out += "," + format_number(s);
    out += "," + std::to_string(r.bpn_dropped) + "\n";
  }
  return out;
}

std::string comparison_csv(const std::vector<MethodSummary>& methods) {
  std::string out = "stat";
  for (Index i : kAllIndices) {
    for (const auto& m : methods) out += std::string(",") + index_name(i) + "_" + m.method;
  }
  out += "\n";
  const char* names[] = {"n", "mean", "std", "min", "25%", "50%", "75%", "max"};
  for (int row = 0; row < 8; ++row) {
    out += names[row];
    for (Index i : kAllIndices) {
      for (const auto& m : methods) {
        const StatsSummary& s = m.by_index[static_cast<std::size_t>(i)];
        const double vals[] = {static_cast<double>(s.n), s.mean, s.std, s.min,
                               s.q25, s.q50, s.q75, s.max};
        out += "," + format_number(vals[row]);
      }
    }
    out += "\n";
  }
  out += "bpn_dropped";
  for (Index i : kAllIndices) {
    for (const auto& m : methods) out += "," + std::to_string(i == Index::kBpn ? m.bpn_dropped : 0);
  }
  out += "\n";
  return out;
}

std::string boxplot_csv(const std::vector<BoxplotEntry>& entries) {
  std::string out = "group,method,slice,value,q25,q50,q75,lower_fence,upper_fence,outlier\n";
  for (const auto& e : entries) {
    out += e.group + "," + e.method + "," + e.slice;
    for (double v : {e.value, e.q25, e.q50, e.q75, e.lower_fence, e.upper_fence}) {
      out += "," + format_number(v, 17);
    }
    out += e.outlier ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<BoxplotEntry> parse_boxplot_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0].rfind("group,method,slice,value", 0) != 0) {
    fail(ErrorCode::kInvalidArgument, "boxplot csv: missing header");
  }
  std::vector<BoxplotEntry> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto f = split(lines[n], ',');
    if (f.size() != 10) {
      fail(ErrorCode::kInvalidArgument, "boxplot csv: line " + std::to_string(n + 1) + " has " +
                                            std::to_string(f.size()) + " fields, expected 10");
    }
    BoxplotEntry e;
    e.group = f[0];
    e.method = f[1];
    e.slice = f[2];
    e.value = parse_double(f[3], "boxplot csv");
    e.q25 = parse_double(f[4], "boxplot csv");
    e.q50 = parse_double(f[5], "boxplot csv");
    e.q75 = parse_double(f[6], "boxplot csv");
    e.lower_fence = parse_double(f[7], "boxplot csv");
    e.upper_fence = parse_double(f[8], "boxplot csv");
    e.outlier = f[9] == "1";
    out.push_back(e);
  }
  return out;
}

std::string report_csv_header() { return "slice,dci,ti,em,bpn,ssim,tp,fp,fn,tn\n"; }

std::string report_csv_row(const std::string& slice, const SimilarityReport& r) {
  const auto& x = r.indices;
  const auto& c = r.counts;
  return slice + "," + format_number(x.dci) + "," + format_number(x.ti) + "," +
         format_number(x.em) + "," + format_number(x.bpn) + "," + format_number(r.ssim) + "," +
         std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.fn) + "," +
         std::to_string(c.tn) + "\n";
}

std::vector<SliceRecord> parse_report_csv(const std::string& text, const std::string& patient) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] + "\n" != report_csv_header()) {
    fail(ErrorCode::kInvalidArgument, "report csv: header must be " + report_csv_header().substr(0, report_csv_header().size() - 1));
  }
  std::vector<SliceRecord> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto f = split(lines[n], ',');
    if (f.size() != 10) {
      fail(ErrorCode::kInvalidArgument, "report csv: line " + std::to_string(n + 1) + " has " +
                                            std::to_string(f.size()) + " fields, expected 10");
    }
    SliceRecord rec;
    rec.patient = patient;
    rec.slice = f[0];
    auto& r = rec.report;
    r.indices.dci = parse_double(f[1], "report csv");
    r.indices.ti = parse_double(f[2], "report csv");
    r.indices.em = parse_double(f[3], "report csv");
    r.indices.bpn = parse_double(f[4], "report csv");
    r.ssim = parse_double(f[5], "report csv");
    r.counts = {parse_count(f[6], "report csv"), parse_count(f[7], "report csv"),
                parse_count(f[8], "report csv"), parse_count(f[9], "report csv")};
    r.indices.both_empty = r.counts.tp + r.counts.fp + r.counts.fn == 0;
    out.push_back(rec);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::kIo, path.string() + ": " +
                             (std::filesystem::exists(path) ? "cannot open for reading" : "file not found"));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, path.string() + ": cannot open for writing");
  out << text;
  if (!out) fail(ErrorCode::kIo, path.string() + ": write failure");
}

}  // namespace skseg
