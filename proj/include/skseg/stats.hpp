#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "skseg/metrics.hpp"

namespace skseg {

enum class StdConvention { kPopulation, kSample };
const char* std_convention_name(StdConvention c) noexcept;
StdConvention parse_std_convention(const std::string& name);

struct StatsSummary {
  std::size_t n = 0;
  double mean = 0.0, std = 0.0, min = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, max = 0.0;
};

// Inclusive linear interpolation: h = (n - 1) p on the sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Throws kInvalidArgument on empty or non-finite input.
StatsSummary summarize(const std::vector<double>& values,
                       StdConvention conv = StdConvention::kPopulation);

enum class Index { kDci, kTi, kEm, kBpn };
inline constexpr Index kAllIndices[] = {Index::kDci, Index::kTi, Index::kEm, Index::kBpn};
const char* index_name(Index i) noexcept;
double index_value(const SimilarityReport& r, Index i);

struct SliceRecord {
  std::string patient;
  std::string slice;
  SimilarityReport report;
};

// Values of one index with undefined Bpn entries dropped.
std::vector<double> index_values(const std::vector<SliceRecord>& records, Index i,
                                 std::size_t* dropped = nullptr);

struct PatientRow {
  std::string patient;  // "total" for the pooled row
  std::size_t n = 0;
  double mean[4] = {};
  double std[4] = {};
  std::size_t bpn_dropped = 0;
};

// Rows sorted by patient id, then the total row over every slice.
std::vector<PatientRow> per_patient_table(const std::vector<SliceRecord>& records,
                                          StdConvention conv = StdConvention::kPopulation);

struct MethodSummary {
  std::string method;
  StatsSummary by_index[4];
  std::size_t bpn_dropped = 0;
};

MethodSummary summarize_method(const std::string& name, const std::vector<SliceRecord>& records,
                               StdConvention conv = StdConvention::kPopulation);
std::vector<MethodSummary> compare_methods(const std::string& name_a,
                                           const std::vector<SliceRecord>& a,
                                           const std::string& name_b,
                                           const std::vector<SliceRecord>& b,
                                           StdConvention conv = StdConvention::kPopulation);

struct BoxplotEntry {
  std::string group;
  std::string method;
  std::string slice;
  double value = 0.0;
  double q25 = 0.0, q50 = 0.0, q75 = 0.0;
  double lower_fence = 0.0, upper_fence = 0.0;
  bool outlier = false;
};

// Fills the quartiles, 1.5 x IQR fences and outlier flags of entries whose
// group, method, slice and value are set. Statistics are per (group, method);
// output is sorted by group, method, slice.
std::vector<BoxplotEntry> boxplot_entries(std::vector<BoxplotEntry> values);

// CSV writers and readers. Numbers use '.', LF line endings, header first.
std::string format_number(double v, int precision = 12);
std::string per_patient_csv(const std::vector<PatientRow>& rows);
std::string comparison_csv(const std::vector<MethodSummary>& methods);
std::string boxplot_csv(const std::vector<BoxplotEntry>& entries);
std::vector<BoxplotEntry> parse_boxplot_csv(const std::string& text);

std::string report_csv_header();
std::string report_csv_row(const std::string& slice, const SimilarityReport& r);
// Parses a report.csv body; patient is attached to every row.
std::vector<SliceRecord> parse_report_csv(const std::string& text, const std::string& patient);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace skseg
