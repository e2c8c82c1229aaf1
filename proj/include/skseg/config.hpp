#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skseg/pipeline.hpp"
#include "skseg/sk.hpp"
#include "skseg/stats.hpp"

namespace skseg {

struct ConfigKey {
  const char* name;  // section.key
  const char* type;  // int, int>=0, int>=1, real, real>0, bool, path, or a|b|c
  const char* default_value;
  const char* help;
};

// Every recognised key, in documentation order.
const std::vector<ConfigKey>& config_keys();

// Run configuration. Precedence is defaults < file < explicit set() calls,
// applied in call order. Values are type-checked when set.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  // Text format: `key = value` lines, optional `[section]` headers that prefix
  // bare keys, `#` comments. Unknown keys are rejected with the line number.
  void parse_text(const std::string& text, const std::string& source = "<config>");
  void load_file(const std::filesystem::path& path);

  KernelSpec kernel() const;
  SkParams sk() const;
  PipelineConfig pipeline() const;
  StdConvention std_convention() const;
  Index boxplot_index() const;
  int parallelism() const;

  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // `key = value` for every key, ascending.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace skseg
