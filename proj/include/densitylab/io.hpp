#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "densitylab/real.hpp"

namespace dlab {

// Flat key=value configuration: one key per line, '#' comments, later keys win.
// Command-line flags override file values by writing into the same map.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;

  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// CSV emission with a fixed header; every write goes through one serializer so
// identical data yields identical bytes.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

std::string format_double(double x);

}  // namespace dlab
