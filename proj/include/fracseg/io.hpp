#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracseg/field.hpp"
#include "fracseg/monotone.hpp"
#include "fracseg/spectral.hpp"

namespace fracseg {

// shortest round-trippable decimal form
std::string fmt_double(double v);

// snapshot text format: header "s a t_min t_max n_t n_theta", then rows
// "t theta value" in row-major order, trace columns included
void write_snapshot(const std::string& path, const LogPolarField& f, FracParam par);
LogPolarField read_snapshot(const std::string& path, FracParam& par_out);

void write_field_csv(const std::string& path, const LogPolarField& f);
void write_eigenset_csv(const std::string& path, const EigenSet& set);
void write_trace_csv(const std::string& path, const FrequencyTrace& trace);

// stencil dump helper (coordinate text format)
void write_stencil(const std::string& path, const class DiscreteOperator& op);

// dotted key-value configuration file: `section.key = value`, '#' comments
class KVConfig {
 public:
  static KVConfig parse_file(const std::string& path);
  static KVConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace fracseg
