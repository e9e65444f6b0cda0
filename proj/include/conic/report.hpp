#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conic/types.hpp"

namespace conic {

using json = nlohmann::ordered_json;

json to_json(cplx z);
json to_json(const Eigen::MatrixXcd& m);
json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXcd& v);
json to_json(const std::vector<double>& v);
json to_json(const std::vector<cplx>& v);

/// Reads fields of a config while tracking the JSON pointer of the current node,
/// so every ConfigInvalid error names the offending field ("/curve/f/2").
class ConfigNode {
 public:
  ConfigNode(const json& j, std::string path = "") : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *j_; }
  bool has(const std::string& key) const;
  ConfigNode at(const std::string& key) const;
  ConfigNode at(std::size_t index) const;
  std::size_t size() const;

  [[noreturn]] void fail(const std::string& why) const;

  double number() const;
  double positive() const;
  std::int64_t integer() const;
  std::string string() const;
  bool boolean() const;
  /// [re, im] or a bare real number.
  cplx complex() const;
  std::vector<cplx> complex_list() const;
  std::vector<int> int_list() const;

  double number_or(const std::string& key, double fallback) const;
  double positive_or(const std::string& key, double fallback) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  /// Rejects keys outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const;

 private:
  const json* j_;
  std::string path_;
};

/// Parses text; syntax errors become ConfigInvalid with the byte offset.
json parse_config(const std::string& text, const std::string& source);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// One declared check: measured value against a tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string relation = "<=";  // value <= tolerance unless stated otherwise
};

Check check_le(std::string name, double value, double tolerance);
Check check_ge(std::string name, double value, double bound);
Check check_true(std::string name, bool ok);
json to_json(const Check& c);

/// Report payload plus run-dependent facts (wall time, cache use) kept apart so
/// reruns compare byte for byte.
struct Report {
  json payload;
  double wall_time = 0.0;
  std::string period_cache = "off";
  bool pass = false;

  /// payload_hash is over payload.dump() alone.
  json document() const;
};

/// CSV with a header row.
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace conic
