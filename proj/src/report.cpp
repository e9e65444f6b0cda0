#include "conic/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace conic {

namespace {

std::string describe(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return "null";
    case json::value_t::object: return "an object";
    case json::value_t::array: return "an array";
    case json::value_t::string: return "a string";
    case json::value_t::boolean: return "a boolean";
    default: return "a number";
  }
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const std::vector<double>& v) { return json(v); }

json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(to_json(z));
  return out;
}

bool ConfigNode::has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

ConfigNode ConfigNode::at(const std::string& key) const {
  if (!j_->is_object()) fail("expected an object, got " + describe(*j_));
  const auto it = j_->find(key);
  if (it == j_->end()) ConfigNode(*j_, path_ + "/" + key).fail("missing required field");
  return ConfigNode(*it, path_ + "/" + key);
}

ConfigNode ConfigNode::at(std::size_t index) const {
  if (!j_->is_array()) fail("expected an array, got " + describe(*j_));
  if (index >= j_->size()) fail("index " + std::to_string(index) + " out of range");
  return ConfigNode((*j_)[index], path_ + "/" + std::to_string(index));
}

std::size_t ConfigNode::size() const {
  if (!j_->is_array()) fail("expected an array, got " + describe(*j_));
  return j_->size();
}

void ConfigNode::fail(const std::string& why) const {
  throw Error(ErrorKind::ConfigInvalid, "at " + (path_.empty() ? std::string("/") : path_) + ": " + why);
}

double ConfigNode::number() const {
  if (!j_->is_number()) fail("expected a number, got " + describe(*j_));
  const double x = j_->get<double>();
  if (!std::isfinite(x)) fail("expected a finite number");
  return x;
}

double ConfigNode::positive() const {
  const double x = number();
  if (!(x > 0.0)) fail("must be > 0");
  return x;
}

std::int64_t ConfigNode::integer() const {
  if (!j_->is_number_integer()) fail("expected an integer, got " + describe(*j_));
  return j_->get<std::int64_t>();
}

std::string ConfigNode::string() const {
  if (!j_->is_string()) fail("expected a string, got " + describe(*j_));
  return j_->get<std::string>();
}

bool ConfigNode::boolean() const {
  if (!j_->is_boolean()) fail("expected a boolean, got " + describe(*j_));
  return j_->get<bool>();
}

cplx ConfigNode::complex() const {
  if (j_->is_number()) return number();
  if (!j_->is_array() || j_->size() != 2) fail("expected [re, im] or a number");
  return {at(0).number(), at(1).number()};
}

std::vector<cplx> ConfigNode::complex_list() const {
  std::vector<cplx> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).complex());
  return out;
}

std::vector<int> ConfigNode::int_list() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(static_cast<int>(at(i).integer()));
  return out;
}

double ConfigNode::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}
double ConfigNode::positive_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).positive() : fallback;
}
std::int64_t ConfigNode::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? at(key).integer() : fallback;
}
std::string ConfigNode::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).string() : fallback;
}
bool ConfigNode::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}

void ConfigNode::only(std::initializer_list<const char*> allowed) const {
  if (!j_->is_object()) fail("expected an object, got " + describe(*j_));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j_->items())
    if (!ok.count(key)) ConfigNode(value, path_ + "/" + key).fail("unknown field");
}

json parse_config(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, source + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Check check_le(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance, "<="};
}

Check check_ge(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value >= bound, ">="};
}

Check check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok, "=="}; }

json to_json(const Check& c) {
  return json{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

json Report::document() const {
  json doc = payload;
  doc["payload_hash"] = fnv1a_hex(payload.dump());
  doc["runtime"] = {{"wall_time_s", wall_time}, {"period_cache", period_cache}};
  return doc;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace conic
