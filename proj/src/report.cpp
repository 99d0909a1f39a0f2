#include "oldb/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "oldb/errors.hpp"

namespace oldb {

ordered_json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

double from_number(const ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
  }
  return j.get<double>();
}

}  // namespace

CheckRecord& VerificationReport::add(CheckRecord r) {
  if (r.anchor.empty()) throw ConfigError("check '" + r.name + "' has no anchor");
  checks.push_back(std::move(r));
  return checks.back();
}

bool VerificationReport::all_pass() const {
  if (!failures.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass || c.anchor.empty()) return false;
  return true;
}

ordered_json VerificationReport::to_json() const {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = experiment;
  j["environment"] = environment;
  j["calibration"] = calibration;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json r;
    r["name"] = c.name;
    r["anchor"] = c.anchor;
    r["lhs"] = number(c.lhs);
    r["rhs"] = number(c.rhs);
    r["C"] = number(c.C);
    r["tolerance"] = number(c.tolerance);
    r["pass"] = c.pass;
    if (!c.note.empty()) r["note"] = c.note;
    arr.push_back(std::move(r));
  }
  j["checks"] = std::move(arr);
  j["failures"] = failures;
  j["pass"] = all_pass();
  return j;
}

std::string VerificationReport::dump() const { return to_json().dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw RuntimeFailure(path + ": cannot read");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeFailure(path + ": cannot open for writing");
  f << bytes;
  if (!f) throw RuntimeFailure(path + ": write failed");
}

void emit_report(const VerificationReport& r, const std::string& path) { write_file(path, r.dump()); }

VerificationReport read_report(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeFailure(path + ": " + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"] != kReportSchemaVersion)
    throw RuntimeFailure(path + ": unsupported report schema");
  VerificationReport r;
  r.experiment = j.value("experiment", "");
  r.environment = j.value("environment", ordered_json::object());
  r.calibration = j.value("calibration", ordered_json::object());
  for (const auto& c : j.at("checks")) {
    CheckRecord k;
    k.name = c.at("name");
    k.anchor = c.value("anchor", "");
    k.lhs = from_number(c.at("lhs"));
    k.rhs = from_number(c.at("rhs"));
    k.C = from_number(c.at("C"));
    k.tolerance = from_number(c.at("tolerance"));
    k.pass = c.at("pass");
    k.note = c.value("note", "");
    r.checks.push_back(std::move(k));
  }
  for (const auto& f : j.value("failures", ordered_json::array())) r.failures.push_back(f);
  return r;
}

}  // namespace oldb
