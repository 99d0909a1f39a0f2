#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace oldb {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

struct CheckRecord {
  std::string name;
  std::string anchor;  // the estimate being checked, as a formula
  double lhs = 0, rhs = 0;
  double C = 0;  // calibrated constant, 0 when none enters
  double tolerance = 0;
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::string experiment;
  ordered_json environment = ordered_json::object();
  ordered_json calibration = ordered_json::object();
  std::vector<CheckRecord> checks;
  std::vector<std::string> failures;  // runtime problems that are not checks

  CheckRecord& add(CheckRecord r);
  bool all_pass() const;
  ordered_json to_json() const;
  std::string dump() const;
};

// non-finite numbers become the strings "inf", "-inf", "nan"
ordered_json number(double x);

void emit_report(const VerificationReport& r, const std::string& path);
VerificationReport read_report(const std::string& path);

// bytes of a file; IoError-style ConfigError if unreadable
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace oldb
