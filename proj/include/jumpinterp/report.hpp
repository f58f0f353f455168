#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace jumpinterp {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

// One verified inequality instance: lhs <= (constant) * rhs.
// `ratio` is lhs / rhs (0 when both sides vanish, +inf when only rhs does).
struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool holds = true;
  json params = json::object();
  json witness = json::object();
};

double safe_ratio(double lhs, double rhs);
json to_json(const Check& c);

struct Aggregate {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::size_t count = 0;
  std::size_t violations = 0;
};

Aggregate aggregate(const std::vector<Check>& checks);

// Output of a verification suite. Ratios are reproducible from
// (suite, params, seed, version).
struct Report {
  std::string suite;
  json params = json::object();
  std::vector<Check> records;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  json summary = json::object();  // suite-specific aggregate quantities
  std::vector<std::string> notes;
  bool passed = true;

  Aggregate aggregate() const { return jumpinterp::aggregate(records); }
};

json to_json(const Report& r);
// Flat table: name, param, lhs, rhs, ratio, holds.
void write_csv(const Report& r, std::ostream& os);

}  // namespace jumpinterp
