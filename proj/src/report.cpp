#include "jumpinterp/report.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace jumpinterp {

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  if (lhs <= 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

namespace {

// JSON has no infinity; encode non-finite numbers as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

json to_json(const Check& c) {
  return json{{"name", c.name},     {"lhs", number(c.lhs)},
              {"rhs", number(c.rhs)}, {"ratio", number(c.ratio)},
              {"holds", c.holds},   {"params", c.params},
              {"witness", c.witness}};
}

Aggregate aggregate(const std::vector<Check>& checks) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& c : checks) {
    ++a.count;
    if (!c.holds) ++a.violations;
    if (std::isfinite(c.ratio)) {
      a.max_ratio = std::max(a.max_ratio, c.ratio);
      sum += c.ratio;
    } else {
      a.max_ratio = std::numeric_limits<double>::infinity();
    }
  }
  a.mean_ratio = a.count ? sum / static_cast<double>(a.count) : 0.0;
  return a;
}

json to_json(const Report& r) {
  const Aggregate a = r.aggregate();
  json records = json::array();
  for (const auto& c : r.records) records.push_back(to_json(c));
  return json{{"suite", r.suite},
              {"params", r.params},
              {"seed", r.seed},
              {"version", r.version},
              {"tolerance", number(r.tolerance)},
              {"passed", r.passed},
              {"aggregate",
               {{"max_ratio", number(a.max_ratio)},
                {"mean_ratio", number(a.mean_ratio)},
                {"count", a.count},
                {"violations", a.violations}}},
              {"summary", r.summary},
              {"notes", r.notes},
              {"records", records}};
}

void write_csv(const Report& r, std::ostream& os) {
  os << "name,param,lhs,rhs,ratio,holds\n";
  os.precision(17);
  for (const auto& c : r.records) {
    std::string param = c.params.dump();
    std::string quoted;
    quoted.reserve(param.size() + 2);
    quoted.push_back('"');
    for (char ch : param) {
      if (ch == '"') quoted.push_back('"');
      quoted.push_back(ch);
    }
    quoted.push_back('"');
    os << c.name << ',' << quoted << ',' << c.lhs << ',' << c.rhs << ',' << c.ratio
       << ',' << (c.holds ? 1 : 0) << '\n';
  }
}

}  // namespace jumpinterp
