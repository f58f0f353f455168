#include "jumpinterp/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "jumpinterp/error.hpp"

namespace jumpinterp {

namespace {

// Numbers may be written as JSON numbers or as the strings "inf"/"-inf".
double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  throw ParseError(where + ": expected a number");
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// A list of m-tuples or of scalars, flattened; sets m (0 = undetermined).
std::vector<double> tuples(const json& j, const std::string& where, std::size_t& m) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<double> flat;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (j[i].is_array()) {
      const auto row = numbers(j[i], w);
      if (m == 0) m = row.size();
      if (row.size() != m || m == 0) throw ParseError(w + ": inconsistent tuple length");
      flat.insert(flat.end(), row.begin(), row.end());
    } else {
      if (m == 0) m = 1;
      if (m != 1) throw ParseError(w + ": expected a tuple");
      flat.push_back(number(j[i], w));
    }
  }
  return flat;
}

std::vector<double> default_labels(std::size_t n) {
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<double>(i);
  return l;
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

template <class F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const InputError& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const DomainError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

BNorm bnorm_from_json(const json& j, std::size_t m_default) {
  if (j.is_null()) return BNorm(m_default, 2.0);
  if (!j.is_object()) throw ParseError("norm: expected an object {m, s}");
  const std::size_t m = j.contains("m") ? j["m"].get<std::size_t>() : m_default;
  const double s = j.contains("s") ? number(j["s"], "norm.s") : 2.0;
  if (m != m_default) throw ParseError("norm.m does not match the value tuples");
  return guarded("norm", [&] { return BNorm(m, s); });
}

json to_json(const BNorm& n) { return {{"m", n.dimension()}, {"s", number_json(n.exponent())}}; }

TimeSeries time_series_from_json(const json& j) {
  return guarded("time series", [&] {
    if (!j.is_object()) throw ParseError("time series: expected an object");
    std::size_t m = 0;
    auto flat = tuples(j.at("values"), "values", m);
    if (m == 0) throw ParseError("values: empty series");
    const std::size_t n = flat.size() / m;
    auto labels = j.contains("labels") ? numbers(j["labels"], "labels") : default_labels(n);
    if (labels.size() != n) throw ParseError("labels: length differs from values");
    return TimeSeries(std::move(labels), std::move(flat),
                      bnorm_from_json(j.value("norm", json()), m));
  });
}

json to_json(const TimeSeries& ts) {
  json values = json::array();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    auto v = ts.value(i);
    values.push_back(std::vector<double>(v.begin(), v.end()));
  }
  return {{"labels", ts.labels()}, {"values", values}, {"norm", to_json(ts.norm())}};
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    bool bad = false;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) bad = true;
        row.push_back(v);
      } catch (const std::exception&) {
        bad = true;
      }
    }
    if (row.empty() && !bad) continue;
    if (bad) {
      if (!seen_data && rows.empty()) {
        seen_data = true;  // header
        continue;
      }
      throw ParseError("line " + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " columns");
    seen_data = true;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data rows");
  return rows;
}

TimeSeries time_series_from_csv(const std::string& text, double s) {
  const auto rows = parse_csv_rows(text);
  return guarded("csv", [&] { return TimeSeries::from_rows(rows, BNorm(rows.front().size(), s)); });
}

SampledProcess sampled_process_from_json(const json& j) {
  return guarded("sampled process", [&] {
    if (!j.is_object()) throw ParseError("sampled process: expected an object");
    const json& space = j.at("space");
    auto weights = numbers(space.at("weights"), "space.weights");
    std::vector<std::string> ids;
    if (space.contains("ids")) {
      ids = space["ids"].get<std::vector<std::string>>();
    } else {
      for (std::size_t i = 0; i < weights.size(); ++i) ids.push_back(std::to_string(i));
    }
    const json& values = j.at("values");
    if (!values.is_array() || values.size() != weights.size())
      throw ParseError("values: expected one list per atom");
    std::size_t m = 0;
    std::vector<std::vector<double>> flats;
    for (std::size_t x = 0; x < values.size(); ++x)
      flats.push_back(tuples(values[x], "values[" + std::to_string(x) + "]", m));
    if (m == 0) throw ParseError("values: empty series");
    const std::size_t n = flats.front().size() / m;
    auto labels = j.contains("labels") ? numbers(j["labels"], "labels") : default_labels(n);
    const BNorm norm = bnorm_from_json(j.value("norm", json()), m);
    std::vector<TimeSeries> series;
    for (std::size_t x = 0; x < flats.size(); ++x) {
      if (flats[x].size() != n * m)
        throw ParseError("values[" + std::to_string(x) + "]: length differs from atom 0");
      series.emplace_back(labels, std::move(flats[x]), norm);
    }
    return SampledProcess(AtomicMeasureSpace(std::move(ids), std::move(weights)),
                          std::move(series));
  });
}

json to_json(const SampledProcess& f) {
  json values = json::array();
  for (const auto& ts : f.all_series()) values.push_back(to_json(ts)["values"]);
  std::vector<double> w = f.space().weights();
  return {{"space", {{"ids", f.space().ids()}, {"weights", w}}},
          {"labels", f.labels()},
          {"values", values},
          {"norm", to_json(f.norm())}};
}

FiniteMartingale martingale_from_json(const json& j) {
  return guarded("martingale", [&] {
    if (!j.is_object()) throw ParseError("martingale: expected an object");
    auto weights = numbers(j.at("weights"), "weights");
    const std::size_t atoms = weights.size();
    const auto blocks =
        j.at("partitions").get<std::vector<std::vector<std::vector<std::size_t>>>>();
    if (blocks.empty()) throw ParseError("partitions: empty");
    for (std::size_t t = 0; t < blocks.size(); ++t)
      for (const auto& b : blocks[t])
        for (std::size_t a : b)
          if (a >= atoms)
            throw ParseError("partitions[" + std::to_string(t) + "]: atom index out of range");
    const Filtration filt = Filtration::from_blocks(atoms, blocks);
    AtomicMeasureSpace space = AtomicMeasureSpace::with_weights(std::move(weights));
    if (j.contains("process")) {
      // time -> atom -> m-tuple
      const json& proc = j["process"];
      if (!proc.is_array() || proc.size() != blocks.size())
        throw ParseError("process: expected one entry per partition");
      std::size_t m = 0;
      std::vector<std::vector<double>> per_time;
      for (std::size_t t = 0; t < proc.size(); ++t) {
        per_time.push_back(tuples(proc[t], "process[" + std::to_string(t) + "]", m));
        if (per_time.back().size() != atoms * m)
          throw ParseError("process[" + std::to_string(t) + "]: expected one tuple per atom");
      }
      const BNorm norm = bnorm_from_json(j.value("norm", json()), m);
      std::vector<TimeSeries> series;
      for (std::size_t x = 0; x < atoms; ++x) {
        std::vector<double> flat;
        for (std::size_t t = 0; t < per_time.size(); ++t)
          flat.insert(flat.end(), per_time[t].begin() + static_cast<std::ptrdiff_t>(x * m),
                      per_time[t].begin() + static_cast<std::ptrdiff_t>((x + 1) * m));
        series.emplace_back(default_labels(per_time.size()), std::move(flat), norm);
      }
      return FiniteMartingale(filt, SampledProcess(space, std::move(series)));
    }
    const json& values = j.at("values");
    // terminal values, one tuple per atom
    std::size_t m = 0;
    const auto flat = tuples(values, "values", m);
    if (flat.size() != atoms * m) throw ParseError("values: expected one tuple per atom");
    std::vector<std::vector<double>> terminal(atoms);
    for (std::size_t x = 0; x < atoms; ++x)
      terminal[x].assign(flat.begin() + static_cast<std::ptrdiff_t>(x * m),
                         flat.begin() + static_cast<std::ptrdiff_t>((x + 1) * m));
    return make_martingale(space, filt, terminal, bnorm_from_json(j.value("norm", json()), m));
  });
}

json to_json(const FiniteMartingale& m) {
  json parts = json::array();
  for (std::size_t t = 0; t < m.filtration().steps(); ++t)
    parts.push_back(m.filtration().block_lists(t));
  json process = json::array();
  for (std::size_t t = 0; t < m.steps(); ++t) {
    json row = json::array();
    const auto v = m.at(t);
    for (std::size_t x = 0; x < m.atoms(); ++x)
      row.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(x * m.dimension()),
                                        v.begin() + static_cast<std::ptrdiff_t>((x + 1) * m.dimension())));
    process.push_back(row);
  }
  return {{"partitions", parts},
          {"values", process.back()},
          {"process", process},
          {"weights", m.space().weights()},
          {"norm", to_json(m.process().norm())}};
}

DoublyStochasticMatrix matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    const json& rows = j.is_object() ? j.at("entries") : j;
    if (!rows.is_array()) throw ParseError("matrix: expected a list of rows");
    std::vector<std::vector<double>> r;
    for (std::size_t i = 0; i < rows.size(); ++i)
      r.push_back(numbers(rows[i], "entries[" + std::to_string(i) + "]"));
    std::vector<double> w;
    if (j.is_object() && j.contains("weights")) w = numbers(j["weights"], "weights");
    return DoublyStochasticMatrix::from_rows(r, std::move(w));
  });
}

DoublyStochasticMatrix matrix_from_csv(const std::string& text, std::vector<double> weights) {
  const auto rows = parse_csv_rows(text);
  return guarded("matrix", [&] { return DoublyStochasticMatrix::from_rows(rows, std::move(weights)); });
}

json to_json(const DoublyStochasticMatrix& Q) {
  json rows = json::array();
  for (std::size_t i = 0; i < Q.size(); ++i) {
    std::vector<double> r(Q.size());
    for (std::size_t k = 0; k < Q.size(); ++k) r[k] = Q(i, k);
    rows.push_back(r);
  }
  return {{"entries", rows}, {"weights", Q.weights()}};
}

}  // namespace jumpinterp
