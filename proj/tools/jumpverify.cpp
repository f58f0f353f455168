// jumpverify: batch verification suites and one-shot computations.
//
//   jumpverify verify <suite> [--p --q --rho --theta --r --trials --seed --tol
//                              --size --family FILE --instance N --out PREFIX]
//   jumpverify replay <failures.json>
//   jumpverify compute <kind> --in FILE [params]
//   jumpverify list
//
// Exit codes: 0 all assertions hold, 1 assertion failure, 2 usage or parse error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "jumpinterp/error.hpp"
#include "jumpinterp/interpolation.hpp"
#include "jumpinterp/io.hpp"
#include "jumpinterp/markov.hpp"
#include "jumpinterp/martingale.hpp"
#include "jumpinterp/suites.hpp"

using namespace jumpinterp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<double> parse_number(const std::string& s, const char* flag) {
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "Infinity") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("--") + flag + ": not a number: '" + s + "'");
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("--") + flag + " is required for this kind");
  return *v;
}

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  os << text;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Report files: PREFIX.json, PREFIX.csv and, when a record fails,
// PREFIX.failures.json with the configuration needed for replay.
int emit(const Report& rep, const SuiteConfig& cfg, const std::string& out) {
  const Aggregate a = rep.aggregate();
  std::cout << rep.suite << ": " << (rep.passed ? "PASS" : "FAIL") << "  records=" << a.count
            << " violations=" << a.violations << " max_ratio=" << num(a.max_ratio) << '\n';
  std::cout << "summary " << rep.summary.dump() << '\n';
  if (!out.empty()) {
    write_file(out + ".json", to_json(rep).dump(2) + "\n");
    std::ostringstream csv;
    write_csv(rep, csv);
    write_file(out + ".csv", csv.str());
  }
  if (!rep.passed) {
    json failures = json::array();
    for (const auto& c : rep.records)
      if (!c.holds) failures.push_back(to_json(c));
    const json f = {{"config", cfg.to_json()}, {"version", rep.version}, {"failures", failures}};
    const std::string path = (out.empty() ? rep.suite : out) + ".failures.json";
    write_file(path, f.dump(2) + "\n");
    std::cout << "failing records written to " << path << '\n';
  }
  return rep.passed ? kPass : kFail;
}

struct VerifyArgs {
  std::string suite, p, q, rho, theta, r, tol, family, out;
  std::optional<std::size_t> trials, size, instance;
  std::uint64_t seed = 1;
};

int run_verify(const VerifyArgs& a) {
  SuiteConfig cfg;
  cfg.suite = a.suite;
  cfg.p = parse_number(a.p, "p");
  cfg.q = parse_number(a.q, "q");
  cfg.rho = parse_number(a.rho, "rho");
  cfg.theta = parse_number(a.theta, "theta");
  cfg.r = parse_number(a.r, "r");
  cfg.tol = parse_number(a.tol, "tol");
  cfg.trials = a.trials;
  cfg.size = a.size;
  cfg.instance = a.instance;
  cfg.seed = a.seed;
  if (!a.family.empty()) cfg.family = read_json_file(a.family);
  return emit(run_suite(cfg), cfg, a.out);
}

int run_replay(const std::string& path, const std::string& out) {
  const json f = read_json_file(path);
  if (!f.contains("config") || !f.contains("failures") || !f["failures"].is_array())
    throw ParseError(path + ": expected fields 'config' and 'failures'");
  SuiteConfig base = SuiteConfig::from_json(f["config"]);
  std::set<std::size_t> instances;
  bool aggregate = false;
  for (const auto& rec : f["failures"]) {
    if (rec.contains("witness") && rec["witness"].contains("instance"))
      instances.insert(rec["witness"]["instance"].get<std::size_t>());
    else
      aggregate = true;
  }
  int status = kPass;
  if (aggregate) {
    SuiteConfig cfg = base;
    cfg.instance.reset();
    std::cout << "replaying the full ensemble\n";
    status = std::max(status, emit(run_suite(cfg), cfg, out));
  }
  for (std::size_t i : instances) {
    SuiteConfig cfg = base;
    cfg.instance = i;
    std::cout << "replaying instance " << i << '\n';
    status = std::max(status, emit(run_suite(cfg), cfg, out.empty() ? "" : out + "." + std::to_string(i)));
  }
  return status;
}

// ---------------------------------------------------------------------------
// compute

struct ComputeArgs {
  std::string kind, in, lambda, r, p, q, rho, theta, t, mode = "brute", s, f;
  std::size_t N = 16;
  std::string out;
};

TimeSeries load_series(const std::string& path, double s) {
  if (ends_with(path, ".csv")) return time_series_from_csv(read_text_file(path), s);
  return time_series_from_json(read_json_file(path));
}

// A SampledProcess file, or a TimeSeries file read as one atom of mass 1.
SampledProcess load_process(const std::string& path) {
  if (ends_with(path, ".csv")) {
    return SampledProcess(AtomicMeasureSpace::uniform(1), {time_series_from_csv(read_text_file(path))});
  }
  const json j = read_json_file(path);
  if (j.is_object() && j.contains("space")) return sampled_process_from_json(j);
  return SampledProcess(AtomicMeasureSpace::uniform(1), {time_series_from_json(j)});
}

DoublyStochasticMatrix load_matrix(const std::string& path, json* extra) {
  if (ends_with(path, ".csv")) return matrix_from_csv(read_text_file(path));
  const json j = read_json_file(path);
  if (extra) *extra = j;
  return matrix_from_json(j);
}

JumpCouple couple_of(const ComputeArgs& a) {
  JumpCouple c;
  c.p = parse_number(a.p, "p").value_or(2.0);
  c.q = parse_number(a.q, "q").value_or(c.p);
  c.rho = parse_number(a.rho, "rho").value_or(2.0);
  c.theta = parse_number(a.theta, "theta").value_or(0.5);
  c.validate();
  return c;
}

int run_compute(const ComputeArgs& a) {
  json out;
  std::string line;
  const std::string& k = a.kind;
  if (k == "Nlambda") {
    const TimeSeries ts = load_series(a.in, parse_number(a.s, "s").value_or(2.0));
    const double lam = require(parse_number(a.lambda, "lambda"), "lambda");
    const JumpWitness w = jump_count(ts, lam);
    out = {{"kind", k}, {"lambda", lam}, {"value", w.count}, {"times", w.times}};
    line = std::to_string(w.count);
  } else if (k == "Vr") {
    const TimeSeries ts = load_series(a.in, parse_number(a.s, "s").value_or(2.0));
    const double r = require(parse_number(a.r, "r"), "r");
    const VariationResult v = variation(ts, r);
    out = {{"kind", k}, {"r", a.r}, {"value", v.value}, {"witness", v.witness}};
    line = num(v.value);
  } else if (k == "jump") {
    const SampledProcess f = load_process(a.in);
    const double p = parse_number(a.p, "p").value_or(2.0);
    const double q = parse_number(a.q, "q").value_or(p);
    const double rho = parse_number(a.rho, "rho").value_or(2.0);
    const JumpSeminorm J = jump_seminorm(f, p, q, rho);
    out = {{"kind", k}, {"p", a.p}, {"q", a.q}, {"rho", rho}, {"value", J.value}};
    if (J.argmax_lambda) out["argmax_lambda"] = *J.argmax_lambda;
    line = num(J.value);
  } else if (k == "K") {
    const SampledProcess f = load_process(a.in);
    const double t = require(parse_number(a.t, "t"), "t");
    JumpKFunctional K(f, couple_of(a), parse_kmode(a.mode));
    const auto v = K.evaluate(t);
    out = {{"kind", k}, {"t", t}, {"mode", a.mode}, {"value", v.value}, {"s", v.s},
           {"norm0", K.norm0()}, {"norm1", K.norm1()}};
    if (std::isfinite(v.lambda)) out["lambda"] = v.lambda;
    line = num(v.value);
  } else if (k == "interp") {
    const SampledProcess f = load_process(a.in);
    const JumpCouple c = couple_of(a);
    const auto res = jump_interp_equivalence(f, c.p, c.q, c.rho, c.theta, parse_kmode(a.mode));
    out = {{"kind", k}, {"mode", a.mode}, {"value", res.I}, {"J", res.J},
           {"I/J", res.ratio_IJ}, {"J/I", res.ratio_JI}, {"argmax_j", res.argmax_j}};
    line = num(res.I);
  } else if (k == "S") {
    const FiniteMartingale m = martingale_from_json(read_json_file(a.in));
    const double rho = parse_number(a.rho, "rho").value_or(2.0);
    const double p = parse_number(a.p, "p").value_or(2.0);
    const auto S = square_function(m, rho);
    const double norm = lp_norm(S, m.space(), p);
    out = {{"kind", k}, {"rho", rho}, {"p", p}, {"per_atom", S}, {"value", norm}};
    line = num(norm);
  } else if (k == "orbit") {
    json extra;
    const DoublyStochasticMatrix Q = load_matrix(a.in, &extra);
    std::vector<double> f;
    if (!a.f.empty()) {
      std::stringstream ss(a.f);
      for (std::string item; std::getline(ss, item, ',');)
        f.push_back(require(parse_number(item, "f"), "f"));
    } else if (extra.is_object() && extra.contains("f")) {
      f = extra["f"].get<std::vector<double>>();
    } else {
      throw UsageError("orbit: give --f or an 'f' field in the matrix file");
    }
    if (f.size() != Q.size()) throw UsageError("orbit: f must have one value per state");
    const SampledProcess orbit = semigroup_orbit(Q, f, a.N);
    std::vector<std::vector<double>> rows;
    for (double v : f) rows.push_back({v});
    const double p = parse_number(a.p, "p").value_or(2.0);
    const double rho = parse_number(a.rho, "rho").value_or(2.0);
    const MarkovReport rep = verify_markov_jump(Q, rows, BNorm(1, 2.0), p, rho, a.N);
    out = {{"kind", k}, {"N", a.N}, {"orbit", to_json(orbit)}, {"jump", rep.summary()}};
    line = num(rep.ratio);
  } else {
    throw UsageError("unknown kind '" + k + "' (Nlambda, Vr, jump, K, interp, S, orbit)");
  }
  std::cout << line << '\n' << out.dump() << '\n';
  if (!a.out.empty()) write_file(a.out, out.dump(2) + "\n");
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jump inequalities via real interpolation: verification suites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", va.suite, "suite name (see 'list')")->required();
  verify->add_option("--p", va.p, "Lorentz exponent p");
  verify->add_option("--q", va.q, "Lorentz exponent q (inf allowed)");
  verify->add_option("--rho", va.rho, "jump exponent rho");
  verify->add_option("--theta", va.theta, "interpolation parameter theta");
  verify->add_option("--r", va.r, "variation exponent r (inf allowed)");
  verify->add_option("--trials", va.trials, "ensemble size");
  verify->add_option("--seed", va.seed, "RNG seed");
  verify->add_option("--tol", va.tol, "suite tolerance");
  verify->add_option("--size", va.size, "largest instance size");
  verify->add_option("--family", va.family, "multiplier family JSON file");
  verify->add_option("--instance", va.instance, "run only this ensemble instance");
  verify->add_option("--out", va.out, "output prefix for .json/.csv reports");

  std::string replay_in, replay_out;
  auto* replay = app.add_subcommand("replay", "re-run the failing instances of a failures file");
  replay->add_option("file", replay_in, "failures JSON written by verify")->required();
  replay->add_option("--out", replay_out, "output prefix");

  ComputeArgs ca;
  auto* compute = app.add_subcommand("compute", "one-shot computation on an input file");
  compute->add_option("kind", ca.kind, "Nlambda, Vr, jump, K, interp, S or orbit")->required();
  compute->add_option("--in", ca.in, "input file (.json or .csv)")->required();
  compute->add_option("--lambda", ca.lambda, "jump size (Nlambda)");
  compute->add_option("--r", ca.r, "variation exponent (Vr)");
  compute->add_option("--p", ca.p, "Lorentz exponent p");
  compute->add_option("--q", ca.q, "Lorentz exponent q");
  compute->add_option("--rho", ca.rho, "jump exponent rho");
  compute->add_option("--theta", ca.theta, "interpolation parameter");
  compute->add_option("--t", ca.t, "K-functional argument");
  compute->add_option("--mode", ca.mode, "K mode: constructive, numeric or brute");
  compute->add_option("--s", ca.s, "l^s norm of CSV series");
  compute->add_option("--f", ca.f, "orbit: comma-separated initial function");
  compute->add_option("--N", ca.N, "orbit horizon");
  compute->add_option("--out", ca.out, "write the JSON result to this file");

  app.add_subcommand("list", "list the suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*verify) return run_verify(va);
    if (*replay) return run_replay(replay_in, replay_out);
    if (*compute) return run_compute(ca);
    for (const auto& n : suite_names()) std::cout << n << '\n';
    return kPass;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
