// loewner: command-line front end for the operator monotonicity toolkit.
//
// Exit codes: 0 pass/success, 1 certified counterexample, 2 usage or input
// error, 3 numerical non-convergence.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loewner/characterizations.hpp"
#include "loewner/divided_differences.hpp"
#include "loewner/errors.hpp"
#include "loewner/expression.hpp"
#include "loewner/integral_rep.hpp"
#include "loewner/json_io.hpp"
#include "loewner/version.hpp"

namespace {

using nlohmann::json;
using namespace loewner;

enum Exit { kPass = 0, kCounterexample = 1, kInputError = 2, kNumericalError = 3 };

struct Options {
  std::string fn;
  std::string interval;
  std::string matrix;
  std::string measure;
  std::string samples;
  std::string out;
  int n = 4;
  int grids = 200;
  int trials = 500;
  int dim = 0;
  int nodes = 64;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<double> p;
  std::optional<double> t;
};

// "lo,hi" is open unless `closed_lo`; "[lo,hi)" style brackets are explicit.
// "inf" and "-inf" are accepted as endpoints.
Interval parse_interval(std::string text, bool closed_lo) {
  bool lo_closed = closed_lo, hi_closed = false;
  if (!text.empty() && (text.front() == '[' || text.front() == '(')) {
    if (text.size() < 2 || (text.back() != ']' && text.back() != ')'))
      throw InvalidArgument("interval '" + text + "': unbalanced brackets");
    lo_closed = text.front() == '[';
    hi_closed = text.back() == ']';
    text = text.substr(1, text.size() - 2);
  }
  auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("interval must be written lo,hi");
  auto endpoint = [](const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return loewner::detail::parse_double(s, "interval endpoint");
  };
  return Interval(endpoint(text.substr(0, comma)), endpoint(text.substr(comma + 1)), lo_closed, hi_closed);
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

json report_base(const std::string& command, const json& config) {
  return {{"command", command}, {"config", config}, {"version", kVersion}};
}

int run_fcalc(const Options& o) {
  Interval domain = o.interval.empty() ? Interval::real_line() : parse_interval(o.interval, false);
  ScalarFunction f = parse_function(o.fn, domain);
  HermitianMatrix a = io::hermitian_from_json(io::read_json_file(o.matrix));
  HermitianMatrix fa = functional_calculus(f, a);
  std::cout << io::matrix_to_json(fa.matrix()).dump(2) << '\n';
  std::cerr << "fcalc: " << f.name() << " applied to a " << a.dim() << "x" << a.dim() << " matrix\n";
  return kPass;
}

int run_check(const std::string& kind, const Options& o, const std::string& command) {
  const bool closed_lo = kind == "lh" || kind.starts_with("hp-");
  Interval j = o.interval.empty() ? (kind == "monotone" || kind == "convex" ? Interval::open(0.0, 10.0)
                                                                           : Interval::closed_open(0.0, 10.0))
                                  : parse_interval(o.interval, closed_lo);
  json config = {{"kind", kind}, {"interval", j.to_string()}, {"seed", o.seed}};

  TrialConfig cfg;
  cfg.dim = o.dim;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.interval = j;
  if (o.tol) cfg.tol_rel = *o.tol;

  auto started = std::chrono::steady_clock::now();
  Verdict v;
  if (kind == "lh") {
    if (!o.p) throw InvalidArgument("check lh needs --p");
    cfg.include_reference_pair = true;
    config["p"] = *o.p;
    config.update({{"trials", cfg.trials}, {"dim", cfg.dim}, {"tol", cfg.tol_rel}});
    v = check_lh(*o.p, cfg);
  } else {
    if (o.fn.empty()) throw InvalidArgument("check " + kind + " needs --fn");
    ScalarFunction f = parse_function(o.fn, j);
    config["fn"] = o.fn;
    if (kind == "monotone" || kind == "convex") {
      double tol = o.tol.value_or(kPsdTol);
      config.update({{"n", o.n}, {"grids", o.grids}, {"tol", tol}});
      v = kind == "monotone" ? check_n_monotone(f, j, o.n, o.grids, o.seed, tol)
                             : check_n_convex(f, j, o.n, o.grids, o.seed, tol);
    } else {
      config.update({{"trials", cfg.trials}, {"dim", cfg.dim}, {"tol", cfg.tol_rel}});
      if (kind == "hp-iv") v = check_hp(HpVariant::Contraction, f, cfg);
      else if (kind == "hp-v") v = check_hp(HpVariant::SumOfCompressions, f, cfg);
      else if (kind == "hp-vi") v = check_hp(HpVariant::Projection, f, cfg);
      else if (kind == "corollaries") v = check_corollaries(f, cfg);
      else if (kind == "pairs") v = check_monotone_pairs(f, cfg);
      else throw InvalidArgument("unknown check kind '" + kind + "'");
    }
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json report = report_base(command, config);
  report["verdict"] = io::verdict_to_json(v);
  report["wall_time"] = elapsed;
  emit(report);
  std::cerr << "check " << kind << ": " << (v.passed ? "passed" : "FAILED") << " after " << v.checks_run
            << " checks";
  if (v.witness) {
    std::cerr << " (trial " << v.witness->trial;
    if (!v.witness->check.empty()) std::cerr << ", " << v.witness->check;
    std::cerr << ", lambda_min " << v.witness->lambda_min << ")";
  }
  std::cerr << '\n';
  return v.passed ? kPass : kCounterexample;
}

int run_rep(const std::string& sub, const Options& o, const std::string& command) {
  auto started = std::chrono::steady_clock::now();
  json config = {{"sub", sub}};
  json result;
  std::ostringstream summary;
  summary.precision(12);

  if (sub == "eval") {
    if (o.measure.empty()) throw InvalidArgument("rep eval needs --measure");
    RepresentingMeasure m = io::measure_from_json(io::read_json_file(o.measure));
    config["measure"] = o.measure;
    if (!o.samples.empty()) {
      std::ifstream in(o.samples);
      if (!in) throw InvalidArgument("cannot open " + o.samples);
      auto samples = io::read_samples_csv(in);
      json values = json::array();
      double max_abs = 0.0;
      for (const auto& s : samples) {
        double v = eval_measure(m, s.t);
        max_abs = std::max(max_abs, std::abs(v - s.f));
        values.push_back({{"t", s.t}, {"f", v}});
      }
      config["samples"] = o.samples;
      result = {{"values", values}, {"max_abs_deviation", max_abs}};
      summary << "rep eval: " << samples.size() << " points, max deviation " << max_abs;
    } else {
      if (!o.t) throw InvalidArgument("rep eval needs --t or --samples");
      double v = eval_measure(m, *o.t);
      config["t"] = *o.t;
      result = {{"t", *o.t}, {"f", v}};
      summary << "rep eval: f(" << *o.t << ") = " << v;
    }
  } else if (sub == "fit") {
    if (o.samples.empty()) throw InvalidArgument("rep fit needs --samples");
    std::ifstream in(o.samples);
    if (!in) throw InvalidArgument("cannot open " + o.samples);
    auto samples = io::read_samples_csv(in);
    FitResult fit = fit_discrete_measure(samples, o.nodes);
    json mj = io::measure_to_json(fit.measure);
    if (!o.out.empty()) {
      std::ofstream out(o.out);
      if (!out) throw InvalidArgument("cannot write " + o.out);
      out << mj.dump(2) << '\n';
    }
    config.update({{"samples", o.samples}, {"nodes", o.nodes}});
    if (!o.out.empty()) config["out"] = o.out;
    result = {{"measure", mj},
              {"residual_norm", fit.residual_norm},
              {"max_abs_residual", fit.max_abs_residual},
              {"max_rel_residual", fit.max_rel_residual},
              {"iterations", fit.iterations}};
    summary << "rep fit: " << fit.measure.atoms.size() << " atoms, residual " << fit.residual_norm;
  } else if (sub == "power") {
    if (!o.p || !o.t) throw InvalidArgument("rep power needs --p and --t");
    double v = eval_measure(measure_power(*o.p), *o.t);
    config.update({{"p", *o.p}, {"t", *o.t}});
    result = {{"t", *o.t}, {"f", v}, {"t_pow_p", std::pow(*o.t, *o.p)}};
    summary << "rep power: " << *o.t << "^" << *o.p << " ~ " << v;
  } else if (sub == "atoms") {
    if (o.fn.empty()) throw InvalidArgument("rep atoms needs --fn");
    Interval domain = o.interval.empty() ? Interval::positive() : parse_interval(o.interval, false);
    BoundaryAtoms ab = extract_atoms(parse_function(o.fn, domain));
    config["fn"] = o.fn;
    result = {{"a", ab.a}, {"b", ab.b}};
    summary << "rep atoms: a = " << ab.a << ", b = " << ab.b;
  } else {
    throw InvalidArgument("unknown rep subcommand '" + sub + "'");
  }

  json report = report_base(command, config);
  report["result"] = result;
  report["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  emit(report);
  std::cerr << summary.str() << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator monotone and operator convex function toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* fcalc = app.add_subcommand("fcalc", "Apply f to a Hermitian matrix via its spectral resolution");
  fcalc->add_option("--matrix", o.matrix, "Matrix JSON file")->required();
  fcalc->add_option("--fn", o.fn, "Registry name or expression in t")->required();
  fcalc->add_option("--interval", o.interval, "Domain for expressions (lo,hi or bracketed)");

  std::string kind;
  auto* check = app.add_subcommand("check", "Randomized monotonicity/convexity checks");
  check->add_option("kind", kind, "monotone|convex|hp-iv|hp-v|hp-vi|lh|corollaries|pairs")
      ->required()
      ->check(CLI::IsMember({"monotone", "convex", "hp-iv", "hp-v", "hp-vi", "lh", "corollaries", "pairs"}));
  check->add_option("--fn", o.fn, "Registry name or expression in t");
  check->add_option("--interval", o.interval, "Interval lo,hi (or bracketed)");
  check->add_option("--n", o.n, "Grid size for monotone/convex")->check(CLI::Range(2, 64));
  check->add_option("--grids", o.grids, "Number of random grids")->check(CLI::PositiveNumber);
  check->add_option("--trials", o.trials, "Number of random matrix trials")->check(CLI::PositiveNumber);
  check->add_option("--dim", o.dim, "Matrix dimension (0 cycles 2..6)")->check(CLI::Range(0, 64));
  check->add_option("--seed", o.seed, "Random seed")->required();
  check->add_option("--tol", o.tol, "Relative PSD tolerance");
  check->add_option("--p", o.p, "Exponent for lh");

  std::string sub;
  auto* rep = app.add_subcommand("rep", "Integral representation tools");
  rep->add_option("sub", sub, "eval|fit|power|atoms")
      ->required()
      ->check(CLI::IsMember({"eval", "fit", "power", "atoms"}));
  rep->add_option("--measure", o.measure, "Measure JSON file");
  rep->add_option("--samples", o.samples, "Sample CSV file with header t,f");
  rep->add_option("--nodes", o.nodes, "Number of fit nodes")->check(CLI::Range(1, 4096));
  rep->add_option("--out", o.out, "Write the fitted measure JSON here");
  rep->add_option("--t", o.t, "Evaluation point");
  rep->add_option("--p", o.p, "Exponent for power");
  rep->add_option("--fn", o.fn, "Function for atoms");
  rep->add_option("--interval", o.interval, "Domain for expressions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  const std::string command = join_args(argc, argv);
  try {
    if (fcalc->parsed()) return run_fcalc(o);
    if (check->parsed()) return run_check(kind, o, command);
    return run_rep(sub, o, command);
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
