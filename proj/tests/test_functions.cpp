#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "loewner/expression.hpp"
#include "loewner/json_io.hpp"
#include "loewner/parallel.hpp"
#include "loewner/random.hpp"
#include "loewner/registry.hpp"

using namespace loewner;

TEST(Interval, Construction) {
  EXPECT_THROW(Interval::open(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(Interval::open(2.0, 1.0), InvalidArgument);
  EXPECT_THROW(Interval::open(std::nan(""), 1.0), InvalidArgument);
  Interval inf(0.0, INFINITY, true, true);
  EXPECT_FALSE(inf.hi_closed());
  EXPECT_EQ(Interval::closed_open(0.0, 2.0).to_string(), "[0,2)");
}

TEST(Interval, MembershipAndMargin) {
  Interval j = Interval::closed_open(0.0, 1.0);
  EXPECT_TRUE(j.contains(0.0));
  EXPECT_FALSE(j.contains(1.0));
  EXPECT_EQ(j.clamp_with_margin(-1e-13), 0.0);
  EXPECT_THROW(j.clamp_with_margin(-1e-11), DomainViolation);
  EXPECT_THROW(j.clamp_with_margin(1.0), DomainViolation);
  Interval big = Interval::closed(-1e6, 1e6);
  EXPECT_EQ(big.clamp_with_margin(1e6 + 1e-7), 1e6);
  EXPECT_TRUE(Interval::nonnegative().includes(Interval::open(0.0, 5.0)));
  EXPECT_TRUE(Interval::nonnegative().includes(Interval::closed_open(0.0, 5.0)));
  EXPECT_FALSE(Interval::positive().includes(Interval::closed_open(0.0, 5.0)));
  EXPECT_TRUE(Interval::real_line().includes(Interval::positive()));
}

TEST(ScalarFunction, FiniteDifferences) {
  ScalarFunction e("exp", Interval::real_line(), [](double t) { return std::exp(t); });
  EXPECT_NEAR(e.derivative(1.0), std::exp(1.0), 1e-8);
  EXPECT_NEAR(e.second_derivative(1.0), std::exp(1.0), 1e-5);
  ScalarFunction r("sqrt", Interval::nonnegative(), [](double t) { return std::sqrt(t); });
  EXPECT_NEAR(r.derivative(1e-3), 0.5 / std::sqrt(1e-3), 1e-6 * (0.5 / std::sqrt(1e-3)));
  ScalarFunction sq("sq", Interval::closed(0.0, 1.0), [](double t) { return t * t + t; });
  EXPECT_NEAR(sq.derivative(0.0), 1.0, 1e-9);
  EXPECT_NEAR(sq.derivative(1.0), 3.0, 1e-9);
  EXPECT_NEAR(sq.second_derivative(0.0), 2.0, 1e-4);
  EXPECT_NEAR(sq.second_derivative(1.0), 2.0, 1e-4);
  EXPECT_THROW(r(-1.0), DomainViolation);
  ScalarFunction bad("1/t", Interval::real_line(), [](double t) { return 1.0 / t; });
  EXPECT_THROW(bad(0.0), DomainViolation);
}

TEST(Registry, NamesAndDomains) {
  for (const char* name : {"identity", "sqrt", "log", "xlogx", "logmean", "neg_inv", "exp", "affine:2,1", "power:2",
                           "power:0.5", "power:-1"})
    EXPECT_TRUE(registry_function(name)) << name;
  EXPECT_FALSE(registry_function("cosh"));
  EXPECT_THROW(registry_function("affine:1"), InvalidArgument);
  EXPECT_THROW(registry_function("power:x"), InvalidArgument);

  auto affine = *registry_function("affine:2,1");
  EXPECT_EQ(affine(3.0), 7.0);
  EXPECT_EQ(affine.derivative(0.0), 2.0);
  EXPECT_EQ((*registry_function("power:2")).domain(), Interval::real_line());
  EXPECT_EQ((*registry_function("power:0.5")).domain(), Interval::nonnegative());
  EXPECT_EQ((*registry_function("power:-1")).domain(), Interval::positive());
  EXPECT_EQ((*registry_function("power:0"))(0.0), 1.0);
  auto xl = functions::xlogx();
  EXPECT_EQ(xl(0.0), 0.0);
  EXPECT_NEAR(xl(std::numbers::e), std::numbers::e, 1e-15);
  auto lm = functions::logmean();
  EXPECT_EQ(lm(0.0), 0.0);
  EXPECT_EQ(lm(1.0), 1.0);
  EXPECT_NEAR(lm(1.0 + 1e-9), 1.0 + 0.5e-9, 1e-15);
  EXPECT_NEAR(lm.derivative(1.0), 0.5, 1e-8);
  EXPECT_EQ(functions::neg_inv()(2.0), -0.5);
}

TEST(Registry, AnalyticDerivativesMatchFiniteDifferences) {
  for (const char* name : {"sqrt", "log", "xlogx", "neg_inv", "exp", "power:1.5", "power:3"}) {
    ScalarFunction f = *registry_function(name);
    ScalarFunction plain("plain", f.domain(), [f](double t) { return f(t); });
    for (double x : {0.3, 1.0, 2.7}) {
      EXPECT_NEAR(f.derivative(x), plain.derivative(x), 1e-7 * std::max(1.0, std::abs(f.derivative(x)))) << name;
      EXPECT_NEAR(f.second_derivative(x), plain.second_derivative(x),
                  1e-4 * std::max(1.0, std::abs(f.second_derivative(x))))
          << name;
    }
  }
}

TEST(Expression, Grammar) {
  auto e = [](const char* s, double t) { return Expression::parse(s)(t); };
  EXPECT_EQ(e("1 + 2 * 3", 0), 7.0);
  EXPECT_EQ(e("(1 + 2) * 3", 0), 9.0);
  EXPECT_EQ(e("2 ^ 3 ^ 2", 0), 512.0);
  EXPECT_EQ(e("-t^2", 3), -9.0);
  EXPECT_EQ(e("2^-1", 0), 0.5);
  EXPECT_EQ(e("t/(t+1)", 1), 0.5);
  EXPECT_EQ(e("1e-3*t", 2), 2e-3);
  EXPECT_EQ(e("8 - 3 - 2", 0), 3.0);
  EXPECT_EQ(e("12 / 3 / 2", 0), 2.0);
  EXPECT_NEAR(e("sqrt(t) + log(t) + exp(0) + abs(-2)", 4), 2.0 + std::log(4.0) + 3.0, 1e-15);
  for (const char* bad : {"", "1 +", "2 t", "sin(t)", "(t", "t)", "x", "1..2", "t^"})
    EXPECT_THROW(Expression::parse(bad), InvalidArgument) << bad;
}

TEST(Expression, ParseFunction) {
  ScalarFunction f = parse_function("t^2 - 1", Interval::open(0.0, 4.0));
  EXPECT_EQ(f.domain(), Interval::open(0.0, 4.0));
  EXPECT_EQ(f(3.0), 8.0);
  ScalarFunction r = parse_function("sqrt");
  EXPECT_EQ(r.domain(), Interval::nonnegative());
  EXPECT_THROW(parse_function("log(t)", Interval::open(-3.0, -1.0)), InvalidArgument);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::stream(7, 3), b = Rng::stream(7, 3), c = Rng::stream(7, 4);
  double ua = a.uniform();
  EXPECT_EQ(ua, b.uniform());
  EXPECT_NE(ua, c.uniform());
  Rng r(1);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double x = r.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / 20000, 0.0, 0.05);
  EXPECT_NEAR(sq / 20000, 1.0, 0.05);
  for (int i = 0; i < 1000; ++i) {
    int k = r.uniform_int(2, 5);
    EXPECT_GE(k, 2);
    EXPECT_LE(k, 5);
  }
}

TEST(Parallel, LowestFailingIndexWins) {
  for (unsigned workers : {1u, 2u, 4u, 7u}) {
    Verdict v = run_trials(1000, [](int i) -> std::optional<Witness> {
      if (i % 97 != 13 && i != 500) return std::nullopt;
      Witness w;
      w.trial = i;
      return w;
    }, workers);
    ASSERT_FALSE(v.passed);
    EXPECT_EQ(v.witness->trial, 13);
    EXPECT_EQ(v.checks_run, 14);
  }
  Verdict ok = run_trials(50, [](int) -> std::optional<Witness> { return std::nullopt; }, 3);
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.checks_run, 50);
  EXPECT_THROW(run_trials(10, [](int i) -> std::optional<Witness> {
                 if (i == 4) throw NonConvergence("boom");
                 return std::nullopt;
               }, 2),
               NonConvergence);
}

TEST(JsonIo, MatrixRoundTrip) {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(2, 0.5), Complex(2, -0.5), Complex(-3, 0);
  auto j = io::matrix_to_json(m);
  EXPECT_EQ(j["n"], 2);
  EXPECT_TRUE(j.contains("im"));
  EXPECT_EQ(io::matrix_from_json(j), m);
  auto real = io::matrix_to_json(CMatrix::Identity(2, 2));
  EXPECT_FALSE(real.contains("im"));
  EXPECT_EQ(io::matrix_from_json(real), CMatrix::Identity(2, 2));
  EXPECT_THROW(io::matrix_from_json(nlohmann::json::parse(R"({"n":2,"re":[[1,2]]})")), InvalidArgument);
  EXPECT_THROW(io::matrix_from_json(nlohmann::json::parse(R"({"re":[[1]]})")), InvalidArgument);
  EXPECT_THROW(io::matrix_from_json(nlohmann::json::parse(R"({"n":1,"re":[["a"]]})")), InvalidArgument);
}

TEST(JsonIo, MeasureRoundTrip) {
  RepresentingMeasure m;
  m.atom_zero = 0.5;
  m.atoms = {{1.0, 0.25}, {3.0, 0.125}};
  m.density = PowerDensity{0.5};
  auto j = io::measure_to_json(m);
  EXPECT_EQ(j["density"]["kind"], "power_p");
  RepresentingMeasure back = io::measure_from_json(j);
  EXPECT_EQ(back.atom_zero, 0.5);
  EXPECT_EQ(back.atoms.size(), 2u);
  EXPECT_EQ(std::get<PowerDensity>(*back.density).p, 0.5);
  m.density = NodeDensity{{2.0}, {0.75}};
  EXPECT_EQ(io::measure_to_json(io::measure_from_json(io::measure_to_json(m))), io::measure_to_json(m));
  auto none = io::measure_to_json(RepresentingMeasure{});
  EXPECT_TRUE(none["density"].is_null());
  EXPECT_THROW(io::measure_from_json(nlohmann::json::parse(
                   R"({"atom_zero":-1,"atom_inf":0,"atoms":[],"density":null})")),
               InvalidArgument);
  EXPECT_THROW(io::measure_from_json(nlohmann::json::parse(
                   R"({"atom_zero":0,"atom_inf":0,"atoms":[],"density":{"kind":"other"}})")),
               InvalidArgument);
}

TEST(JsonIo, VerdictShape) {
  Verdict ok;
  ok.checks_run = 5;
  auto j = io::verdict_to_json(ok);
  EXPECT_EQ(j.dump(), R"({"checks_run":5,"passed":true,"witness":null})");
  Verdict bad;
  bad.passed = false;
  bad.checks_run = 3;
  Witness w;
  w.seed = 7;
  w.trial = 2;
  w.matrices = {CMatrix::Identity(1, 1)};
  w.lambda_min = -0.5;
  bad.witness = w;
  auto jb = io::verdict_to_json(bad);
  EXPECT_EQ(jb["witness"]["seed"], 7);
  EXPECT_EQ(jb["witness"]["trial"], 2);
  EXPECT_EQ(jb["witness"]["lambda_min"], -0.5);
  EXPECT_EQ(jb["witness"]["matrices"].size(), 1u);
}

TEST(JsonIo, SamplesCsv) {
  std::istringstream in("t,f\n1,2\n\n0.5,0.25\r\n");
  auto s = io::read_samples_csv(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].t, 0.5);
  EXPECT_EQ(s[1].f, 0.25);
  std::ostringstream out;
  io::write_samples_csv(out, s);
  std::istringstream again(out.str());
  EXPECT_EQ(io::read_samples_csv(again).size(), 2u);
  std::istringstream bad_header("x,y\n1,2\n");
  EXPECT_THROW(io::read_samples_csv(bad_header), InvalidArgument);
  std::istringstream bad_row("t,f\n1,2,3\n");
  EXPECT_THROW(io::read_samples_csv(bad_row), InvalidArgument);
  std::istringstream bad_num("t,f\n1,abc\n");
  EXPECT_THROW(io::read_samples_csv(bad_num), InvalidArgument);
}
