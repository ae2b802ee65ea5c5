#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "loewner/divided_differences.hpp"
#include "loewner/registry.hpp"
#include "support.hpp"

using namespace loewner;

namespace {

ScalarFunction cube_on(const Interval& j) {
  return {"t^3", j, [](double t) { return t * t * t; }, [](double t) { return 3 * t * t; },
          [](double t) { return 6 * t; }};
}

// Loewner matrix of a 2-point grid from the divided-difference formula by hand.
double det2(double (*f)(double), double x, double y, double (*df)(double)) {
  double d = (f(x) - f(y)) / (x - y);
  return df(x) * df(y) - d * d;
}

}  // namespace

TEST(Dd1, Examples) {
  auto id = functions::identity();
  EXPECT_DOUBLE_EQ(dd1(id, -3.0, 7.5), 1.0);
  EXPECT_DOUBLE_EQ(dd1(id, 2.0, 2.0), 1.0);
  auto sq = functions::power(2);
  EXPECT_DOUBLE_EQ(dd1(sq, 1.0, 3.0), 4.0);
  EXPECT_DOUBLE_EQ(dd1(sq, 1.0, 1.0), 2.0);
  EXPECT_THROW(dd1(functions::sqrt(), -1.0, 1.0), DomainViolation);
}

TEST(Dd1, CoalescenceContinuity) {
  auto e = functions::exp();
  for (double x : {-1.0, 0.0, 0.5, 2.0}) {
    double limit = dd1(e, x, x);
    EXPECT_DOUBLE_EQ(limit, std::exp(x));
    for (double h : {1e-3, 1e-6}) EXPECT_LE(std::abs(dd1(e, x, x + h) - limit), std::exp(x + h) * h);
  }
}

TEST(Dd1, FiniteDifferenceFallback) {
  ScalarFunction f("sin", Interval::real_line(), [](double t) { return std::sin(t); });
  EXPECT_NEAR(dd1(f, 0.3, 0.3), std::cos(0.3), 1e-9);
  ScalarFunction g("sqrt-no-derivative", Interval::nonnegative(), [](double t) { return std::sqrt(t); });
  EXPECT_NEAR(dd1(g, 4.0, 4.0), 0.25, 1e-9);
}

TEST(Dd2, Examples) {
  auto sq = functions::power(2);
  EXPECT_NEAR(dd2(sq, 0.1, 2.0, 7.0), 1.0, 1e-14);
  EXPECT_NEAR(dd2(sq, 3.0, 3.0, 3.0), 1.0, 1e-14);
  auto cube = cube_on(Interval::real_line());
  EXPECT_NEAR(dd2(cube, 1.0, 2.0, 3.0), 6.0, 1e-13);
  EXPECT_DOUBLE_EQ(dd2(cube, 1.0, 1.0, 1.0), 3.0);
  EXPECT_NEAR(dd2(cube, 1.0, 1.0, 2.0), 4.0, 1e-13);
}

TEST(Dd2, Symmetric) {
  auto e = functions::exp();
  double v = dd2(e, 0.2, 1.1, -0.7);
  EXPECT_EQ(v, dd2(e, 1.1, -0.7, 0.2));
  EXPECT_EQ(v, dd2(e, -0.7, 0.2, 1.1));
  EXPECT_EQ(v, dd2(e, 0.2, -0.7, 1.1));
}

TEST(LoewnerMatrix, Examples) {
  std::vector<double> three{1, 2, 3};
  EXPECT_EQ(loewner_matrix(functions::identity(), three).matrix(), CMatrix::Ones(3, 3));

  std::vector<double> pts{1, 4};
  HermitianMatrix r = loewner_matrix(functions::sqrt(), pts);
  EXPECT_NEAR(r(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(r(0, 1).real(), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r(1, 1).real(), 0.25, 1e-12);
  EXPECT_TRUE(is_psd(r));

  HermitianMatrix s = loewner_matrix(functions::power(2), pts);
  EXPECT_NEAR(s(0, 0).real(), 2.0, 1e-12);
  EXPECT_NEAR(s(0, 1).real(), 5.0, 1e-12);
  EXPECT_NEAR(s(1, 1).real(), 8.0, 1e-12);
  EXPECT_FALSE(is_psd(s));
}

TEST(LoewnerMatrix, ExactlySymmetric) {
  std::vector<double> pts{0.3, 1.7, 2.2, 5.0};
  CMatrix m = loewner_matrix(functions::log(), pts).matrix();
  EXPECT_EQ(m, m.transpose());
}

TEST(LoewnerMatrix, RejectsDegeneratePoints) {
  std::vector<double> dup{1.0, 1.0 + 1e-9};
  EXPECT_THROW(loewner_matrix(functions::sqrt(), dup), DegeneratePoints);
  std::vector<double> down{2.0, 1.0};
  EXPECT_THROW(loewner_matrix(functions::sqrt(), down), DegeneratePoints);
}

TEST(KrausMatrix, Examples) {
  std::vector<double> pts{0.5, 1.5, 4.0};
  CMatrix ones = kraus_matrix(functions::power(2), 2.0, pts).matrix();
  EXPECT_LE((ones - CMatrix::Ones(3, 3)).norm(), 1e-13);

  auto cube_sym = cube_on(Interval::open(-1.0, 1.0));
  std::vector<double> neg{-0.9, 0.0};
  HermitianMatrix k1 = kraus_matrix(cube_sym, -0.9, neg);
  EXPECT_NEAR(k1(0, 0).real(), -2.7, 1e-12);
  EXPECT_FALSE(is_psd(k1));

  auto cube_pos = cube_on(Interval::positive());
  std::vector<double> pos{1.0, 2.0};
  HermitianMatrix k2 = kraus_matrix(cube_pos, 1.0, pos);
  EXPECT_NEAR(k2(0, 0).real(), 3.0, 1e-12);
  EXPECT_NEAR(k2(0, 1).real(), 4.0, 1e-12);
  EXPECT_NEAR(k2(1, 1).real(), 5.0, 1e-12);
  EXPECT_FALSE(is_psd(k2));
}

TEST(SampleGrid, InteriorSortedSeparated) {
  Rng rng(1);
  Interval j = Interval::closed(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto pts = sample_grid(j, 6, rng);
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_GE(pts.front(), 1e-6);
    EXPECT_LE(pts.back(), 1.0 - 1e-6);
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i], pts[i - 1]);
  }
  EXPECT_THROW(sample_grid(Interval::positive(), 3, rng), InvalidArgument);
}

TEST(CheckNMonotone, SqrtPasses) {
  Verdict v = check_n_monotone(functions::sqrt(), Interval::open(0.01, 100.0), 4, 200, 7);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.checks_run, 200);
  EXPECT_FALSE(v.witness);
}

TEST(CheckNMonotone, SquareFailsWithCertifiedWitness) {
  Verdict v = check_n_monotone(functions::power(2), Interval::open(0.0, 10.0), 2, 200, 7);
  ASSERT_FALSE(v.passed);
  ASSERT_TRUE(v.witness);
  const auto& w = *v.witness;
  ASSERT_EQ(w.points.size(), 2u);
  double x = w.points[0], y = w.points[1];
  // [[2x, x+y],[x+y, 2y]] has determinant -(x-y)^2.
  EXPECT_NEAR(w.lambda_min, x + y - std::hypot(x - y, x + y), 1e-12 * (x + y));
  EXPECT_LT(det2([](double t) { return t * t; }, x, y, [](double t) { return 2 * t; }), 0.0);
  EXPECT_EQ(w.seed, 7u);
  EXPECT_EQ(v.checks_run, w.trial + 1);
}

TEST(CheckNMonotone, ExpFails) {
  Verdict v = check_n_monotone(functions::exp(), Interval::open(0.0, 2.0), 2, 200, 3);
  ASSERT_FALSE(v.passed);
  const auto& w = *v.witness;
  double d = det2([](double t) { return std::exp(t); }, w.points[0], w.points[1],
                  [](double t) { return std::exp(t); });
  EXPECT_LT(d, 0.0);
  // Hand value for the grid {0, 1}.
  EXPECT_NEAR(det2([](double t) { return std::exp(t); }, 0.0, 1.0, [](double t) { return std::exp(t); }),
              std::exp(1.0) - (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0), 1e-15);
}

TEST(CheckNMonotone, Preconditions) {
  EXPECT_THROW(check_n_monotone(functions::sqrt(), Interval::open(0.0, 1.0), 1, 10, 1), InvalidArgument);
  EXPECT_THROW(check_n_monotone(functions::sqrt(), Interval::open(-1.0, 1.0), 2, 10, 1), DomainViolation);
}

TEST(CheckNMonotone, DegreesNest) {
  const auto sq = functions::power(2);
  Verdict v = check_n_monotone(sq, Interval::open(0.0, 10.0), 2, 50, 21);
  ASSERT_FALSE(v.passed);
  std::vector<double> grid = v.witness->points;
  Rng rng(5);
  for (int extra = 0; extra < 4; ++extra) {
    double p;
    do {
      p = rng.uniform(0.01, 9.99);
    } while (std::any_of(grid.begin(), grid.end(), [&](double g) { return std::abs(g - p) < 1e-3; }));
    grid.push_back(p);
    std::sort(grid.begin(), grid.end());
    EXPECT_FALSE(is_psd(loewner_matrix(sq, grid), kCertifyTol)) << "grid size " << grid.size();
  }
  for (int n = 3; n <= 6; ++n) EXPECT_FALSE(check_n_monotone(sq, Interval::open(0.0, 10.0), n, 50, 21).passed);
}

TEST(CheckNMonotone, DeterministicAcrossWorkerCounts) {
  auto f = functions::power(3);
  auto run = [&](unsigned workers) {
    return run_trials(300, [&](int trial) -> std::optional<Witness> {
      Rng rng = Rng::stream(9, static_cast<std::uint64_t>(trial));
      auto pts = sample_grid(Interval::open(-1.0, 1.0), 3, rng);
      HermitianMatrix m = loewner_matrix(f, pts);
      if (is_psd(m)) return std::nullopt;
      Witness w;
      w.trial = trial;
      w.points = pts;
      return w;
    }, workers);
  };
  Verdict one = run(1);
  for (unsigned workers : {2u, 3u, 8u}) {
    Verdict many = run(workers);
    EXPECT_EQ(one.passed, many.passed);
    EXPECT_EQ(one.checks_run, many.checks_run);
    ASSERT_EQ(one.witness.has_value(), many.witness.has_value());
    if (one.witness) EXPECT_EQ(one.witness->points, many.witness->points);
  }
}

TEST(CheckNConvex, Examples) {
  EXPECT_TRUE(check_n_convex(functions::power(2), Interval::open(-5.0, 5.0), 3, 100, 1).passed);
  Verdict cube = check_n_convex(cube_on(Interval::open(-1.0, 1.0)), Interval::open(-1.0, 1.0), 2, 200, 1);
  ASSERT_FALSE(cube.passed);
  EXPECT_EQ(cube.witness->check, "kraus");
  ASSERT_TRUE(cube.witness->base);
  // dd2 of t^3 is the sum of its arguments; some entry must be negative.
  HermitianMatrix again = kraus_matrix(cube_on(Interval::open(-1.0, 1.0)), *cube.witness->base, cube.witness->points);
  EXPECT_FALSE(is_psd(again, kCertifyTol));

  ScalarFunction inv("1/t", Interval::positive(), [](double t) { return 1.0 / t; },
                     [](double t) { return -1.0 / (t * t); }, [](double t) { return 2.0 / (t * t * t); });
  EXPECT_TRUE(check_n_convex(inv, Interval::open(0.1, 10.0), 3, 200, 2).passed);
}

TEST(CheckNConvex, ConvexImpliesSlicedMonotone) {
  ScalarFunction inv("1/t", Interval::positive(), [](double t) { return 1.0 / t; },
                     [](double t) { return -1.0 / (t * t); }, [](double t) { return 2.0 / (t * t * t); });
  const Interval j = Interval::open(0.1, 10.0);
  Rng rng(77);
  for (const ScalarFunction& f : {inv, functions::power(1.5), functions::xlogx()}) {
    for (int n = 2; n <= 4; ++n) ASSERT_TRUE(check_n_convex(f, j, n, 100, 13).passed) << f.name();
    for (int rep = 0; rep < 3; ++rep) {
      double lambda = rng.uniform(0.2, 9.0);
      ScalarFunction slice("slice", f.domain(), [f, lambda](double x) { return dd1(f, lambda, x); });
      for (int n = 2; n <= 3; ++n)
        EXPECT_TRUE(check_n_monotone(slice, j, n, 100, 14).passed) << f.name() << " at " << lambda;
    }
  }
}
