#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "wfs/fd_oracle.hpp"
#include "wfs/sampling.hpp"

using namespace wfs;

namespace {

ChartSpec box_chart(int n, double lo = -1.0, double hi = 1.0) {
  ChartSpec c;
  for (int i = 0; i < n; ++i) c.coord_names.push_back("x" + std::to_string(i));
  c.box.assign(n, {lo, hi});
  return c;
}

ScalarField x(int i) { return ScalarField::coordinate(i); }

/// Random polynomial of degree <= 3 in three variables.
ScalarField random_poly(Rng& rng) {
  ScalarField p = rng.uniform(-1, 1);
  for (int i = 0; i < 3; ++i) {
    p += rng.uniform(-1, 1) * x(i);
    for (int j = 0; j <= i; ++j) {
      p += rng.uniform(-1, 1) * x(i) * x(j);
      for (int k = 0; k <= j; ++k) p += rng.uniform(-1, 1) * x(i) * x(j) * x(k);
    }
  }
  return p;
}

/// |a - b| within k ulps of the larger magnitude.
bool within_ulps(double a, double b, double k) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) <= k * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

TEST(Jet, SquareOfCoordinateIsExact) {
  const ScalarField f = x(1) * x(1);
  const Point p({0.3, -0.7});
  const Jet j = f.eval(p);
  EXPECT_DOUBLE_EQ(j.value(), 0.49);
  EXPECT_DOUBLE_EQ(j.d(0), 0.0);
  EXPECT_DOUBLE_EQ(j.d(1), -1.4);
  EXPECT_DOUBLE_EQ(j.d2(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(j.d2(0, 1), 0.0);
}

TEST(Jet, PolynomialDerivativesMatchClosedForm) {
  // p = x0^2 x1 + 3 x1 x2^3
  const ScalarField p = x(0) * x(0) * x(1) + 3.0 * x(1) * x(2) * x(2) * x(2);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
    const Jet j = p.eval(Point({a, b, c}));
    EXPECT_NEAR(j.d(0), 2 * a * b, 1e-14);
    EXPECT_NEAR(j.d(1), a * a + 3 * c * c * c, 1e-14);
    EXPECT_NEAR(j.d(2), 9 * b * c * c, 1e-14);
    EXPECT_NEAR(j.d2(0, 0), 2 * b, 1e-14);
    EXPECT_NEAR(j.d2(0, 1), 2 * a, 1e-14);
    EXPECT_NEAR(j.d2(1, 2), 9 * c * c, 1e-14);
    EXPECT_NEAR(j.d2(2, 2), 18 * b * c, 1e-14);
    EXPECT_NEAR(j.d2(0, 2), 0.0, 1e-14);
  }
}

TEST(Jet, RandomPolynomialsAgreeWithFiniteDifferences) {
  const ChartSpec chart = box_chart(3);
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const ScalarField p = random_poly(rng);
    const Point q({rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)});
    const Jet j = p.eval(q);
    const FdDerivatives fd = fd_oracle(p, chart, q, 1e-4);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(j.d(i), fd.grad[i], 1e-6);
      for (int l = 0; l < 3; ++l) EXPECT_NEAR(j.d2(i, l), fd.hess[i][l], 1e-4);
    }
  }
}

TEST(Jet, TranscendentalChainRuleAgreesWithFiniteDifferences) {
  const ChartSpec chart = box_chart(2, 0.1, 2.0);
  const ScalarField f = sin(x(0) * x(1)) + exp(x(0)) * log(x(1)) + sqrt(x(0) + x(1)) / (1.0 + x(1) * x(1));
  Rng rng(5);
  for (int k = 0; k < 40; ++k) {
    const Point q({rng.uniform(0.3, 1.8), rng.uniform(0.3, 1.8)});
    const Jet j = f.eval(q);
    const FdDerivatives fd = fd_oracle(f, chart, q, 1e-4);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(j.d(i), fd.grad[i], 1e-6);
      for (int l = 0; l < 2; ++l) EXPECT_NEAR(j.d2(i, l), fd.hess[i][l], 1e-4);
    }
  }
}

TEST(Jet, LinearityWithinFourUlps) {
  Rng rng(21);
  for (int k = 0; k < 100; ++k) {
    const ScalarField p = random_poly(rng), q = random_poly(rng);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const Point pt({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Jet jp = p.eval(pt), jq = q.eval(pt);
    const Jet s = a * jp + b * jq;
    for (int i = 0; i < 3; ++i) {
      const double terms = std::abs(a * jp.d(i)) + std::abs(b * jq.d(i));
      EXPECT_LE(std::abs(s.d(i) - (a * jp.d(i) + b * jq.d(i))),
                4 * std::numeric_limits<double>::epsilon() * std::max(terms, 1e-300));
    }
  }
}

TEST(Jet, LeibnizRuleWithinEightUlps) {
  Rng rng(23);
  for (int k = 0; k < 100; ++k) {
    const ScalarField p = random_poly(rng), q = random_poly(rng);
    const Point pt({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Jet jp = p.eval(pt), jq = q.eval(pt);
    const Jet r = jp * jq;
    for (int i = 0; i < 3; ++i) {
      const double expect = jp.d(i) * jq.value() + jp.value() * jq.d(i);
      const double terms = std::abs(jp.d(i) * jq.value()) + std::abs(jp.value() * jq.d(i));
      EXPECT_LE(std::abs(r.d(i) - expect), 8 * std::numeric_limits<double>::epsilon() * std::max(terms, 1e-300));
    }
    EXPECT_TRUE(within_ulps(r.value(), jp.value() * jq.value(), 1));
  }
}

TEST(Jet, HessianIsSymmetricByStorage) {
  const ScalarField f = x(0) * x(1) * x(1) + sin(x(0) - x(1));
  const Jet j = f.eval(Point({0.2, 0.5}));
  EXPECT_EQ(j.d2(0, 1), j.d2(1, 0));
}

TEST(Jet, OrderIsTrackedThroughPartials) {
  const Jet j = (x(0) * x(1)).eval(Point({0.5, 2.0}));
  EXPECT_EQ(j.order(), 2);
  const Jet d0 = j.partial(0);
  EXPECT_EQ(d0.order(), 1);
  EXPECT_DOUBLE_EQ(d0.value(), 2.0);
  EXPECT_DOUBLE_EQ(d0.d(1), 1.0);
  const Jet dd = d0.partial(1);
  EXPECT_EQ(dd.order(), 0);
  EXPECT_THROW(dd.partial(0), std::logic_error);
  // mixing orders keeps the smaller one
  EXPECT_EQ((j + d0).order(), 1);
}

TEST(Jet, DomainErrors) {
  const Point p({0.0, -1.0});
  EXPECT_THROW(log(x(1)).eval(p), DomainError);
  EXPECT_THROW(sqrt(x(1)).eval(p), DomainError);
  EXPECT_THROW((1.0 / x(0)).eval(p), DomainError);
  EXPECT_THROW(Jet::variable(3, 3, 0.0), std::out_of_range);
  EXPECT_THROW(Jet::constant(kMaxDim + 1, 0.0), std::out_of_range);
}

TEST(FdOracle, RejectsStencilOutsideChart) {
  const ChartSpec chart = box_chart(2);
  EXPECT_THROW(fd_oracle(x(0), chart, Point({0.99995, 0.0}), 1e-4), DomainError);
  EXPECT_THROW(fd_oracle(x(0), chart, Point({0.0, 0.0}), 0.0), std::invalid_argument);
}

TEST(Sampling, SameSeedSameSamples) {
  const ChartSpec chart = box_chart(3);
  const SampleSet a = draw_samples(chart, 10, 99), b = draw_samples(chart, 10, 99), c = draw_samples(chart, 10, 100);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(a.points[k].x, b.points[k].x);
    for (int f = 0; f < kFieldsPerPoint; ++f) EXPECT_EQ(a.coeffs[k][f], b.coeffs[k][f]);
  }
  EXPECT_NE(a.points[0].x, c.points[0].x);
  for (const auto& p : a.points) EXPECT_TRUE(chart.contains(p.x));
}
