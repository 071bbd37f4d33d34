#include <gtest/gtest.h>

#include "wfs/fd_oracle.hpp"
#include "wfs/fields.hpp"
#include "wfs/sampling.hpp"

using namespace wfs;

namespace {

ScalarField x(int i) { return ScalarField::coordinate(i); }

ChartSpec cube(int n) {
  ChartSpec c;
  for (int i = 0; i < n; ++i) c.coord_names.push_back("x" + std::to_string(i));
  c.box.assign(n, {-1.0, 1.0});
  return c;
}

VectorField sample_field() {
  VectorField v(3);
  v.c[0] = x(1) * x(2) + 0.3;
  v.c[1] = sin(x(0)) - x(2) * x(2);
  v.c[2] = exp(0.5 * x(1)) * x(0);
  return v;
}

VectorField other_field() {
  VectorField v(3);
  v.c[0] = cos(x(2)) + x(0) * x(0);
  v.c[1] = x(0) * x(1) * x(2);
  v.c[2] = 1.0 - x(1);
  return v;
}

TwoForm sample_twoform() {
  TwoForm f(3);
  f.upper(0, 1) = x(2) * x(2) + sin(x(0));
  f.upper(0, 2) = x(0) * x(1);
  f.upper(1, 2) = exp(x(1)) - x(2);
  return f;
}

/// Finite-difference directional derivative X(s) at p.
double fd_directional(const VectorField& v, const ScalarField& s, const ChartSpec& chart, const Point& p) {
  const FdDerivatives fd = fd_oracle(s, chart, p, 1e-5);
  double r = 0.0;
  for (int j = 0; j < p.dim(); ++j) r += v.c[j].eval(p).value() * fd.grad[j];
  return r;
}

}  // namespace

TEST(Fields, BracketMatchesFiniteDifferences) {
  const ChartSpec chart = cube(3);
  const VectorField a = sample_field(), b = other_field();
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Point p({rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)});
    const Vec br = lie_bracket(a, b, p);
    for (int i = 0; i < 3; ++i) {
      const double expect = fd_directional(a, b.c[i], chart, p) - fd_directional(b, a.c[i], chart, p);
      EXPECT_NEAR(br[i], expect, 1e-7);
    }
  }
}

TEST(Fields, BracketOfCoordinateFieldsVanishes) {
  const Point p({0.1, 0.2, 0.3});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(lie_bracket(VectorField::coordinate(3, i), VectorField::coordinate(3, j), p).norm(), 0.0);
    }
  }
}

TEST(Fields, DifferentialOfOneFormOnCoordinateFields) {
  // d omega(d_i, d_j) = 1/2 (d_i omega_j - d_j omega_i)
  OneForm w(3);
  w.c[0] = x(1) * x(1) * x(2);
  w.c[1] = sin(x(0) * x(2));
  w.c[2] = x(0) - x(1);
  const ChartSpec chart = cube(3);
  const Point p({0.4, -0.3, 0.6});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double di = fd_oracle(w.c[j], chart, p, 1e-5).grad[i];
      const double dj = fd_oracle(w.c[i], chart, p, 1e-5).grad[j];
      EXPECT_NEAR(d_oneform(w, VectorField::coordinate(3, i), VectorField::coordinate(3, j), p),
                  0.5 * (di - dj), 1e-8);
    }
  }
}

TEST(Fields, DifferentialOfTwoFormTermByTerm) {
  const TwoForm phi = sample_twoform();
  const ChartSpec chart = cube(3);
  const VectorField a = sample_field(), b = other_field();
  VectorField c(3);
  c.c[0] = x(2);
  c.c[1] = 1.0;
  c.c[2] = x(0) * x(1);
  auto phi_of = [&](const VectorField& u, const VectorField& v) {
    // Phi(U, V) as a scalar field, built from components
    ScalarField s;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        s += phi.c[static_cast<size_t>(i) * 3 + j] * (u.c[i] * v.c[j] - u.c[j] * v.c[i]);
      }
    }
    return s;
  };
  auto phi_val = [&](const Vec& u, const Vec& v, const Point& p) {
    const Mat m = values(phi.at(p));
    return u.dot(m * v);
  };
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const Point p({rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)});
    const double t = fd_directional(a, phi_of(b, c), chart, p) + fd_directional(b, phi_of(c, a), chart, p) +
                     fd_directional(c, phi_of(a, b), chart, p) - phi_val(lie_bracket(a, b, p), values(c.at(p)), p) -
                     phi_val(lie_bracket(c, a, p), values(b.at(p)), p) -
                     phi_val(lie_bracket(b, c, p), values(a.at(p)), p);
    EXPECT_NEAR(d_twoform(phi, a, b, c, p), t / 3.0, 1e-7);
  }
}

TEST(Fields, ExteriorDerivativeSquaresToZero) {
  // d(d f) = 0 with f arbitrary: omega = df, then d omega = 0.
  const ScalarField f = sin(x(0) * x(1)) + x(2) * x(2) * x(0);
  Rng rng(9);
  for (int k = 0; k < 10; ++k) {
    const Point p({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Jet fj = f.eval(p);
    JetVec w;
    for (int i = 0; i < 3; ++i) w.push_back(fj.partial(i));
    const JetVec a = sample_field().at(p), b = other_field().at(p);
    EXPECT_NEAR(d_oneform(w, a, b).value(), 0.0, 1e-13);
  }
}

TEST(Fields, LieDerivativeComponentsAgreeWithBracketForm) {
  Tensor11 t(3);
  t(0, 1) = x(2);
  t(1, 0) = -x(2);
  t(2, 2) = x(0) * x(1) + 1.0;
  t(0, 2) = sin(x(1));
  const VectorField v = sample_field(), y = other_field();
  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    const Point p({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Vec via_bracket = lie_derivative_tensor11(v, t, y, p);
    const Vec via_components = values(lie_derivative_tensor(v.at(p), t.at(p))) * values(y.at(p));
    EXPECT_LT((via_bracket - via_components).lpNorm<Eigen::Infinity>(), 1e-13);
  }
}

TEST(Fields, LieDerivativeOfOneFormIsCartanFormula) {
  // L_V omega = i_V d omega + d(omega(V)), with d carrying the 1/2.
  OneForm w(3);
  w.c[0] = x(1) * x(2);
  w.c[1] = x(0) * x(0);
  w.c[2] = cos(x(1));
  const VectorField v = sample_field(), y = other_field();
  const Point p({0.2, -0.4, 0.5});
  const JetVec wj = w.at(p), vj = v.at(p), yj = y.at(p);
  const double lhs = lie_derivative_oneform(vj, wj, yj).value();
  const double rhs = 2.0 * d_oneform(wj, vj, yj).value() + directional(yj, dot(wj, vj)).value();
  EXPECT_NEAR(lhs, rhs, 1e-13);
}

TEST(Fields, AdjointIsMetricTranspose) {
  MetricField g(2);
  g(0, 0) = 2.0 + x(1) * x(1);
  g(0, 1) = 0.3;
  g(1, 1) = 1.0;
  Tensor11 t(2);
  t(0, 0) = 1.0;
  t(0, 1) = x(0);
  t(1, 0) = 2.0;
  t(1, 1) = -1.0;
  const Point p({0.5, 0.7});
  const Mat a = adjoint11(g, t, p);
  const Mat gv = values(g.at(p)), tv = values(t.at(p));
  EXPECT_LT((gv * a - tv.transpose() * gv).norm(), 1e-14);
}

TEST(Fields, DimensionMismatchThrows) {
  EXPECT_THROW(sample_field().at(Point({0.0, 0.0})), std::invalid_argument);
  TwoForm f(3);
  EXPECT_THROW(f.upper(2, 1), std::out_of_range);
}
