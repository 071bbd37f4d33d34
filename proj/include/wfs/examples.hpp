#pragma once

#include <string>
#include <vector>

#include "wfs/structure.hpp"

namespace wfs {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExampleConfig {
  std::string family = "paper_R2ns";
  int n = 1;
  int s = 1;
  double beta = 1.0;
};

/// Orthonormal frame E_g, F_g of the contact distribution for the
/// Heisenberg-type family below.
struct AdaptedFrame {
  std::vector<VectorField> E, F;
};

namespace detail {

inline std::vector<std::string> numbered(const std::string& stem, int count) {
  std::vector<std::string> r;
  for (int k = 1; k <= count; ++k) r.push_back(stem + std::to_string(k));
  return r;
}

}  // namespace detail

/// R^{2n+s} with coordinates (x_1..x_n, y_1..y_n, z_1..z_s),
///   eta^i = (beta/2)(dz_i - sum y_g dx_g),  xi_i = (2/beta) d/dz_i,
///   g = sum_i eta^i (x) eta^i + 1/4 sum (dx_g^2 + dy_g^2),
///   f E_g = beta F_g,  f F_g = -beta E_g,  f xi_i = 0,
///   Q = beta^2 on the contact distribution and Q xi_i = xi_i,
/// with E_g = 2 d/dy_g and F_g = 2 (d/dx_g + y_g sum_i d/dz_i).
inline WeakFStructure build_paper_example(int n, int s, double beta) {
  if (n < 1 || s < 1) throw ConfigError("paper_R2ns: need n >= 1 and s >= 1");
  if (!(beta > 0.0)) throw ConfigError("paper_R2ns: beta must be positive");
  const int d = 2 * n + s;
  if (d > kMaxDim) throw ConfigError("paper_R2ns: dimension exceeds capacity");
  auto X = [](int g) { return g; };
  auto Y = [n](int g) { return n + g; };
  auto Z = [n](int i) { return 2 * n + i; };
  auto y = [&](int g) { return ScalarField::coordinate(Y(g)); };
  const double b2 = beta * beta;

  WeakFStructure S;
  S.n = n;
  S.s = s;
  S.label = "paper_R2ns";
  std::vector<std::string> names = detail::numbered("x", n);
  for (auto& v : detail::numbered("y", n)) names.push_back(v);
  for (auto& v : detail::numbered("z", s)) names.push_back(v);
  S.chart.coord_names = names;
  S.chart.box.assign(d, {-1.0, 1.0});

  S.g = MetricField(d);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      S.g(X(a), X(b)) = (a == b ? 0.25 : 0.0) + 0.25 * b2 * s * y(a) * y(b);
    }
    S.g(Y(a), Y(a)) = 0.25;
    for (int i = 0; i < s; ++i) S.g(X(a), Z(i)) = -0.25 * b2 * y(a);
  }
  for (int i = 0; i < s; ++i) S.g(Z(i), Z(i)) = 0.25 * b2;

  S.f = Tensor11(d);
  for (int a = 0; a < n; ++a) {
    S.f(X(a), Y(a)) = beta;
    S.f(Y(a), X(a)) = -beta;
    for (int i = 0; i < s; ++i) S.f(Z(i), Y(a)) = beta * y(a);
  }

  S.Q = Tensor11(d);
  for (int a = 0; a < n; ++a) {
    S.Q(X(a), X(a)) = b2;
    S.Q(Y(a), Y(a)) = b2;
    for (int i = 0; i < s; ++i) S.Q(Z(i), X(a)) = (b2 - 1.0) * y(a);
  }
  for (int i = 0; i < s; ++i) S.Q(Z(i), Z(i)) = 1.0;

  for (int i = 0; i < s; ++i) {
    VectorField xi(d);
    xi.c[Z(i)] = 2.0 / beta;
    S.xi.push_back(xi);
    OneForm eta(d);
    eta.c[Z(i)] = 0.5 * beta;
    for (int a = 0; a < n; ++a) eta.c[X(a)] = -0.5 * beta * y(a);
    S.eta.push_back(eta);
  }
  return S;
}

inline AdaptedFrame paper_frame(int n, int s) {
  const int d = 2 * n + s;
  AdaptedFrame fr;
  for (int a = 0; a < n; ++a) {
    VectorField e(d), f(d);
    e.c[n + a] = 2.0;
    f.c[a] = 2.0;
    for (int i = 0; i < s; ++i) f.c[2 * n + i] = 2.0 * ScalarField::coordinate(n + a);
    fr.E.push_back(e);
    fr.F.push_back(f);
  }
  return fr;
}

/// Unit tangent bundle of Euclidean E^{n+1} with the rescaled Sasaki
/// metric (a contact metric structure, Q = I, s = 1).
///
/// Chart: base coordinates x_1..x_{n+1} and a stereographic chart
/// u_1..u_n of the fibre sphere,
///   v(u) = (2u, |u|^2 - 1) / (1 + |u|^2).
/// With V_a = dv/du_a and c^2 = |V_a|^2 = 4/(1+|u|^2)^2:
///   g = 1/4 (dx^2 + c^2 du^2),  xi = 2 v^a d/dx_a,  eta = 1/2 v_a dx^a,
///   f d/du_a = -V_a^b d/dx_b,   f d/dx_b = c^{-2} V_a^b d/du_a.
inline WeakFStructure build_unit_tangent_flat(int n) {
  if (n < 1) throw ConfigError("unit_tangent_flat: need n >= 1");
  const int m = n + 1;
  const int d = m + n;
  if (d > kMaxDim) throw ConfigError("unit_tangent_flat: dimension exceeds capacity");
  auto u = [m](int a) { return ScalarField::coordinate(m + a); };

  ScalarField sigma = 1.0;
  for (int a = 0; a < n; ++a) sigma += u(a) * u(a);
  const ScalarField inv_sigma = 1.0 / sigma;
  std::vector<ScalarField> v(m);
  for (int a = 0; a < n; ++a) v[a] = 2.0 * u(a) * inv_sigma;
  v[n] = 1.0 - 2.0 * inv_sigma;
  // V[al][b] = d v^b / d u_al
  std::vector<std::vector<ScalarField>> V(n, std::vector<ScalarField>(m));
  for (int al = 0; al < n; ++al) {
    for (int b = 0; b < n; ++b) {
      V[al][b] = -4.0 * u(b) * u(al) * inv_sigma * inv_sigma;
      if (b == al) V[al][b] = V[al][b] + 2.0 * inv_sigma;
    }
    V[al][n] = 4.0 * u(al) * inv_sigma * inv_sigma;
  }
  const ScalarField inv_c2 = 0.25 * sigma * sigma;

  WeakFStructure S;
  S.n = n;
  S.s = 1;
  S.label = "unit_tangent_flat";
  std::vector<std::string> names = detail::numbered("x", m);
  for (auto& w : detail::numbered("u", n)) names.push_back(w);
  S.chart.coord_names = names;
  S.chart.box.assign(d, {-1.0, 1.0});
  for (int a = 0; a < n; ++a) S.chart.box[m + a] = {-0.9, 0.9};

  S.g = MetricField(d);
  for (int a = 0; a < m; ++a) S.g(a, a) = 0.25;
  for (int al = 0; al < n; ++al) S.g(m + al, m + al) = inv_sigma * inv_sigma;

  S.f = Tensor11(d);
  for (int al = 0; al < n; ++al) {
    for (int b = 0; b < m; ++b) {
      S.f(b, m + al) = -V[al][b];
      S.f(m + al, b) = inv_c2 * V[al][b];
    }
  }
  S.Q = Tensor11::identity(d);

  VectorField xi(d);
  OneForm eta(d);
  for (int b = 0; b < m; ++b) {
    xi.c[b] = 2.0 * v[b];
    eta.c[b] = 0.5 * v[b];
  }
  S.xi.push_back(xi);
  S.eta.push_back(eta);
  return S;
}

inline WeakFStructure build_example(const ExampleConfig& cfg) {
  if (cfg.family == "paper_R2ns") return build_paper_example(cfg.n, cfg.s, cfg.beta);
  if (cfg.family == "unit_tangent_flat") {
    if (cfg.s != 1) throw ConfigError("unit_tangent_flat: s must be 1");
    return build_unit_tangent_flat(cfg.n);
  }
  throw ConfigError("unknown example family '" + cfg.family + "'");
}

}  // namespace wfs
