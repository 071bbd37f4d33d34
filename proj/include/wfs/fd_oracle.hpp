#pragma once

#include <vector>

#include "wfs/scalar_field.hpp"

namespace wfs {

/// Central-difference gradient and Hessian.  Only meant as an independent
/// reference for the jet arithmetic; the geometry never calls it.
struct FdDerivatives {
  std::vector<double> grad;
  std::vector<std::vector<double>> hess;
};

inline FdDerivatives fd_oracle(const ScalarField& field, const ChartSpec& chart, const Point& p,
                               double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_oracle: step must be positive");
  if (!chart.contains(p.x, 2.0 * h)) {
    throw DomainError("fd_oracle: stencil leaves the chart box");
  }
  const int n = p.dim();
  auto at = [&](int i, double di, int j, double dj) {
    Point q = p;
    if (i >= 0) q.x[i] += di;
    if (j >= 0) q.x[j] += dj;
    return field.eval(q).value();
  };
  FdDerivatives out;
  out.grad.assign(n, 0.0);
  out.hess.assign(n, std::vector<double>(n, 0.0));
  const double f0 = at(-1, 0, -1, 0);
  for (int i = 0; i < n; ++i) {
    out.grad[i] = (at(i, h, -1, 0) - at(i, -h, -1, 0)) / (2.0 * h);
    out.hess[i][i] = (at(i, h, -1, 0) - 2.0 * f0 + at(i, -h, -1, 0)) / (h * h);
    for (int j = 0; j < i; ++j) {
      const double v =
          (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      out.hess[i][j] = v;
      out.hess[j][i] = v;
    }
  }
  return out;
}

}  // namespace wfs
