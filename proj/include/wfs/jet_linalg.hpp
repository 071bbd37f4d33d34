#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wfs/jet.hpp"

namespace wfs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Components of a vector (or covector) field near a point, each as a jet.
using JetVec = std::vector<Jet>;

/// Square matrix of jets, row-major.  Used for (1,1) tensors T^k_l
/// (row k, column l) and for covariant 2-tensors.
class JetMat {
 public:
  JetMat() = default;
  explicit JetMat(int n, int dim = 0) : n_(n), a_(static_cast<size_t>(n) * n, Jet::constant(dim, 0.0)) {}

  static JetMat identity(int n, int dim) {
    JetMat m(n, dim);
    for (int i = 0; i < n; ++i) m(i, i) = Jet::constant(dim, 1.0);
    return m;
  }

  int size() const { return n_; }
  Jet& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  int order() const {
    int o = 2;
    for (const Jet& x : a_) o = x.order() < o ? x.order() : o;
    return o;
  }

 private:
  int n_ = 0;
  std::vector<Jet> a_;
};

inline int jet_dim(const JetVec& v) { return v.empty() ? 0 : v.front().dim(); }

inline Vec values(const JetVec& v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) r[static_cast<Eigen::Index>(i)] = v[i].value();
  return r;
}

inline Mat values(const JetMat& m) {
  Mat r(m.size(), m.size());
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) r(i, j) = m(i, j).value();
  }
  return r;
}

/// Constant jets with the given values.
inline JetVec constant_jets(const Vec& v, int dim) {
  JetVec r;
  r.reserve(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) r.push_back(Jet::constant(dim, v[i]));
  return r;
}

inline JetMat constant_jets(const Mat& m, int dim) {
  JetMat r(static_cast<int>(m.rows()), dim);
  for (int i = 0; i < r.size(); ++i) {
    for (int j = 0; j < r.size(); ++j) r(i, j) = Jet::constant(dim, m(i, j));
  }
  return r;
}

/// Value-only jets: derivatives are marked unavailable.
inline JetVec value_jets(const Vec& v, int dim) {
  JetVec r = constant_jets(v, dim);
  for (Jet& x : r) x = x.truncated(0);
  return r;
}

/// Jacobian D(k, j) = d_j v^k from first derivatives.
inline Mat jacobian(const JetVec& v) {
  const int n = static_cast<int>(v.size());
  Mat r(n, jet_dim(v));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < r.cols(); ++j) r(k, j) = v[k].d(j);
  }
  return r;
}

inline Jet dot(const JetVec& a, const JetVec& b) {
  Jet s = Jet::constant(jet_dim(a), 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline JetVec operator+(const JetVec& a, const JetVec& b) {
  JetVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline JetVec operator-(const JetVec& a, const JetVec& b) {
  JetVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline JetVec operator*(const Jet& c, const JetVec& a) {
  JetVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline JetVec operator*(double c, const JetVec& a) {
  JetVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline JetVec operator*(const JetMat& m, const JetVec& v) {
  const int n = m.size();
  JetVec r(n);
  for (int k = 0; k < n; ++k) {
    Jet s = Jet::constant(jet_dim(v), 0.0);
    for (int l = 0; l < n; ++l) s += m(k, l) * v[l];
    r[k] = s;
  }
  return r;
}

inline JetMat operator*(const JetMat& a, const JetMat& b) {
  const int n = a.size();
  JetMat r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet s = a(i, 0) * b(0, j);
      for (int k = 1; k < n; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

inline JetMat operator+(const JetMat& a, const JetMat& b) {
  JetMat r(a.size());
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) r(i, j) = a(i, j) + b(i, j);
  }
  return r;
}

inline JetMat operator-(const JetMat& a, const JetMat& b) {
  JetMat r(a.size());
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) r(i, j) = a(i, j) - b(i, j);
  }
  return r;
}

inline JetMat operator*(double c, const JetMat& a) {
  JetMat r = a;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) r(i, j) *= c;
  }
  return r;
}

inline JetMat transpose(const JetMat& a) {
  JetMat r(a.size());
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) r(i, j) = a(j, i);
  }
  return r;
}

/// Outer product u v^T, e.g. xi (x) eta as a (1,1) tensor.
inline JetMat outer(const JetVec& u, const JetVec& v) {
  const int n = static_cast<int>(u.size());
  JetMat r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = u[i] * v[j];
  }
  return r;
}

/// Inverse by Gauss-Jordan elimination carried out in jet arithmetic, so
/// the derivatives of the inverse come out exactly.  Pivots on values.
/// Returns false when a pivot falls below `tiny` relative to the scale.
inline bool invert(const JetMat& m, JetMat* out, double tiny = 1e-13) {
  const int n = m.size();
  const int dim = n > 0 ? m(0, 0).dim() : 0;
  JetMat a = m;
  JetMat inv = JetMat::identity(n, dim);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j).value()));
  }
  if (scale == 0.0) return false;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c).value()) > std::abs(a(piv, c).value())) piv = r;
    }
    if (std::abs(a(piv, c).value()) <= tiny * scale) return false;
    if (piv != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(c, j), a(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    }
    const Jet p = a(c, c);
    for (int j = 0; j < n; ++j) {
      a(c, j) /= p;
      inv(c, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet f = a(r, c);
      if (f.value() == 0.0 && f.order() == 0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  *out = inv;
  return true;
}

/// |a - b| in the sup norm, divided by the larger magnitude once that
/// exceeds one.
inline double scaled_residual(const Vec& a, const Vec& b) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

inline double scaled_residual(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

inline double scaled_residual(const Mat& a, const Mat& b) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace wfs
