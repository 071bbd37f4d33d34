#pragma once

#include <stdexcept>
#include <vector>

#include "wfs/jet_linalg.hpp"
#include "wfs/scalar_field.hpp"

namespace wfs {

/// Normalisation of the exterior derivative.  Every place that evaluates
/// d on a 1-form or a 2-form takes its constant from here.
struct ExteriorConvention {
  static constexpr double kOneForm = 0.5;
  static constexpr double kTwoForm = 1.0 / 3.0;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Field types: coordinate components as scalar fields.

struct VectorField {
  std::vector<ScalarField> c;

  VectorField() = default;
  explicit VectorField(int dim) : c(dim) {}
  explicit VectorField(std::vector<ScalarField> comps) : c(std::move(comps)) {}

  static VectorField coordinate(int dim, int k) {
    VectorField v(dim);
    v.c[k] = 1.0;
    return v;
  }

  int dim() const { return static_cast<int>(c.size()); }
  JetVec at(const Point& p) const {
    if (p.dim() != dim()) throw std::invalid_argument("VectorField: point dimension mismatch");
    JetVec r;
    r.reserve(c.size());
    for (const auto& s : c) r.push_back(s.eval(p));
    return r;
  }
};

struct OneForm {
  std::vector<ScalarField> c;

  OneForm() = default;
  explicit OneForm(int dim) : c(dim) {}
  explicit OneForm(std::vector<ScalarField> comps) : c(std::move(comps)) {}

  int dim() const { return static_cast<int>(c.size()); }
  JetVec at(const Point& p) const {
    if (p.dim() != dim()) throw std::invalid_argument("OneForm: point dimension mismatch");
    JetVec r;
    r.reserve(c.size());
    for (const auto& s : c) r.push_back(s.eval(p));
    return r;
  }
};

/// (1,1) tensor, component (k, l) = T^k_l.
struct Tensor11 {
  int n = 0;
  std::vector<ScalarField> c;

  Tensor11() = default;
  explicit Tensor11(int dim) : n(dim), c(static_cast<size_t>(dim) * dim) {}

  static Tensor11 identity(int dim) {
    Tensor11 t(dim);
    for (int i = 0; i < dim; ++i) t(i, i) = 1.0;
    return t;
  }

  int dim() const { return n; }
  ScalarField& operator()(int k, int l) { return c[static_cast<size_t>(k) * n + l]; }
  const ScalarField& operator()(int k, int l) const { return c[static_cast<size_t>(k) * n + l]; }

  JetMat at(const Point& p) const {
    if (p.dim() != n) throw std::invalid_argument("Tensor11: point dimension mismatch");
    JetMat m(n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) m(k, l) = (*this)(k, l).eval(p);
    }
    return m;
  }
};

/// Symmetric covariant 2-tensor stored as its lower triangle.
struct MetricField {
  int n = 0;
  std::vector<ScalarField> c;

  MetricField() = default;
  explicit MetricField(int dim) : n(dim), c(static_cast<size_t>(dim) * (dim + 1) / 2) {}

  int dim() const { return n; }
  ScalarField& operator()(int i, int j) { return c[static_cast<size_t>(Jet::packed(i, j))]; }
  const ScalarField& operator()(int i, int j) const { return c[static_cast<size_t>(Jet::packed(i, j))]; }

  JetMat at(const Point& p) const {
    if (p.dim() != n) throw std::invalid_argument("MetricField: point dimension mismatch");
    JetMat m(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        m(i, j) = (*this)(i, j).eval(p);
        m(j, i) = m(i, j);
      }
    }
    return m;
  }
};

/// Antisymmetric covariant 2-tensor; only entries with i < j are stored.
struct TwoForm {
  int n = 0;
  std::vector<ScalarField> c;

  TwoForm() = default;
  explicit TwoForm(int dim) : n(dim), c(static_cast<size_t>(dim) * dim) {}

  int dim() const { return n; }
  /// Entry (i, j) for i < j.
  ScalarField& upper(int i, int j) {
    if (!(i < j)) throw std::out_of_range("TwoForm::upper needs i < j");
    return c[static_cast<size_t>(i) * n + j];
  }

  JetMat at(const Point& p) const {
    if (p.dim() != n) throw std::invalid_argument("TwoForm: point dimension mismatch");
    JetMat m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = c[static_cast<size_t>(i) * n + j].eval(p);
        m(j, i) = -m(i, j);
      }
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Jet-level operations.  Arguments are component jets at one point; the
// result carries as many derivatives as the inputs allow.

/// V(s) = V^j d_j s.
inline Jet directional(const JetVec& v, const Jet& s) {
  Jet r = Jet::constant(s.dim(), 0.0);
  for (size_t j = 0; j < v.size(); ++j) r += v[j] * s.partial(static_cast<int>(j));
  return r;
}

/// Bilinear form X^T B Y.
inline Jet pair(const JetVec& x, const JetMat& b, const JetVec& y) { return dot(x, b * y); }

inline JetVec bracket(const JetVec& x, const JetVec& y) {
  const size_t n = x.size();
  JetVec r(n);
  for (size_t k = 0; k < n; ++k) r[k] = directional(x, y[k]) - directional(y, x[k]);
  return r;
}

/// d omega (X, Y) = c { X(omega(Y)) - Y(omega(X)) - omega([X,Y]) }.
inline Jet d_oneform(const JetVec& omega, const JetVec& x, const JetVec& y) {
  return ExteriorConvention::kOneForm *
         (directional(x, dot(omega, y)) - directional(y, dot(omega, x)) - dot(omega, bracket(x, y)));
}

/// d Phi (X, Y, Z) via the six-term coboundary.
inline Jet d_twoform(const JetMat& phi, const JetVec& x, const JetVec& y, const JetVec& z) {
  const Jet t = directional(x, pair(y, phi, z)) + directional(y, pair(z, phi, x)) +
                directional(z, pair(x, phi, y)) - pair(bracket(x, y), phi, z) -
                pair(bracket(z, x), phi, y) - pair(bracket(y, z), phi, x);
  return ExteriorConvention::kTwoForm * t;
}

/// (L_V omega)(Y) = V(omega(Y)) - omega([V, Y]).
inline Jet lie_derivative_oneform(const JetVec& v, const JetVec& omega, const JetVec& y) {
  return directional(v, dot(omega, y)) - dot(omega, bracket(v, y));
}

/// (L_V T) X = [V, TX] - T[V, X].
inline JetVec lie_derivative(const JetVec& v, const JetMat& t, const JetVec& x) {
  return bracket(v, t * x) - t * bracket(v, x);
}

/// Components of L_V T:  V^m d_m T^k_l - T^m_l d_m V^k + T^k_m d_l V^m.
inline JetMat lie_derivative_tensor(const JetVec& v, const JetMat& t) {
  const int n = t.size();
  JetMat r(n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Jet s = directional(v, t(k, l));
      for (int m = 0; m < n; ++m) {
        s -= t(m, l) * v[k].partial(m);
        s += t(k, m) * v[m].partial(l);
      }
      r(k, l) = s;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Field-level entry points.

inline Vec apply11(const Tensor11& t, const VectorField& x, const Point& p) {
  return values(t.at(p) * x.at(p));
}

inline double metric_pair(const MetricField& g, const VectorField& x, const VectorField& y,
                          const Point& p) {
  return values(x.at(p)).dot(values(g.at(p)) * values(y.at(p)));
}

/// g-adjoint G^{-1} T^T G.
inline Mat adjoint11(const MetricField& g, const Tensor11& t, const Point& p) {
  const Mat gv = values(g.at(p));
  Eigen::FullPivLU<Mat> lu(gv);
  if (!lu.isInvertible()) throw SingularMatrix("adjoint11: singular metric");
  return lu.solve(values(t.at(p)).transpose() * gv);
}

inline Vec lie_bracket(const VectorField& x, const VectorField& y, const Point& p) {
  return values(bracket(x.at(p), y.at(p)));
}

inline double d_oneform(const OneForm& w, const VectorField& x, const VectorField& y,
                        const Point& p) {
  return d_oneform(w.at(p), x.at(p), y.at(p)).value();
}

inline double d_twoform(const TwoForm& phi, const VectorField& x, const VectorField& y,
                        const VectorField& z, const Point& p) {
  return d_twoform(phi.at(p), x.at(p), y.at(p), z.at(p)).value();
}

inline Vec lie_derivative_tensor11(const VectorField& v, const Tensor11& t, const VectorField& x,
                                   const Point& p) {
  return values(lie_derivative(v.at(p), t.at(p), x.at(p)));
}

}  // namespace wfs
