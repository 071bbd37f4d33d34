#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "wfs/connection.hpp"
#include "wfs/sampling.hpp"

namespace wfs {

class StructureInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotInContactDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weak metric f-structure (f, Q, xi_i, eta^i, g) on a chart of dimension
/// 2n + s, all given by coordinate components.
struct WeakFStructure {
  int n = 0;
  int s = 0;
  ChartSpec chart;
  Tensor11 f;
  Tensor11 Q;
  std::vector<VectorField> xi;
  std::vector<OneForm> eta;
  MetricField g;
  std::string label;

  int dim() const { return 2 * n + s; }

  void check_shapes() const {
    chart.validate();
    const int d = dim();
    if (n < 1 || s < 1) throw StructureInvalid("shape: need n >= 1 and s >= 1");
    if (chart.dim() != d) throw StructureInvalid("shape: chart dimension differs from 2n+s");
    if (f.dim() != d || Q.dim() != d || g.dim() != d) throw StructureInvalid("shape: tensor size");
    if (static_cast<int>(xi.size()) != s || static_cast<int>(eta.size()) != s) {
      throw StructureInvalid("shape: need s Reeb fields and s one-forms");
    }
    for (int i = 0; i < s; ++i) {
      if (xi[i].dim() != d || eta[i].dim() != d) throw StructureInvalid("shape: xi/eta size");
    }
  }
};

/// Phi(X, Y) = g(X, fY) as a field; antisymmetrised.
inline TwoForm fundamental_form(const WeakFStructure& S) {
  const int d = S.dim();
  TwoForm phi(d);
  auto gf = [&](int i, int j) {
    ScalarField t = 0.0;
    for (int m = 0; m < d; ++m) t += S.g(i, m) * S.f(m, j);
    return t;
  };
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) phi.upper(i, j) = 0.5 * (gf(i, j) - gf(j, i));
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Nijenhuis torsion.

/// [S,S](X,Y) = S^2[X,Y] + [SX,SY] - S[SX,Y] - S[X,SY].
inline JetVec nijenhuis(const JetMat& s, const JetVec& x, const JetVec& y) {
  const JetVec sx = s * x, sy = s * y;
  return s * (s * bracket(x, y)) + bracket(sx, sy) - s * bracket(sx, y) - s * bracket(x, sy);
}

/// The same torsion through the connection:
/// (S nabla_Y S - nabla_{SY} S) X - (S nabla_X S - nabla_{SX} S) Y.
inline Vec nijenhuis_nabla(const LocalConnection& c, const JetMat& s, const Vec& x, const Vec& y) {
  const Mat sv = values(s);
  const Vec sx = sv * x, sy = sv * y;
  return sv * (c.nabla_tensor(s, y) * x) - c.nabla_tensor(s, sy) * x - sv * (c.nabla_tensor(s, x) * y) +
         c.nabla_tensor(s, sx) * y;
}

inline Vec nijenhuis(const Tensor11& s, const VectorField& x, const VectorField& y, const Point& p) {
  return values(nijenhuis(s.at(p), x.at(p), y.at(p)));
}

// ---------------------------------------------------------------------------

/// Everything about a structure at one point: component jets of the data,
/// the connection, and derived tensors (h_i, tilde h_i, L_xi Q, ...).
class LocalStructure {
 public:
  LocalStructure(const WeakFStructure& S, const Point& p) : n_(S.n), s_(S.s), dim_(S.dim()), p_(p) {
    f_ = S.f.at(p);
    q_ = S.Q.at(p);
    qt_ = q_ - JetMat::identity(dim_, dim_);
    if (!invert(q_, &qinv_)) throw StructureInvalid("Q is singular");
    conn_ = LocalConnection(S.g.at(p));
    for (int i = 0; i < s_; ++i) {
      xi_.push_back(S.xi[i].at(p));
      eta_.push_back(S.eta[i].at(p));
    }
    const JetMat gf = conn_.metric() * f_;
    phi_ = 0.5 * (gf - transpose(gf));
    for (int i = 0; i < s_; ++i) {
      JetMat h = 0.5 * lie_derivative_tensor(xi_[i], f_);
      htilde_.push_back(qinv_ * h);
      h_.push_back(std::move(h));
      lieq_.push_back(lie_derivative_tensor(xi_[i], q_));
      nabla_xi_.push_back(conn_.nabla_field(xi_[i]));
    }
    fv_ = values(f_);
    qv_ = values(q_);
    qinvv_ = values(qinv_);
    pd_ = Mat::Identity(dim_, dim_);
    xibar_ = Vec::Zero(dim_);
    etabar_ = Vec::Zero(dim_);
    for (int i = 0; i < s_; ++i) {
      xiv_.push_back(values(xi_[i]));
      etav_.push_back(values(eta_[i]));
      pd_ -= xiv_[i] * etav_[i].transpose();
      xibar_ += xiv_[i];
      etabar_ += etav_[i];
      hv_.push_back(values(h_[i]));
      htv_.push_back(values(htilde_[i]));
      hstar_.push_back(adjoint(hv_[i]));
    }
  }

  int n() const { return n_; }
  int s() const { return s_; }
  int dim() const { return dim_; }
  const Point& point() const { return p_; }
  const LocalConnection& conn() const { return conn_; }

  const JetMat& f_jet() const { return f_; }
  const JetMat& Q_jet() const { return q_; }
  const JetMat& Qt_jet() const { return qt_; }
  const JetMat& Qinv_jet() const { return qinv_; }
  const JetMat& phi_jet() const { return phi_; }
  const JetVec& xi_jet(int i) const { return xi_[i]; }
  const JetVec& eta_jet(int i) const { return eta_[i]; }
  const JetMat& h_jet(int i) const { return h_[i]; }
  const JetMat& htilde_jet(int i) const { return htilde_[i]; }
  const JetMat& lieQ_jet(int i) const { return lieq_[i]; }
  /// Nabla xi_i as a (1,1) tensor: X -> nabla_X xi_i.
  const JetMat& nabla_xi_jet(int i) const { return nabla_xi_[i]; }

  const Mat& G() const { return conn_.G(); }
  const Mat& f() const { return fv_; }
  const Mat& Q() const { return qv_; }
  Mat Qt() const { return qv_ - Mat::Identity(dim_, dim_); }
  const Mat& Qinv() const { return qinvv_; }
  const Vec& xi(int i) const { return xiv_[i]; }
  const Vec& eta(int i) const { return etav_[i]; }
  const Vec& xibar() const { return xibar_; }
  const Vec& etabar() const { return etabar_; }
  const Mat& h(int i) const { return hv_[i]; }
  const Mat& hstar(int i) const { return hstar_[i]; }
  const Mat& htilde(int i) const { return htv_[i]; }
  Mat lieQ(int i) const { return values(lieq_[i]); }
  /// Projection onto the contact distribution along the Reeb fields.
  const Mat& proj_D() const { return pd_; }

  double g(const Vec& a, const Vec& b) const { return conn_.g(a, b); }
  Mat adjoint(const Mat& t) const { return conn_.Ginv() * t.transpose() * conn_.G(); }

  /// Vector of eta^i(X), i = 1..s.
  Vec etas(const Vec& x) const {
    Vec r(s_);
    for (int i = 0; i < s_; ++i) r[i] = etav_[i].dot(x);
    return r;
  }

  // ----- structure tensors on local fields -----

  /// N1(X,Y) = [f,f](X,Y) + 2 sum_i d eta^i(X,Y) xi_i.
  JetVec n1(const JetVec& x, const JetVec& y) const {
    JetVec r = nijenhuis(f_, x, y);
    for (int i = 0; i < s_; ++i) r = r + (2.0 * d_oneform(eta_[i], x, y)) * xi_[i];
    return r;
  }

  /// N2_i(X,Y) = 2 d eta^i(fX, Y) - 2 d eta^i(fY, X).
  Jet n2(int i, const JetVec& x, const JetVec& y) const {
    return 2.0 * d_oneform(eta_[i], f_ * x, y) - 2.0 * d_oneform(eta_[i], f_ * y, x);
  }

  /// N2 through Lie derivatives: (L_{fX} eta^i)(Y) - (L_{fY} eta^i)(X).
  Jet n2_lie(int i, const JetVec& x, const JetVec& y) const {
    return lie_derivative_oneform(f_ * x, eta_[i], y) - lie_derivative_oneform(f_ * y, eta_[i], x);
  }

  /// N3_i(X) = [xi_i, fX] - f[xi_i, X].
  JetVec n3(int i, const JetVec& x) const { return bracket(xi_[i], f_ * x) - f_ * bracket(xi_[i], x); }

  /// N4_ij(X) = xi_i(eta^j(X)) - eta^j([xi_i, X]).
  Jet n4(int i, int j, const JetVec& x) const {
    return directional(xi_[i], dot(eta_[j], x)) - dot(eta_[j], bracket(xi_[i], x));
  }

  /// The N5 expression on local fields, with tilde Q = Q - I:
  ///   fZ(g(X,Q~Y)) - fY(g(X,Q~Z)) + g([X,fZ],Q~Y) - g([X,fY],Q~Z)
  ///   [+ g([Y,fZ] - [Z,fY] - f[Y,Z], Q~X)  when with_last_line].
  /// Tensorial in X but not in Y, Z; see n5().
  Jet n5_expression(const JetVec& x, const JetVec& y, const JetVec& z, bool with_last_line) const {
    const JetMat& gm = conn_.metric();
    auto gq = [&](const JetVec& a, const JetVec& b) { return pair(a, gm, qt_ * b); };
    const JetVec fy = f_ * y, fz = f_ * z;
    Jet r = directional(fz, gq(x, y)) - directional(fy, gq(x, z)) + gq(bracket(x, fz), y) - gq(bracket(x, fy), z);
    if (with_last_line) r = r + gq(bracket(y, fz) - bracket(z, fy) - f_ * bracket(y, z), x);
    return r;
  }

  /// Extension of v with nabla v = 0 at the point (affine in coordinates).
  JetVec parallel_field(const Vec& v) const {
    JetVec r;
    for (int k = 0; k < dim_; ++k) {
      Vec grad = Vec::Zero(dim_);
      for (int j = 0; j < dim_; ++j) {
        for (int m = 0; m < dim_; ++m) grad[j] -= conn_.gamma_value(k, j, m) * v[m];
      }
      r.push_back(Jet::affine(dim_, v[k], grad));
    }
    return r;
  }

  /// N5(X,Y,Z): the four-term expression with Y, Z extended parallel at the
  /// point.  With that extension the last bracket line equals the two
  /// bracket terms before it, so including it would double them.
  Jet n5(const JetVec& x, const Vec& y, const Vec& z) const {
    return n5_expression(x, parallel_field(y), parallel_field(z), false);
  }

  /// The five-term variant (with the last line), same extension.
  Jet n5_with_last_line(const JetVec& x, const Vec& y, const Vec& z) const {
    return n5_expression(x, parallel_field(y), parallel_field(z), true);
  }

  /// Tensor f * tilde h_i with its first derivatives.
  JetMat f_htilde_jet(int i) const { return f_ * htilde_[i]; }

 private:
  int n_, s_, dim_;
  Point p_;
  LocalConnection conn_;
  JetMat f_, q_, qt_, qinv_, phi_;
  std::vector<JetVec> xi_, eta_;
  std::vector<JetMat> h_, htilde_, lieq_, nabla_xi_;
  Mat fv_, qv_, qinvv_, pd_;
  std::vector<Vec> xiv_, etav_;
  Vec xibar_, etabar_;
  std::vector<Mat> hv_, htv_, hstar_;
};

inline std::vector<LocalStructure> evaluate(const WeakFStructure& S, const SampleSet& samples) {
  S.check_shapes();
  std::vector<LocalStructure> out;
  out.reserve(samples.points.size());
  for (const Point& p : samples.points) out.emplace_back(S, p);
  return out;
}

// ---------------------------------------------------------------------------
// Derived tensors at a point.

/// h_i X = 1/2 N3_i(X).
inline Vec h_tensor(const LocalStructure& ls, int i, const Vec& x) { return ls.h(i) * x; }

inline void require_in_D(const LocalStructure& ls, const Vec& x, double tol = 1e-9) {
  const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
  if (ls.etas(x).lpNorm<Eigen::Infinity>() > tol * scale) {
    throw NotInContactDistribution("vector has a Reeb component");
  }
}

/// Splitting tensor C_i X = -(nabla_X xi_i)^T for X in the contact
/// distribution (T = projection along the Reeb fields).
inline Vec splitting_tensor(const LocalStructure& ls, int i, const Vec& x) {
  require_in_D(ls, x);
  return -ls.proj_D() * (values(ls.nabla_xi_jet(i)) * x);
}

/// Closed form f + f Q^{-1} h_i^*.
inline Vec splitting_formula(const LocalStructure& ls, int i, const Vec& x) {
  return ls.f() * x + ls.f() * (ls.Qinv() * (ls.hstar(i) * x));
}

/// The opposite-sign variant -fX - Q^{-1} f h_i X.
inline Vec splitting_formula_alt(const LocalStructure& ls, int i, const Vec& x) {
  return -ls.f() * x - ls.Qinv() * (ls.f() * (ls.h(i) * x));
}

// ---------------------------------------------------------------------------
// Eigen-splitting of tilde h_i on the contact distribution.

struct EigenSplit {
  double lambda = 0.0;           ///< common modulus of the non-zero eigenvalues
  double cluster_radius = 0.0;   ///< worst distance of an eigenvalue from {0, +-lambda}
  double asymmetry = 0.0;        ///< failure of g-self-adjointness
  std::vector<double> eigenvalues;  ///< on the contact distribution, ascending
  Mat plus, minus, zero;         ///< g-orthonormal bases (columns)
  Mat kerf;                      ///< the Reeb fields
  bool degenerate = false;       ///< no non-zero eigenvalues
};

/// G-orthonormal basis of the contact distribution, as columns.
inline Mat contact_basis(const LocalStructure& ls) {
  const Mat e = orthonormal_frame(ls.G());
  const Mat a = e.transpose() * ls.G() * ls.proj_D() * e;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  // eigenvalues ascending: the top 2n belong to the distribution
  return e * es.eigenvectors().rightCols(2 * ls.n());
}

inline EigenSplit eigen_split(const LocalStructure& ls, int i, double tol = 1e-6) {
  EigenSplit out;
  const Mat b = contact_basis(ls);
  const Mat a = b.transpose() * ls.G() * ls.htilde(i) * b;
  out.asymmetry = (a - a.transpose()).lpNorm<Eigen::Infinity>();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  const Vec mu = es.eigenvalues();
  const Mat w = b * es.eigenvectors();
  const int m = static_cast<int>(mu.size());
  const double scale = std::max(1.0, mu.lpNorm<Eigen::Infinity>());
  std::vector<int> ip, im, iz;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    out.eigenvalues.push_back(mu[k]);
    if (std::abs(mu[k]) <= tol * scale) {
      iz.push_back(k);
    } else {
      (mu[k] > 0 ? ip : im).push_back(k);
      sum += std::abs(mu[k]);
    }
  }
  const int nz = static_cast<int>(ip.size() + im.size());
  out.degenerate = nz == 0;
  out.lambda = nz ? sum / nz : 0.0;
  for (int k = 0; k < m; ++k) {
    const double dist = std::min(std::abs(mu[k]), std::abs(std::abs(mu[k]) - out.lambda));
    out.cluster_radius = std::max(out.cluster_radius, dist);
  }
  auto cols = [&](const std::vector<int>& idx) {
    Mat r(ls.dim(), static_cast<int>(idx.size()));
    for (size_t c = 0; c < idx.size(); ++c) r.col(static_cast<int>(c)) = w.col(idx[c]);
    return r;
  };
  out.plus = cols(ip);
  out.minus = cols(im);
  out.zero = cols(iz);
  out.kerf = Mat(ls.dim(), ls.s());
  for (int j = 0; j < ls.s(); ++j) out.kerf.col(j) = ls.xi(j);
  return out;
}

/// Spectral projector of tilde h_i onto the eigenvalue sign*lambda, as a
/// jet tensor: tilde h (tilde h + sign lambda) / (2 lambda^2).
inline JetMat eigen_projector_jet(const LocalStructure& ls, int i, double lambda, int sign) {
  const JetMat& ht = ls.htilde_jet(i);
  const int d = ls.dim();
  const JetMat shifted = ht + (sign * lambda) * JetMat::identity(d, d);
  return (1.0 / (2.0 * lambda * lambda)) * (ht * shifted);
}

}  // namespace wfs
