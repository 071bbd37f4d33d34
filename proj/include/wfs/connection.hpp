#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "wfs/fields.hpp"

namespace wfs {

class SingularMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Levi-Civita connection of a metric near one point.
///
/// Built from the metric's second jet: the Christoffel symbols then carry
/// first derivatives and the curvature is available as plain values.
class LocalConnection {
 public:
  LocalConnection() = default;

  explicit LocalConnection(const JetMat& g) : n_(g.size()), g_(g) {
    gv_ = values(g_);
    Eigen::LLT<Mat> llt(0.5 * (gv_ + gv_.transpose()));
    if (llt.info() != Eigen::Success) throw SingularMetric("metric is not positive definite");
    if (!invert(g_, &ginv_)) throw SingularMetric("metric is singular");
    ginv_v_ = values(ginv_);
    build_christoffel();
    if (gamma_order_ >= 1) build_riemann();
  }

  int dim() const { return n_; }
  const JetMat& metric() const { return g_; }
  const JetMat& inverse_metric() const { return ginv_; }
  const Mat& G() const { return gv_; }
  const Mat& Ginv() const { return ginv_v_; }

  /// Gamma^k_ij as a jet.
  const Jet& gamma(int k, int i, int j) const { return gamma_[idx3(k, i, j)]; }
  double gamma_value(int k, int i, int j) const { return gamma_[idx3(k, i, j)].value(); }

  /// (R(d_i, d_j) d_k)^l.
  double riemann(int l, int k, int i, int j) const {
    if (riem_.empty()) throw std::logic_error("curvature needs the metric's second jet");
    return riem_[idx4(l, k, i, j)];
  }

  double g(const Vec& a, const Vec& b) const { return a.dot(gv_ * b); }

  /// Metric dual of a vector, as a covector.
  Vec lower(const Vec& a) const { return gv_ * a; }
  Vec raise(const Vec& w) const { return ginv_v_ * w; }

  /// Nabla_X Y with both arguments given as jets.
  JetVec nabla(const JetVec& x, const JetVec& y) const {
    JetVec r(n_);
    for (int k = 0; k < n_; ++k) {
      Jet s = directional(x, y[k]);
      for (int j = 0; j < n_; ++j) {
        Jet t = Jet::constant(s.dim(), 0.0);
        for (int m = 0; m < n_; ++m) t += gamma(k, j, m) * y[m];
        s += x[j] * t;
      }
      r[k] = s;
    }
    return r;
  }

  /// (Nabla Y)^k_j = d_j Y^k + Gamma^k_jm Y^m, a (1,1) tensor.
  JetMat nabla_field(const JetVec& y) const {
    JetMat r(n_);
    for (int k = 0; k < n_; ++k) {
      for (int j = 0; j < n_; ++j) {
        Jet s = y[k].partial(j);
        for (int m = 0; m < n_; ++m) s += gamma(k, j, m) * y[m];
        r(k, j) = s;
      }
    }
    return r;
  }

  Vec nabla(const Vec& x, const JetVec& y) const {
    Vec r = Vec::Zero(n_);
    for (int k = 0; k < n_; ++k) {
      for (int j = 0; j < n_; ++j) {
        double s = y[k].d(j);
        for (int m = 0; m < n_; ++m) s += gamma_value(k, j, m) * y[m].value();
        r[k] += x[j] * s;
      }
    }
    return r;
  }

  /// (Nabla_X T)^k_l for a (1,1) tensor T.
  Mat nabla_tensor(const JetMat& t, const Vec& x) const {
    Mat r = Mat::Zero(n_, n_);
    for (int j = 0; j < n_; ++j) {
      if (x[j] == 0.0) continue;
      for (int k = 0; k < n_; ++k) {
        for (int l = 0; l < n_; ++l) {
          double s = t(k, l).d(j);
          for (int m = 0; m < n_; ++m) {
            s += gamma_value(k, j, m) * t(m, l).value() - gamma_value(m, j, l) * t(k, m).value();
          }
          r(k, l) += x[j] * s;
        }
      }
    }
    return r;
  }

  /// (Nabla_X B)_kl for a covariant 2-tensor B.
  Mat nabla_covariant2(const JetMat& b, const Vec& x) const {
    Mat r = Mat::Zero(n_, n_);
    for (int j = 0; j < n_; ++j) {
      if (x[j] == 0.0) continue;
      for (int k = 0; k < n_; ++k) {
        for (int l = 0; l < n_; ++l) {
          double s = b(k, l).d(j);
          for (int m = 0; m < n_; ++m) {
            s -= gamma_value(m, j, k) * b(m, l).value() + gamma_value(m, j, l) * b(k, m).value();
          }
          r(k, l) += x[j] * s;
        }
      }
    }
    return r;
  }

  /// (Nabla_X Phi)(Y, Z).
  double nabla_twoform(const JetMat& phi, const Vec& x, const Vec& y, const Vec& z) const {
    return y.dot(nabla_covariant2(phi, x) * z);
  }

  /// Matrix of Z -> R_{X,Y} Z.
  Mat curvature_operator(const Vec& x, const Vec& y) const {
    Mat r = Mat::Zero(n_, n_);
    for (int l = 0; l < n_; ++l) {
      for (int k = 0; k < n_; ++k) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
          if (x[i] == 0.0) continue;
          for (int j = 0; j < n_; ++j) s += riemann(l, k, i, j) * x[i] * y[j];
        }
        r(l, k) = s;
      }
    }
    return r;
  }

  Vec curvature(const Vec& x, const Vec& y, const Vec& z) const { return curvature_operator(x, y) * z; }

  /// g(R_{X,Y} Z, W).
  double curvature4(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
    return g(curvature(x, y, z), w);
  }

 private:
  size_t idx3(int k, int i, int j) const { return (static_cast<size_t>(k) * n_ + i) * n_ + j; }
  size_t idx4(int l, int k, int i, int j) const {
    return ((static_cast<size_t>(l) * n_ + k) * n_ + i) * n_ + j;
  }

  void build_christoffel() {
    const int n = n_;
    const int dim = g_(0, 0).dim();
    // Gamma_lij = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    std::vector<Jet> low(static_cast<size_t>(n) * n * n);
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
          const Jet v = 0.5 * (g_(j, l).partial(i) + g_(i, l).partial(j) - g_(i, j).partial(l));
          low[idx3(l, i, j)] = v;
          low[idx3(l, j, i)] = v;
        }
      }
    }
    gamma_.assign(low.size(), Jet::constant(dim, 0.0));
    gamma_order_ = 2;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
          Jet s = Jet::constant(dim, 0.0);
          for (int l = 0; l < n; ++l) s += ginv_(k, l) * low[idx3(l, i, j)];
          gamma_[idx3(k, i, j)] = s;
          gamma_[idx3(k, j, i)] = s;
          gamma_order_ = std::min(gamma_order_, s.order());
        }
      }
    }
  }

  void build_riemann() {
    const int n = n_;
    riem_.assign(static_cast<size_t>(n) * n * n * n, 0.0);
    for (int l = 0; l < n; ++l) {
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = gamma(l, j, k).d(i) - gamma(l, i, k).d(j);
            for (int m = 0; m < n; ++m) {
              s += gamma_value(l, i, m) * gamma_value(m, j, k) - gamma_value(l, j, m) * gamma_value(m, i, k);
            }
            riem_[idx4(l, k, i, j)] = s;
          }
        }
      }
    }
  }

  int n_ = 0;
  JetMat g_, ginv_;
  Mat gv_, ginv_v_;
  std::vector<Jet> gamma_;
  int gamma_order_ = 0;
  std::vector<double> riem_;
};

// ---------------------------------------------------------------------------
// Norms.

/// Orthonormal frame for G as the columns of the returned matrix.
inline Mat orthonormal_frame(const Mat& gmat) {
  Eigen::LLT<Mat> llt(0.5 * (gmat + gmat.transpose()));
  if (llt.info() != Eigen::Success) throw SingularMetric("metric is not positive definite");
  const Mat lt = llt.matrixU();  // G = U^T U
  return lt.triangularView<Eigen::Upper>().solve(Mat::Identity(gmat.rows(), gmat.cols()));
}

/// Operator norm of a (1,1) tensor with respect to g: the largest singular
/// value of its matrix in a g-orthonormal frame.
inline double tensor_norm(const Mat& t, const Mat& gmat) {
  const Mat e = orthonormal_frame(gmat);
  const Mat a = e.transpose() * gmat * t * e;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

/// Lower-bound estimate of max |g(R_{X,Y}Z, W)| over g-unit X, Y, Z, W.
/// Starts from the largest orthonormal-frame component and a few random
/// tuples, then improves each slot in turn (each step is exact for the
/// slot it updates, so the value never decreases).
inline double curvature_norm_estimate(const LocalConnection& c, std::uint64_t seed = 7,
                                      int random_starts = 8, int sweeps = 40) {
  const int n = c.dim();
  const Mat e = orthonormal_frame(c.G());
  std::vector<double> rf(static_cast<size_t>(n) * n * n * n);
  auto at = [&](int a, int b, int cc, int d) -> double& {
    return rf[((static_cast<size_t>(a) * n + b) * n + cc) * n + d];
  };
  double best = 0.0;
  int ba = 0, bb = 0, bc = 0, bd = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Mat r = e.transpose() * c.G() * c.curvature_operator(e.col(a), e.col(b)) * e;
      for (int cc = 0; cc < n; ++cc) {
        for (int d = 0; d < n; ++d) {
          at(a, b, cc, d) = r(d, cc);
          if (std::abs(r(d, cc)) > best) {
            best = std::abs(r(d, cc));
            ba = a, bb = b, bc = cc, bd = d;
          }
        }
      }
    }
  }
  // Contract all slots but `slot` to get the optimal direction for it.
  auto slot_vector = [&](int slot, const std::vector<Vec>& v) {
    Vec out = Vec::Zero(n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int cc = 0; cc < n; ++cc) {
          for (int d = 0; d < n; ++d) {
            const double r = at(a, b, cc, d);
            if (r == 0.0) continue;
            const int idx[4] = {a, b, cc, d};
            double w = r;
            for (int s = 0; s < 4; ++s) {
              if (s != slot) w *= v[s][idx[s]];
            }
            out[idx[slot]] += w;
          }
        }
      }
    }
    return out;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<Vec>> starts;
  {
    std::vector<Vec> s(4, Vec::Zero(n));
    s[0][ba] = 1.0, s[1][bb] = 1.0, s[2][bc] = 1.0, s[3][bd] = 1.0;
    starts.push_back(s);
  }
  for (int k = 0; k < random_starts; ++k) {
    std::vector<Vec> s(4, Vec(n));
    for (auto& v : s) {
      for (int i = 0; i < n; ++i) v[i] = u(rng);
      v.normalize();
    }
    starts.push_back(s);
  }
  for (auto& v : starts) {
    for (int it = 0; it < sweeps; ++it) {
      for (int slot = 0; slot < 4; ++slot) {
        const Vec w = slot_vector(slot, v);
        const double nw = w.norm();
        if (nw == 0.0) break;
        v[slot] = w / nw;
        best = std::max(best, nw);
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Field-level entry points.

struct Christoffel {
  int n = 0;
  std::vector<double> v;
  double operator()(int k, int i, int j) const { return v[(static_cast<size_t>(k) * n + i) * n + j]; }
};

inline Christoffel christoffel(const MetricField& g, const Point& p) {
  const LocalConnection c(g.at(p));
  Christoffel out{c.dim(), {}};
  for (int k = 0; k < c.dim(); ++k) {
    for (int i = 0; i < c.dim(); ++i) {
      for (int j = 0; j < c.dim(); ++j) out.v.push_back(c.gamma_value(k, i, j));
    }
  }
  return out;
}

inline Vec cov_deriv_vector(const MetricField& g, const VectorField& x, const VectorField& y,
                            const Point& p) {
  const LocalConnection c(g.at(p));
  return values(c.nabla(x.at(p), y.at(p)));
}

/// (Nabla_X T) Y = Nabla_X (T Y) - T Nabla_X Y.
inline Vec cov_deriv_tensor11(const MetricField& g, const Tensor11& t, const VectorField& x,
                              const VectorField& y, const Point& p) {
  const LocalConnection c(g.at(p));
  const JetMat tj = t.at(p);
  const JetVec xj = x.at(p), yj = y.at(p);
  return values(c.nabla(xj, tj * yj)) - values(tj) * values(c.nabla(xj, yj));
}

inline double cov_deriv_twoform(const MetricField& g, const TwoForm& phi, const VectorField& x,
                                const VectorField& y, const VectorField& z, const Point& p) {
  const LocalConnection c(g.at(p));
  return c.nabla_twoform(phi.at(p), values(x.at(p)), values(y.at(p)), values(z.at(p)));
}

inline Vec riemann(const MetricField& g, const VectorField& x, const VectorField& y,
                   const VectorField& z, const Point& p) {
  const LocalConnection c(g.at(p));
  return c.curvature(values(x.at(p)), values(y.at(p)), values(z.at(p)));
}

}  // namespace wfs
