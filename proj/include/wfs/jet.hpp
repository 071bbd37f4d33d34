#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wfs {

/// Largest chart dimension supported by the fixed-capacity jet storage.
inline constexpr int kMaxDim = 12;

/// Raised when an expression is evaluated outside its domain
/// (division by zero, logarithm of a non-positive number, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Value, gradient and Hessian of a scalar at a point.
///
/// `order` says how many derivative levels are valid: 2 for a full
/// second jet, 1 after one differentiation, 0 for a bare value.  Binary
/// operations keep the smaller order, so a quantity that has used up its
/// derivatives cannot silently be differentiated again.  The Hessian is
/// kept as a packed lower triangle, which makes it symmetric by storage.
class Jet {
 public:
  static constexpr int kHessSize = kMaxDim * (kMaxDim + 1) / 2;

  Jet() = default;

  static Jet constant(int dim, double c) {
    Jet j;
    j.set_dim(dim);
    j.val_ = c;
    return j;
  }

  /// The coordinate function x^index evaluated at `value`.
  static Jet variable(int dim, int index, double value) {
    if (index < 0 || index >= dim) {
      throw std::out_of_range("Jet::variable: index outside chart");
    }
    Jet j = constant(dim, value);
    j.grad_[index] = 1.0;
    return j;
  }

  /// Affine jet: given value and gradient, zero Hessian.
  template <typename Grad>
  static Jet affine(int dim, double value, const Grad& grad) {
    Jet j = constant(dim, value);
    for (int k = 0; k < dim; ++k) j.grad_[k] = grad[k];
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  double value() const { return val_; }

  double d(int i) const {
    require_order(1, "d");
    return grad_[i];
  }

  double d2(int i, int j) const {
    require_order(2, "d2");
    return hess_[packed(i, j)];
  }

  /// Partial derivative as a jet one order lower.
  Jet partial(int i) const {
    require_order(1, "partial");
    Jet r;
    r.dim_ = dim_;
    r.order_ = order_ - 1;
    r.val_ = grad_[i];
    if (r.order_ >= 1) {
      for (int k = 0; k < dim_; ++k) r.grad_[k] = hess_[packed(i, k)];
    }
    return r;
  }

  /// Drop derivative information above `ord`.
  Jet truncated(int ord) const {
    Jet r = *this;
    if (ord >= r.order_) return r;
    r.order_ = ord;
    if (ord < 2) r.hess_.fill(0.0);
    if (ord < 1) r.grad_.fill(0.0);
    return r;
  }

  static int packed(int i, int j) {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  Jet operator-() const {
    Jet r = *this;
    r.val_ = -val_;
    for (int k = 0; k < dim_; ++k) r.grad_[k] = -grad_[k];
    for (int k = 0; k < hess_len(); ++k) r.hess_[k] = -hess_[k];
    return r;
  }

  Jet& operator+=(const Jet& b) { return *this = add(*this, b, 1.0); }
  Jet& operator-=(const Jet& b) { return *this = add(*this, b, -1.0); }
  Jet& operator*=(const Jet& b) { return *this = mul(*this, b); }
  Jet& operator/=(const Jet& b) { return *this = div(*this, b); }

  Jet& operator*=(double c) {
    val_ *= c;
    for (int k = 0; k < dim_; ++k) grad_[k] *= c;
    for (int k = 0; k < hess_len(); ++k) hess_[k] *= c;
    return *this;
  }
  Jet& operator+=(double c) {
    val_ += c;
    return *this;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return add(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return add(a, b, -1.0); }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return div(a, b); }

  friend Jet operator+(Jet a, double c) { return a += c; }
  friend Jet operator+(double c, Jet a) { return a += c; }
  friend Jet operator-(Jet a, double c) { return a += -c; }
  friend Jet operator-(double c, const Jet& a) { return (-a) += c; }
  friend Jet operator*(Jet a, double c) { return a *= c; }
  friend Jet operator*(double c, Jet a) { return a *= c; }
  friend Jet operator/(Jet a, double c) {
    if (c == 0.0) throw DomainError("division by zero");
    return a *= 1.0 / c;
  }
  friend Jet operator/(double c, const Jet& a) {
    return unary(a, c / a.val_, -c / (a.val_ * a.val_),
                 2.0 * c / (a.val_ * a.val_ * a.val_), a.val_ != 0.0, "division by zero");
  }

  /// Apply a scalar function given its value and first two derivatives at
  /// the jet's value.  Throws DomainError when `ok` is false.
  static Jet unary(const Jet& a, double f0, double f1, double f2, bool ok, const char* what) {
    if (!ok) throw DomainError(what);
    Jet r;
    r.dim_ = a.dim_;
    r.order_ = a.order_;
    r.val_ = f0;
    if (a.order_ >= 1) {
      for (int k = 0; k < a.dim_; ++k) r.grad_[k] = f1 * a.grad_[k];
    }
    if (a.order_ >= 2) {
      for (int i = 0; i < a.dim_; ++i) {
        for (int j = 0; j <= i; ++j) {
          const int q = packed(i, j);
          r.hess_[q] = f2 * a.grad_[i] * a.grad_[j] + f1 * a.hess_[q];
        }
      }
    }
    return r;
  }

 private:
  void set_dim(int dim) {
    if (dim < 0 || dim > kMaxDim) {
      throw std::out_of_range("Jet: dimension " + std::to_string(dim) + " exceeds capacity");
    }
    dim_ = dim;
  }

  int hess_len() const { return dim_ * (dim_ + 1) / 2; }

  void require_order(int need, const char* what) const {
    if (order_ < need) {
      throw std::logic_error(std::string("Jet::") + what + ": derivative order exhausted");
    }
  }

  static int joint_dim(const Jet& a, const Jet& b) {
    if (a.dim_ != b.dim_ && a.dim_ != 0 && b.dim_ != 0) {
      throw std::logic_error("Jet: mixing jets of different dimension");
    }
    return a.dim_ > b.dim_ ? a.dim_ : b.dim_;
  }

  static Jet add(const Jet& a, const Jet& b, double sb) {
    Jet r;
    r.dim_ = joint_dim(a, b);
    r.order_ = a.order_ < b.order_ ? a.order_ : b.order_;
    r.val_ = a.val_ + sb * b.val_;
    if (r.order_ >= 1) {
      for (int k = 0; k < r.dim_; ++k) r.grad_[k] = a.grad_[k] + sb * b.grad_[k];
    }
    if (r.order_ >= 2) {
      for (int k = 0; k < r.hess_len(); ++k) r.hess_[k] = a.hess_[k] + sb * b.hess_[k];
    }
    return r;
  }

  static Jet mul(const Jet& a, const Jet& b) {
    Jet r;
    r.dim_ = joint_dim(a, b);
    r.order_ = a.order_ < b.order_ ? a.order_ : b.order_;
    r.val_ = a.val_ * b.val_;
    if (r.order_ >= 1) {
      for (int k = 0; k < r.dim_; ++k) r.grad_[k] = a.grad_[k] * b.val_ + a.val_ * b.grad_[k];
    }
    if (r.order_ >= 2) {
      for (int i = 0; i < r.dim_; ++i) {
        for (int j = 0; j <= i; ++j) {
          const int q = packed(i, j);
          r.hess_[q] = a.hess_[q] * b.val_ + a.grad_[i] * b.grad_[j] + a.grad_[j] * b.grad_[i] +
                       a.val_ * b.hess_[q];
        }
      }
    }
    return r;
  }

  static Jet div(const Jet& a, const Jet& b) {
    if (b.val_ == 0.0) throw DomainError("division by zero");
    return mul(a, 1.0 / b);
  }

  int dim_ = 0;
  int order_ = 2;
  double val_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, kHessSize> hess_{};
};

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet::unary(a, s, c, -s, true, "");
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet::unary(a, c, -s, -c, true, "");
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return Jet::unary(a, e, e, e, std::isfinite(e), "exp overflow");
}

inline Jet log(const Jet& a) {
  const double x = a.value();
  return Jet::unary(a, std::log(x), 1.0 / x, -1.0 / (x * x), x > 0.0, "log of non-positive value");
}

inline Jet sqrt(const Jet& a) {
  const double x = a.value();
  const double r = std::sqrt(x);
  return Jet::unary(a, r, 0.5 / r, -0.25 / (r * x), x > 0.0, "sqrt of non-positive value");
}

inline Jet pow(const Jet& a, int k) {
  const double x = a.value();
  if (k == 0) return Jet::unary(a, 1.0, 0.0, 0.0, true, "");
  const bool ok = k > 0 || x != 0.0;
  const double f0 = std::pow(x, k);
  const double f1 = k * std::pow(x, k - 1);
  const double f2 = k == 1 ? 0.0 : double(k) * (k - 1) * std::pow(x, k - 2);
  return Jet::unary(a, f0, f1, f2, ok, "negative power of zero");
}

inline Jet pow(const Jet& a, double r) {
  const double x = a.value();
  return Jet::unary(a, std::pow(x, r), r * std::pow(x, r - 1.0), r * (r - 1.0) * std::pow(x, r - 2.0),
                    x > 0.0, "real power of non-positive value");
}

}  // namespace wfs
