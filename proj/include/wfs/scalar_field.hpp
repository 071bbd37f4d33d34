#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wfs/jet.hpp"

namespace wfs {

/// Coordinate chart: names and the box that samples are drawn from.
struct ChartSpec {
  std::vector<std::string> coord_names;
  std::vector<std::pair<double, double>> box;

  int dim() const { return static_cast<int>(coord_names.size()); }

  void validate() const {
    if (coord_names.empty() || coord_names.size() != box.size()) {
      throw std::invalid_argument("ChartSpec: names and box disagree");
    }
    if (dim() > kMaxDim) throw std::invalid_argument("ChartSpec: dimension exceeds capacity");
    for (const auto& [lo, hi] : box) {
      if (!(lo < hi)) throw std::invalid_argument("ChartSpec: empty box side");
    }
  }

  bool contains(const std::vector<double>& x, double margin = 0.0) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < box[i].first + margin || x[i] > box[i].second - margin) return false;
    }
    return true;
  }
};

/// A point of a chart, stored as its coordinates.
struct Point {
  std::vector<double> x;

  Point() = default;
  explicit Point(std::vector<double> coords) : x(std::move(coords)) {}
  int dim() const { return static_cast<int>(x.size()); }
  double operator[](int i) const { return x[i]; }
};

namespace detail {

struct Node {
  virtual ~Node() = default;
  virtual Jet eval(const Point& p) const = 0;
  virtual bool constant_value(double* /*out*/) const { return false; }
};

using NodePtr = std::shared_ptr<const Node>;

struct ConstNode final : Node {
  double c;
  explicit ConstNode(double v) : c(v) {}
  Jet eval(const Point& p) const override { return Jet::constant(p.dim(), c); }
  bool constant_value(double* out) const override {
    *out = c;
    return true;
  }
};

struct CoordNode final : Node {
  int i;
  explicit CoordNode(int k) : i(k) {}
  Jet eval(const Point& p) const override {
    if (i >= p.dim()) throw std::out_of_range("coordinate index outside point");
    return Jet::variable(p.dim(), i, p[i]);
  }
};

enum class BinOp { kAdd, kSub, kMul, kDiv };

struct BinaryNode final : Node {
  BinOp op;
  NodePtr a, b;
  BinaryNode(BinOp o, NodePtr x, NodePtr y) : op(o), a(std::move(x)), b(std::move(y)) {}
  Jet eval(const Point& p) const override {
    const Jet x = a->eval(p);
    const Jet y = b->eval(p);
    switch (op) {
      case BinOp::kAdd: return x + y;
      case BinOp::kSub: return x - y;
      case BinOp::kMul: return x * y;
      case BinOp::kDiv: return x / y;
    }
    return x;
  }
};

enum class UnOp { kNeg, kSin, kCos, kExp, kLog, kSqrt };

struct UnaryNode final : Node {
  UnOp op;
  NodePtr a;
  UnaryNode(UnOp o, NodePtr x) : op(o), a(std::move(x)) {}
  Jet eval(const Point& p) const override {
    const Jet x = a->eval(p);
    switch (op) {
      case UnOp::kNeg: return -x;
      case UnOp::kSin: return sin(x);
      case UnOp::kCos: return cos(x);
      case UnOp::kExp: return exp(x);
      case UnOp::kLog: return log(x);
      case UnOp::kSqrt: return sqrt(x);
    }
    return x;
  }
};

struct IntPowNode final : Node {
  NodePtr a;
  int k;
  IntPowNode(NodePtr x, int e) : a(std::move(x)), k(e) {}
  Jet eval(const Point& p) const override { return pow(a->eval(p), k); }
};

struct RealPowNode final : Node {
  NodePtr a;
  double r;
  RealPowNode(NodePtr x, double e) : a(std::move(x)), r(e) {}
  Jet eval(const Point& p) const override { return pow(a->eval(p), r); }
};

}  // namespace detail

/// Smooth function on a chart, held as an immutable expression graph.
/// Evaluation returns the full second jet at a point.
class ScalarField {
 public:
  ScalarField() : node_(std::make_shared<detail::ConstNode>(0.0)) {}
  ScalarField(double c) : node_(std::make_shared<detail::ConstNode>(c)) {}  // NOLINT

  static ScalarField constant(double c) { return ScalarField(c); }
  static ScalarField coordinate(int i) {
    if (i < 0) throw std::out_of_range("negative coordinate index");
    return ScalarField(std::make_shared<detail::CoordNode>(i));
  }

  Jet eval(const Point& p) const { return node_->eval(p); }

  bool is_constant(double* value = nullptr) const {
    double v = 0.0;
    const bool c = node_->constant_value(&v);
    if (c && value) *value = v;
    return c;
  }
  bool is_zero() const {
    double v = 1.0;
    return is_constant(&v) && v == 0.0;
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    double ca = 0.0, cb = 0.0;
    const bool ka = a.is_constant(&ca), kb = b.is_constant(&cb);
    if (ka && kb) return ScalarField(ca + cb);
    if (ka && ca == 0.0) return b;
    if (kb && cb == 0.0) return a;
    return binary(detail::BinOp::kAdd, a, b);
  }

  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    double ca = 0.0, cb = 0.0;
    const bool ka = a.is_constant(&ca), kb = b.is_constant(&cb);
    if (ka && kb) return ScalarField(ca - cb);
    if (kb && cb == 0.0) return a;
    if (ka && ca == 0.0) return -b;
    return binary(detail::BinOp::kSub, a, b);
  }

  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    double ca = 0.0, cb = 0.0;
    const bool ka = a.is_constant(&ca), kb = b.is_constant(&cb);
    if (ka && kb) return ScalarField(ca * cb);
    if ((ka && ca == 0.0) || (kb && cb == 0.0)) return ScalarField(0.0);
    if (ka && ca == 1.0) return b;
    if (kb && cb == 1.0) return a;
    return binary(detail::BinOp::kMul, a, b);
  }

  friend ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    double ca = 0.0, cb = 0.0;
    const bool ka = a.is_constant(&ca), kb = b.is_constant(&cb);
    if (kb && cb == 0.0) throw DomainError("division by constant zero");
    if (ka && kb) return ScalarField(ca / cb);
    if (ka && ca == 0.0) return ScalarField(0.0);
    if (kb && cb == 1.0) return a;
    return binary(detail::BinOp::kDiv, a, b);
  }

  ScalarField operator-() const {
    double c = 0.0;
    if (is_constant(&c)) return ScalarField(-c);
    return unary(detail::UnOp::kNeg, *this);
  }

  ScalarField& operator+=(const ScalarField& b) { return *this = *this + b; }
  ScalarField& operator-=(const ScalarField& b) { return *this = *this - b; }
  ScalarField& operator*=(const ScalarField& b) { return *this = *this * b; }

  friend ScalarField sin(const ScalarField& a) { return unary(detail::UnOp::kSin, a); }
  friend ScalarField cos(const ScalarField& a) { return unary(detail::UnOp::kCos, a); }
  friend ScalarField exp(const ScalarField& a) { return unary(detail::UnOp::kExp, a); }
  friend ScalarField log(const ScalarField& a) { return unary(detail::UnOp::kLog, a); }
  friend ScalarField sqrt(const ScalarField& a) { return unary(detail::UnOp::kSqrt, a); }
  friend ScalarField pow(const ScalarField& a, int k) {
    if (k == 0) return ScalarField(1.0);
    if (k == 1) return a;
    return ScalarField(std::make_shared<detail::IntPowNode>(a.node_, k));
  }
  friend ScalarField pow(const ScalarField& a, double r) {
    return ScalarField(std::make_shared<detail::RealPowNode>(a.node_, r));
  }

 private:
  explicit ScalarField(detail::NodePtr n) : node_(std::move(n)) {}

  static ScalarField binary(detail::BinOp op, const ScalarField& a, const ScalarField& b) {
    return ScalarField(std::make_shared<detail::BinaryNode>(op, a.node_, b.node_));
  }
  static ScalarField unary(detail::UnOp op, const ScalarField& a) {
    return ScalarField(std::make_shared<detail::UnaryNode>(op, a.node_));
  }

  detail::NodePtr node_;
};

inline Jet eval_jet2(const ScalarField& field, const Point& p) { return field.eval(p); }

}  // namespace wfs
