#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wfs/jet_linalg.hpp"
#include "wfs/scalar_field.hpp"

namespace wfs {

/// Uniform doubles from a 64-bit Mersenne twister, converted by hand so the
/// stream is the same on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  Vec uniform_vec(int n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

/// Points plus, at each point, a few random local vector fields
/// X(q) = a + B (q - p) with a and B uniform in [-1, 1], and a few raw
/// coefficient vectors for building vectors inside sub-bundles.
struct SampleSet {
  std::uint64_t seed = 0;
  std::vector<Point> points;
  std::vector<std::vector<JetVec>> fields;
  std::vector<std::vector<Vec>> coeffs;

  int size() const { return static_cast<int>(points.size()); }
};

inline constexpr int kFieldsPerPoint = 4;

inline SampleSet draw_samples(const ChartSpec& chart, int count, std::uint64_t seed) {
  chart.validate();
  const int n = chart.dim();
  Rng rng(seed);
  SampleSet s;
  s.seed = seed;
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(chart.box[i].first, chart.box[i].second);
    s.points.emplace_back(std::move(x));
    std::vector<JetVec> fs;
    for (int f = 0; f < kFieldsPerPoint; ++f) {
      JetVec v;
      for (int i = 0; i < n; ++i) {
        const double a = rng.uniform(-1.0, 1.0);
        const Vec b = rng.uniform_vec(n);
        v.push_back(Jet::affine(n, a, b));
      }
      fs.push_back(std::move(v));
    }
    s.fields.push_back(std::move(fs));
    std::vector<Vec> cs;
    for (int f = 0; f < kFieldsPerPoint; ++f) cs.push_back(rng.uniform_vec(n));
    s.coeffs.push_back(std::move(cs));
  }
  return s;
}

}  // namespace wfs
