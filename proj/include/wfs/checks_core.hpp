#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wfs/examples.hpp"
#include "wfs/structure.hpp"

namespace wfs {

class HypothesisUnmet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { kPass, kFail, kSkipped, kVacuous };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kSkipped: return "skipped-hypothesis-unmet";
    case Verdict::kVacuous: return "vacuous";
  }
  return "fail";
}

inline Verdict verdict_from_name(const std::string& s) {
  if (s == "pass") return Verdict::kPass;
  if (s == "skipped-hypothesis-unmet") return Verdict::kSkipped;
  if (s == "vacuous") return Verdict::kVacuous;
  return Verdict::kFail;
}

struct HypothesisResult {
  std::string name;
  bool met = false;
  double residual = 0.0;
  double tolerance = 0.0;

  bool operator==(const HypothesisResult&) const = default;
};

struct CheckReport {
  std::string name;
  std::string paper_ref;
  std::vector<HypothesisResult> hypotheses;
  int samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::kFail;

  bool operator==(const CheckReport&) const = default;
};

/// A structural finding recorded next to the checks: a value stated for a
/// worked example against the value measured, or a printed formula against
/// the form that holds.
struct Flag {
  std::string id;
  std::string description;
  std::optional<double> stated;
  std::optional<double> measured;
  bool consistent = false;

  bool operator==(const Flag&) const = default;
};

/// Tolerances by class, overridable per check name.
class Tolerances {
 public:
  static Tolerances defaults() {
    Tolerances t;
    t.values_ = {{"axiom", 1e-9},    {"identity", 1e-8}, {"hypothesis", 1e-9},
                 {"nullity", 1e-6},  {"eigen", 1e-6},    {"theorem", 1e-7},
                 {"sectional", 1e-5}, {"ground_truth", 1e-10}, {"fd", 1e-5}};
    return t;
  }

  double get(const std::string& name, const std::string& cls) const {
    if (auto it = values_.find(name); it != values_.end()) return it->second;
    if (auto it = values_.find(cls); it != values_.end()) return it->second;
    throw ConfigError("no tolerance for class '" + cls + "'");
  }

  void set(const std::string& key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance '" + key + "' must be positive");
    values_[key] = v;
  }

  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

/// Max / mean over per-sample residuals.  Non-finite residuals count as
/// the largest double so that they fail and still serialise.
class Accumulator {
 public:
  void add(double r) {
    if (!std::isfinite(r)) r = std::numeric_limits<double>::max();
    max_ = std::max(max_, r);
    sum_ += r;
    ++count_;
  }
  int count() const { return count_; }
  double max() const { return max_; }
  double mean() const { return count_ ? std::min(sum_ / count_, std::numeric_limits<double>::max()) : 0.0; }

 private:
  double max_ = 0.0, sum_ = 0.0;
  int count_ = 0;
};

struct NullityFit {
  double kappa = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  bool mu_identifiable = false;
};

struct NullityFits {
  NullityFit joint;
  std::vector<NullityFit> per_reeb;
};

namespace detail {

inline Vec unit(int d, int k) {
  Vec e = Vec::Zero(d);
  e[k] = 1.0;
  return e;
}

inline double sup(const Vec& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
inline double sup(const Mat& m) { return m.size() ? m.lpNorm<Eigen::Infinity>() : 0.0; }

/// Residual of a quantity that should vanish, relative to a reference scale.
inline double vanish(const Vec& v, double scale = 1.0) { return sup(v) / std::max(1.0, scale); }
inline double vanish(const Mat& m, double scale = 1.0) { return sup(m) / std::max(1.0, scale); }
inline double vanish(double x, double scale = 1.0) { return std::abs(x) / std::max(1.0, scale); }

/// Least squares in the g-inner product: R ~ kappa A + mu B.
struct NormalEq {
  double aa = 0, ab = 0, bb = 0, ar = 0, br = 0;
  void add(const LocalStructure& ls, const Vec& a, const Vec& b, const Vec& r) {
    aa += ls.g(a, a);
    ab += ls.g(a, b);
    bb += ls.g(b, b);
    ar += ls.g(a, r);
    br += ls.g(b, r);
  }
};

}  // namespace detail

/// Shared state of one suite run: the structure, the sample set, the
/// per-point local data and cached hypothesis outcomes.
class CheckContext {
 public:
  CheckContext(const WeakFStructure& S, SampleSet samples, Tolerances tol,
               std::optional<ExampleConfig> example = std::nullopt)
      : S_(S), samples_(std::move(samples)), tol_(std::move(tol)), example_(std::move(example)) {
    S_.check_shapes();
  }

  const WeakFStructure& structure() const { return S_; }
  const SampleSet& samples() const { return samples_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::optional<ExampleConfig>& example() const { return example_; }
  std::vector<Flag>& flags() { return flags_; }

  const std::vector<LocalStructure>& local() {
    if (!local_) local_ = std::make_unique<std::vector<LocalStructure>>(evaluate(S_, samples_));
    return *local_;
  }

  const EigenSplit& split(int k, int i) {
    auto key = std::make_pair(k, i);
    auto it = splits_.find(key);
    if (it == splits_.end()) {
      it = splits_.emplace(key, eigen_split(local()[k], i, tol_.get("eigen_split", "eigen"))).first;
    }
    return it->second;
  }

  double curvature_norm(int k) {
    auto it = rnorm_.find(k);
    if (it == rnorm_.end()) it = rnorm_.emplace(k, curvature_norm_estimate(local()[k].conn())).first;
    return it->second;
  }

  const NullityFits& nullity() {
    if (!fits_) fits_ = std::make_unique<NullityFits>(fit_nullity());
    return *fits_;
  }

  const HypothesisResult& hypothesis(const std::string& name) {
    auto it = hyp_.find(name);
    if (it == hyp_.end()) it = hyp_.emplace(name, evaluate_hypothesis(name)).first;
    return it->second;
  }

 private:
  HypothesisResult make(const std::string& name, double residual, const std::string& cls) {
    HypothesisResult h;
    h.name = name;
    h.residual = residual;
    h.tolerance = tol_.get(name, cls);
    h.met = residual <= h.tolerance;
    return h;
  }

  HypothesisResult evaluate_hypothesis(const std::string& name) {
    const auto& L = local();
    const int d = S_.dim(), s = S_.s;
    double worst = 0.0;
    if (name == "weak_almost_S") {
      // Phi = d eta^i on coordinate fields
      for (const auto& ls : L) {
        for (int i = 0; i < s; ++i) {
          for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
              const JetVec ea = constant_jets(detail::unit(d, a), d), eb = constant_jets(detail::unit(d, b), d);
              const double de = d_oneform(ls.eta_jet(i), ea, eb).value();
              const double ph = ls.phi_jet()(a, b).value();
              worst = std::max(worst, scaled_residual(ph, de));
            }
          }
        }
      }
      return make(name, worst, "hypothesis");
    }
    if (name == "condition_A") {
      for (const auto& ls : L) {
        for (int i = 0; i < s; ++i) worst = std::max(worst, detail::vanish(ls.lieQ(i), detail::sup(ls.Q())));
      }
      return make(name, worst, "hypothesis");
    }
    if (name == "condition_B") {
      for (const auto& ls : L) {
        const Mat b = contact_basis(ls);
        for (int a = 0; a < b.cols(); ++a) {
          const Mat nq = ls.conn().nabla_tensor(ls.Q_jet(), b.col(a));
          for (int c = 0; c < b.cols(); ++c) {
            worst = std::max(worst, detail::vanish(Vec(nq * b.col(c)), detail::sup(ls.Q())));
          }
        }
      }
      return make(name, worst, "hypothesis");
    }
    if (name == "reeb_flat") {
      for (const auto& ls : L) {
        for (int a = 0; a < d; ++a) {
          for (int b = a + 1; b < d; ++b) {
            const Mat r = ls.conn().curvature_operator(detail::unit(d, a), detail::unit(d, b));
            for (int i = 0; i < s; ++i) worst = std::max(worst, detail::vanish(Vec(r * ls.xi(i))));
          }
        }
      }
      return make(name, worst, "nullity");
    }
    if (name == "nullity") return make(name, nullity().joint.residual, "nullity");
    if (name == "kappa_one") return make(name, std::abs(nullity().joint.kappa - 1.0), "nullity");
    if (name == "n_equals_1") {
      HypothesisResult h{name, S_.n == 1, static_cast<double>(S_.n - 1), 0.0};
      return h;
    }
    if (name == "q_tilde_zero") {
      for (const auto& ls : L) worst = std::max(worst, detail::vanish(ls.Qt()));
      return make(name, worst, "hypothesis");
    }
    if (name == "lambda_positive") {
      // the spectrum of tilde h_1 must have a non-zero part at every sample
      double lam = std::numeric_limits<double>::max();
      for (int k = 0; k < static_cast<int>(L.size()); ++k) lam = std::min(lam, split(k, 0).lambda);
      HypothesisResult h;
      h.name = name;
      h.tolerance = tol_.get(name, "eigen");
      h.residual = L.empty() ? 0.0 : lam;
      h.met = !L.empty() && lam > h.tolerance;
      return h;
    }
    throw std::logic_error("unknown hypothesis '" + name + "'");
  }

  /// R_{X,Y} xi_i = kappa (etabar(X) f^2 Y - etabar(Y) f^2 X)
  ///              + mu (etabar(Y) h_i X - etabar(X) h_i Y)
  /// fitted over coordinate pairs at every sample.
  NullityFits fit_nullity() {
    const auto& L = local();
    const int d = S_.dim(), s = S_.s;
    struct Term {
      Vec a, b, r;
      int k, i;
    };
    std::vector<Term> terms;
    double hsum = 0.0;
    for (int k = 0; k < static_cast<int>(L.size()); ++k) {
      const auto& ls = L[k];
      const Mat f2 = ls.f() * ls.f();
      for (int i = 0; i < s; ++i) hsum += detail::sup(ls.h(i));
      for (int p = 0; p < d; ++p) {
        for (int q = p + 1; q < d; ++q) {
          const Vec x = detail::unit(d, p), y = detail::unit(d, q);
          const Mat rxy = ls.conn().curvature_operator(x, y);
          const double ex = ls.etabar().dot(x), ey = ls.etabar().dot(y);
          for (int i = 0; i < s; ++i) {
            Term t;
            t.a = ex * (f2 * y) - ey * (f2 * x);
            t.b = ey * (ls.h(i) * x) - ex * (ls.h(i) * y);
            t.r = rxy * ls.xi(i);
            t.k = k;
            t.i = i;
            terms.push_back(std::move(t));
          }
        }
      }
    }
    const bool identifiable = hsum >= 1e-10;
    auto solve = [&](int only_i) {
      detail::NormalEq ne;
      for (const Term& t : terms) {
        if (only_i >= 0 && t.i != only_i) continue;
        ne.add(L[t.k], t.a, t.b, t.r);
      }
      NullityFit fit;
      fit.mu_identifiable = identifiable;
      if (identifiable) {
        const double det = ne.aa * ne.bb - ne.ab * ne.ab;
        if (std::abs(det) > 1e-14 * std::max(1.0, ne.aa * ne.bb)) {
          fit.kappa = (ne.ar * ne.bb - ne.br * ne.ab) / det;
          fit.mu = (ne.aa * ne.br - ne.ab * ne.ar) / det;
        } else {
          fit.mu_identifiable = false;
        }
      }
      if (!fit.mu_identifiable) {
        fit.kappa = ne.aa > 0.0 ? ne.ar / ne.aa : 0.0;
        fit.mu = 0.0;
      }
      double worst = 0.0;
      for (const Term& t : terms) {
        if (only_i >= 0 && t.i != only_i) continue;
        const Vec res = t.r - fit.kappa * t.a - fit.mu * t.b;
        worst = std::max(worst, detail::vanish(res, detail::sup(t.r)));
      }
      fit.residual = worst;
      return fit;
    };
    NullityFits out;
    out.joint = solve(-1);
    for (int i = 0; i < s; ++i) out.per_reeb.push_back(solve(i));
    return out;
  }

  WeakFStructure S_;
  SampleSet samples_;
  Tolerances tol_;
  std::optional<ExampleConfig> example_;
  std::vector<Flag> flags_;
  std::unique_ptr<std::vector<LocalStructure>> local_;
  std::map<std::pair<int, int>, EigenSplit> splits_;
  std::map<int, double> rnorm_;
  std::unique_ptr<NullityFits> fits_;
  std::map<std::string, HypothesisResult> hyp_;
};

// ---------------------------------------------------------------------------
// Running one check.

struct CheckSpec {
  std::string name;
  std::string paper_ref;
  std::string tol_class;
  std::vector<std::string> hypotheses;
};

/// Residual at one sample; an empty optional marks a sample on which the
/// statement has nothing to test.
using PointFn = std::function<std::optional<double>(const LocalStructure&, int)>;

inline CheckReport run_check(CheckContext& ctx, const CheckSpec& spec, const PointFn& fn) {
  CheckReport r;
  r.name = spec.name;
  r.paper_ref = spec.paper_ref;
  r.tolerance = ctx.tolerances().get(spec.name, spec.tol_class);
  bool met = true;
  for (const auto& h : spec.hypotheses) {
    const HypothesisResult& hr = ctx.hypothesis(h);
    r.hypotheses.push_back(hr);
    met = met && hr.met;
  }
  if (!met) {
    r.verdict = Verdict::kSkipped;
    return r;
  }
  Accumulator acc;
  const auto& L = ctx.local();
  try {
    for (int k = 0; k < static_cast<int>(L.size()); ++k) {
      if (auto v = fn(L[k], k)) acc.add(*v);
    }
  } catch (const std::exception& e) {
    ctx.flags().push_back(Flag{"error." + spec.name, e.what(), std::nullopt, std::nullopt, false});
    acc.add(std::numeric_limits<double>::infinity());
  }
  r.samples = acc.count();
  r.max_residual = acc.max();
  r.mean_residual = acc.mean();
  if (acc.count() == 0) {
    r.verdict = Verdict::kVacuous;
  } else {
    r.verdict = acc.max() <= r.tolerance ? Verdict::kPass : Verdict::kFail;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Taxonomy.

struct TaxonomyEntry {
  std::string name;
  bool holds = false;
  double residual = 0.0;
};

struct Taxonomy {
  std::vector<TaxonomyEntry> entries;

  bool holds(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e.holds;
    }
    throw std::out_of_range("no taxonomy entry '" + name + "'");
  }
};

/// Residuals of d Phi, d eta^i, Phi - d eta^i, L_xi g and N1 over the
/// samples, and the classes they imply.
inline Taxonomy classify(CheckContext& ctx) {
  const auto& L = ctx.local();
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const double tol = ctx.tolerances().get("classify", "identity");
  double dphi = 0, deta = 0, was = 0, normal = 0;
  std::vector<double> killing(s, 0.0);
  for (int k = 0; k < static_cast<int>(L.size()); ++k) {
    const auto& ls = L[k];
    const auto& F = smp.fields[k];
    dphi = std::max(dphi, detail::vanish(d_twoform(ls.phi_jet(), F[0], F[1], F[2]).value()));
    const double ph = pair(F[0], ls.phi_jet(), F[1]).value();
    for (int i = 0; i < s; ++i) {
      const double de = d_oneform(ls.eta_jet(i), F[0], F[1]).value();
      deta = std::max(deta, detail::vanish(de));
      was = std::max(was, scaled_residual(ph, de));
      const Mat gn = ls.G() * values(ls.nabla_xi_jet(i));
      killing[i] = std::max(killing[i], detail::vanish(Mat(gn + gn.transpose())));
    }
    normal = std::max(normal, detail::vanish(values(ls.n1(F[0], F[1]))));
  }
  Taxonomy t;
  t.entries.push_back({"weak_almost_K", dphi <= tol, dphi});
  t.entries.push_back({"weak_almost_C", dphi <= tol && deta <= tol, std::max(dphi, deta)});
  t.entries.push_back({"weak_almost_S", was <= tol, was});
  for (int i = 0; i < s; ++i) {
    t.entries.push_back({"xi" + std::to_string(i + 1) + "_killing", killing[i] <= tol, killing[i]});
  }
  t.entries.push_back({"normal", normal <= tol, normal});
  return t;
}

}  // namespace wfs
