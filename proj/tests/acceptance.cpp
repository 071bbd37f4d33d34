// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "wfs/fd_oracle.hpp"
#include "wfs/report.hpp"

using namespace wfs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct PaperCase {
  int n, s;
  double beta;
};

const std::vector<PaperCase> kPaperCases = {{1, 1, 1.0}, {1, 2, 2.0}, {2, 2, 0.5}, {2, 3, 2.0}};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string label(const PaperCase& c) {
  return "(" + std::to_string(c.n) + "," + std::to_string(c.s) + "," + fmt(c.beta) + ")";
}

CheckContext paper(const PaperCase& c, int samples, std::uint64_t seed = 20240501) {
  const WeakFStructure S = build_paper_example(c.n, c.s, c.beta);
  return CheckContext(S, draw_samples(S.chart, samples, seed), Tolerances::defaults(),
                      ExampleConfig{"paper_R2ns", c.n, c.s, c.beta});
}

CheckContext tangent(int n, int samples, std::uint64_t seed = 20240501) {
  const WeakFStructure S = build_unit_tangent_flat(n);
  return CheckContext(S, draw_samples(S.chart, samples, seed), Tolerances::defaults(),
                      ExampleConfig{"unit_tangent_flat", n, 1, 1.0});
}

const CheckReport* find(const std::vector<CheckReport>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const Flag* find_flag(const std::vector<Flag>& fs, const std::string& id) {
  for (const auto& f : fs) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

/// Requires `name` to pass with max residual at or below `bound`.
void expect_pass(Outcome& o, const std::vector<CheckReport>& rs, const std::string& name, double bound,
                 const std::string& where) {
  const CheckReport* r = find(rs, name);
  if (!r) {
    o.require(false, name + " missing " + where);
    return;
  }
  o.require(r->verdict == Verdict::kPass && r->max_residual <= bound,
            name + " " + where + " verdict=" + verdict_name(r->verdict) + " max=" + fmt(r->max_residual));
}

void expect_verdict(Outcome& o, const std::vector<CheckReport>& rs, const std::string& name, Verdict v,
                    const std::string& where) {
  const CheckReport* r = find(rs, name);
  o.require(r && r->verdict == v, name + " " + where + " expected " + verdict_name(v) + " got " +
                                      (r ? verdict_name(r->verdict) : std::string("missing")));
}

// ---------------------------------------------------------------------------

Outcome criterion_axioms() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& c : kPaperCases) {
    CheckContext ctx = paper(c, 200);
    for (const auto& r : run_checks(ctx, {"axioms"})) {
      worst = std::max(worst, r.max_residual);
      o.require(r.verdict == Verdict::kPass && r.samples == 200 && r.max_residual <= 1e-9,
                r.name + " at " + label(c) + " max=" + fmt(r.max_residual));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs <= 60.0, "took " + fmt(secs) + " s");
  o.detail = "worst axiom residual " + fmt(worst) + " over 4 x 200 samples in " + fmt(secs) + " s" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_paper_example() {
  Outcome o;
  std::vector<std::pair<double, double>> witness;  // (beta, measured coefficient)
  for (double beta : {0.5, 1.0, 2.0, 3.0}) {
    const PaperCase c{1, 1, beta};
    CheckContext ctx = paper(c, 20);
    const auto rs = run_checks(ctx, {"paper_example"});
    expect_pass(o, rs, "paper_example.d_eta_EF", 1e-10, label(c));
    expect_pass(o, rs, "paper_example.phi_EF", 1e-10, label(c));
    // by hand: eta(F) = eta(E) = 0 and [E, F] = 4 d/dz, so d eta(E, F) = -1/2 eta([E, F]) = -beta
    const AdaptedFrame fr = paper_frame(1, 1);
    for (const auto& p : ctx.samples().points) {
      const LocalStructure ls(ctx.structure(), p);
      const JetVec e = fr.E[0].at(p), f = fr.F[0].at(p);
      const double de = d_oneform(ls.eta_jet(0), e, f).value();
      const double ph = pair(e, ls.phi_jet(), f).value();
      o.require(std::abs(de + beta) <= 1e-10 && std::abs(ph + beta) <= 1e-10,
                "d eta(E,F)=" + fmt(de) + " Phi(E,F)=" + fmt(ph) + " at beta " + fmt(beta));
    }
    const bool a = ctx.hypothesis("condition_A").met, b = ctx.hypothesis("condition_B").met;
    o.require(a, "condition_A fails at beta " + fmt(beta));
    o.require(b == (beta == 1.0), "condition_B=" + std::to_string(b) + " at beta " + fmt(beta));
    const Flag* w = find_flag(ctx.flags(), "witness_coefficient");
    o.require(w && w->measured, "witness flag missing");
    if (w && w->measured) witness.emplace_back(beta, *w->measured);
  }
  // proportional to beta (beta^2 - 1): constant ratio away from 1, zero at 1
  std::vector<double> ratios;
  for (auto [beta, m] : witness) {
    const double shape = beta * (beta * beta - 1.0);
    if (shape == 0.0) {
      o.require(std::abs(m) <= 1e-10, "witness at beta 1 is " + fmt(m));
    } else {
      ratios.push_back(m / shape);
    }
  }
  for (double r : ratios) o.require(std::abs(r - ratios.front()) <= 1e-9, "witness ratio varies: " + fmt(r));
  if (o.ok && !ratios.empty()) {
    o.detail = "d eta(E,F) = Phi(E,F) = -beta; A holds for all beta, B only at 1; witness = " + fmt(ratios.front()) +
               " * beta(beta^2-1)";
  }
  return o;
}

Outcome criterion_coefficients() {
  Outcome o;
  std::string report;
  for (double beta : {0.5, 1.0, 2.0}) {
    const PaperCase c{1, 1, beta};
    CheckContext ctx = paper(c, 20);
    const auto rs = run_checks(ctx, {"paper_example"});
    expect_pass(o, rs, "paper_example.bracket_d_eta_consistency", 1e-9, label(c));
    const Flag* lie = find_flag(ctx.flags(), "lie_bracket_EF_coefficient");
    const Flag* nab = find_flag(ctx.flags(), "nabla_E1F1_coefficient");
    o.require(lie && lie->stated && lie->measured, "lie bracket flag missing");
    o.require(nab && nab->stated && nab->measured, "nabla flag missing");
    if (!(lie && lie->stated && lie->measured && nab && nab->stated && nab->measured)) continue;
    o.require(std::abs(*lie->stated - 4 * beta) <= 1e-12 && std::abs(*nab->stated - 2 * beta) <= 1e-12,
              "stated values are not 4 beta / 2 beta");
    report += " beta=" + fmt(beta) + ": [E,F] " + fmt(*lie->measured) + " (stated " + fmt(*lie->stated) +
              "), nabla_E F " + fmt(*nab->measured) + " (stated " + fmt(*nab->stated) + ");";
  }
  if (o.ok) o.detail = "2 d eta(E,F) = -eta([E,F]) holds; measured xibar-coefficients:" + report;
  return o;
}

Outcome criterion_identities() {
  Outcome o;
  for (const auto& c : kPaperCases) {
    CheckContext ctx = paper(c, 50);
    const auto rs = run_checks(ctx, {"structure", "condition_a", "curvature"});
    for (const char* name : {"structure.nabla_f_formula", "structure.nabla_reeb_f", "structure.h_asymmetry_n5",
                             "structure.n5_particular_values"}) {
      expect_pass(o, rs, name, 1e-8, label(c));
    }
    const bool a = ctx.hypothesis("condition_A").met;
    o.require(a, "condition_A unmet at " + label(c));
    for (const auto& r : rs) {
      if (r.name.rfind("condition_a.", 0) == 0) expect_pass(o, rs, r.name, 1e-8, label(c));
    }
    const Verdict want = c.beta == 1.0 ? Verdict::kPass : Verdict::kSkipped;
    expect_verdict(o, rs, "curvature.nabla_f_symmetrised", want, label(c));
    expect_verdict(o, rs, "curvature.reeb_curvature_long", want, label(c));
  }
  if (o.ok) o.detail = "general and condition-A identities pass; beta=1-only identities pass at 1, skipped elsewhere";
  return o;
}

Outcome criterion_nullity() {
  Outcome o;
  CheckContext p = paper({1, 1, 1.0}, 50);
  const NullityFit& fp = p.nullity().joint;
  o.require(std::abs(fp.kappa - 1.0) <= 1e-7, "R2ns kappa " + fmt(fp.kappa));
  o.require(!fp.mu_identifiable, "R2ns mu reported identifiable");

  CheckContext t = tangent(2, 50);
  const NullityFit& ft = t.nullity().joint;
  o.require(ft.mu_identifiable && std::abs(ft.kappa) <= 1e-6 && std::abs(ft.mu) <= 1e-6,
            "tangent fit (" + fmt(ft.kappa) + ", " + fmt(ft.mu) + ")");
  const auto rs = run_checks(t, {"kmu", "prop51"});
  expect_pass(o, rs, "kmu.spectrum", 1e-6, "T1E3");
  expect_pass(o, rs, "kmu.htilde_equal", 1e-6, "T1E3");
  expect_pass(o, rs, "prop51.htilde_equal", 1e-6, "T1E3");
  // spectrum straight from the eigen-split: 0 on xi, +-1 on D
  for (int k = 0; k < t.samples().size(); ++k) {
    const LocalStructure& ls = t.local()[k];
    o.require(detail::sup(Vec(ls.htilde(0) * ls.xi(0))) <= 1e-6, "htilde xi != 0");
    for (double ev : t.split(k, 0).eigenvalues) {
      o.require(std::abs(std::abs(ev) - 1.0) <= 1e-6, "eigenvalue " + fmt(ev));
    }
  }
  if (o.ok) {
    o.detail = "R2ns beta=1 kappa=" + fmt(fp.kappa) + " mu unidentifiable; T1E3 (kappa, mu)=(" + fmt(ft.kappa) + ", " +
               fmt(ft.mu) + "), spectrum {0, +-1}";
  }
  return o;
}

Outcome criterion_theorem1() {
  Outcome o;
  CheckContext t = tangent(2, 50);
  const auto rs = run_checks(t, {"theorem1"});
  for (const char* name : {"theorem1.minus_kerf_involutive", "theorem1.minus_kerf_geodesic",
                           "theorem1.plus_integrable_geodesic", "theorem1.minus_kerf_leaves_flat",
                           "theorem1.plus_curvature"}) {
    expect_pass(o, rs, name, 1e-6, "T1E3");
  }
  expect_pass(o, rs, "theorem1.plus_sectional", 1e-5, "T1E3");
  // independent: sectional curvature of the D+ plane and the curvature norm
  double kmin = 1e300, kmax = -1e300, rmin = 1e300;
  for (int k = 0; k < t.samples().size(); ++k) {
    const LocalStructure& ls = t.local()[k];
    const Mat& plus = t.split(k, 0).plus;
    if (plus.cols() < 2) {
      o.require(false, "D+ has dimension " + std::to_string(plus.cols()));
      continue;
    }
    const Vec x = plus.col(0), y = plus.col(1);
    const double num = ls.conn().curvature4(x, y, y, x);
    const double den = ls.g(x, x) * ls.g(y, y) - ls.g(x, y) * ls.g(x, y);
    kmin = std::min(kmin, num / den);
    kmax = std::max(kmax, num / den);
    rmin = std::min(rmin, t.curvature_norm(k));
  }
  o.require(std::abs(kmin - 4.0) <= 1e-5 && std::abs(kmax - 4.0) <= 1e-5,
            "K+ in [" + fmt(kmin) + ", " + fmt(kmax) + "]");
  o.require(rmin >= 3.0, "|R| down to " + fmt(rmin));
  if (o.ok) o.detail = "closure, geodesy, flatness, D+ curvature ok; K+ = 4; min |R| = " + fmt(rmin);
  return o;
}

Outcome criterion_theorem2() {
  Outcome o;
  CheckContext t = tangent(1, 50);
  const auto rs = run_checks(t, {"theorem2"});
  for (const auto& r : rs) expect_pass(o, rs, r.name, 1e-6, "T1E2");
  o.require(rs.size() >= 7, "theorem2 group has " + std::to_string(rs.size()) + " checks");
  double rmax = 0.0;
  for (int k = 0; k < t.samples().size(); ++k) rmax = std::max(rmax, t.curvature_norm(k));
  o.require(rmax <= 1e-6, "|R| up to " + fmt(rmax));
  CheckContext p = paper({1, 1, 1.0}, 50);
  expect_pass(o, run_checks(p, {"kappa1"}), "kappa1.s_manifold", 1e-8, "R2ns beta=1");
  if (o.ok) o.detail = "T1E2 table holds, |R| <= " + fmt(rmax) + "; R2ns at beta=1 is an S-manifold";
  return o;
}

Outcome criterion_engine() {
  Outcome o;
  const WeakFStructure S = build_paper_example(1, 1, 2.0);
  const SampleSet smp = draw_samples(S.chart, 20, 11);
  double eg = 0, eh = 0, ec = 0;
  const double h = 1e-4, hc = 1e-5;
  const int d = S.dim();
  for (const Point& p : smp.points) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) {
        const Jet jet = S.g(i, j).eval(p);
        const FdDerivatives fd = fd_oracle(S.g(i, j), S.chart, p, h);
        for (int a = 0; a < d; ++a) {
          eg = std::max(eg, std::abs(jet.d(a) - fd.grad[a]));
          for (int b = 0; b < d; ++b) eh = std::max(eh, std::abs(jet.d2(a, b) - fd.hess[a][b]));
        }
      }
    }
    // curvature against central differences of the Christoffel symbols
    const LocalConnection c(S.g.at(p));
    const Christoffel g0 = christoffel(S.g, p);
    std::vector<Christoffel> up, dn;
    for (int i = 0; i < d; ++i) {
      Point a = p, b = p;
      a.x[i] += hc;
      b.x[i] -= hc;
      up.push_back(christoffel(S.g, a));
      dn.push_back(christoffel(S.g, b));
    }
    for (int l = 0; l < d; ++l) {
      for (int k = 0; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            double r = (up[i](l, j, k) - dn[i](l, j, k) - up[j](l, i, k) + dn[j](l, i, k)) / (2 * hc);
            for (int m = 0; m < d; ++m) r += g0(l, i, m) * g0(m, j, k) - g0(l, j, m) * g0(m, i, k);
            ec = std::max(ec, std::abs(c.riemann(l, k, i, j) - r));
          }
        }
      }
    }
  }
  o.require(eg <= 1e-6, "grad error " + fmt(eg));
  o.require(eh <= 1e-4, "hessian error " + fmt(eh));
  o.require(ec <= 1e-5, "curvature error " + fmt(ec));
  for (const auto& c : kPaperCases) {
    CheckContext ctx = paper(c, 50);
    const auto rs = run_checks(ctx, {"engine"});
    for (const char* name : {"engine.curvature_symmetries", "engine.first_bianchi", "engine.nijenhuis_dual_path"}) {
      expect_pass(o, rs, name, 1e-8, label(c));
    }
  }
  if (o.ok) {
    o.detail = "AD vs FD on 20 points: grad " + fmt(eg) + ", hess " + fmt(eh) + ", curvature " + fmt(ec) +
               "; symmetries, Bianchi, Nijenhuis dual path <= 1e-8";
  }
  return o;
}

Outcome criterion_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("wfs_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path cfg = dir / "suite.json";
  {
    std::ofstream out(cfg);
    out << R"({"family": "paper_R2ns", "n": 2, "s": 2, "beta": 2.0, "seed": 42, "samples": 20, "checks": "all"})";
  }
  auto run = [&](const fs::path& out) {
    const std::string cmd = std::string("\"") + WFS_CLI_PATH + "\" suite --config \"" + cfg.string() + "\" --out \"" +
                            out.string() + "\" >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  run(dir / "a.json");
  run(dir / "b.json");
  const std::string a = slurp(dir / "a.json"), b = slurp(dir / "b.json");
  o.require(!a.empty(), "no report written");
  o.require(a == b, "reports differ");
  if (o.ok) o.detail = "two suite runs gave identical " + std::to_string(a.size()) + "-byte reports";
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"1 axioms", criterion_axioms},
      {"2 Heisenberg-type example", criterion_paper_example},
      {"3 xibar coefficients", criterion_coefficients},
      {"4 identities", criterion_identities},
      {"5 nullity", criterion_nullity},
      {"6 curvature bound on T1E3", criterion_theorem1},
      {"7 flat S-manifold on T1E2", criterion_theorem2},
      {"8 engine oracles", criterion_engine},
      {"9 determinism", criterion_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.ok ? 0 : 1;
  }
  return failed ? 1 : 0;
}
