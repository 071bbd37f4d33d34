#pragma once

#include <set>
#include <sstream>

#include "wfs/checks_core.hpp"

namespace wfs {

namespace detail {

inline Vec combo(const Mat& basis, const Vec& c) {
  if (basis.cols() == 0) return Vec::Zero(basis.rows());
  return basis * c.head(basis.cols());
}

/// Orthogonal projector onto the span of g-orthonormal columns.
inline Mat projector(const Mat& basis, const Mat& gmat) { return basis * basis.transpose() * gmat; }

inline Mat hcat(const Mat& a, const Mat& b) {
  Mat r(a.rows(), a.cols() + b.cols());
  r << a, b;
  return r;
}

/// g-unit vector along v (v must not vanish).
inline Vec unit_g(const LocalStructure& ls, const Vec& v) { return v / std::sqrt(ls.g(v, v)); }

inline Mat sum_xi_eta(const LocalStructure& ls) {
  Mat m = Mat::Zero(ls.dim(), ls.dim());
  for (int i = 0; i < ls.s(); ++i) m += ls.xi(i) * ls.eta(i).transpose();
  return m;
}

/// Q~ Q (I - h~_j), the operator inside the weak correction terms.
inline Mat weak_term(const LocalStructure& ls, int j) {
  const int d = ls.dim();
  return ls.Qt() * ls.Q() * (Mat::Identity(d, d) - ls.htilde(j));
}

inline double max_abs(std::initializer_list<double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

using ReportList = std::vector<CheckReport>;

// ---------------------------------------------------------------------------
// Axioms of a weak metric f-structure.

inline ReportList group_axioms(CheckContext& ctx) {
  const int n = ctx.structure().n;
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, "axiom", {}}, fn));
  };
  add("axioms.f_squared", "f^2 = -Q + sum_i eta^i (x) xi_i", [](const LocalStructure& ls, int) {
    return std::optional(scaled_residual(Mat(ls.f() * ls.f()), Mat(-ls.Q() + detail::sum_xi_eta(ls))));
  });
  add("axioms.eta_xi_dual", "eta^i(xi_j) = delta^i_j", [](const LocalStructure& ls, int) {
    Mat m(ls.s(), ls.s());
    for (int i = 0; i < ls.s(); ++i) {
      for (int j = 0; j < ls.s(); ++j) m(i, j) = ls.eta(i).dot(ls.xi(j));
    }
    return std::optional(scaled_residual(m, Mat(Mat::Identity(ls.s(), ls.s()))));
  });
  add("axioms.Q_fixes_xi", "Q xi_i = xi_i", [](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < ls.s(); ++i) r = std::max(r, scaled_residual(Vec(ls.Q() * ls.xi(i)), ls.xi(i)));
    return std::optional(r);
  });
  add("axioms.compatible_metric", "g(fX,fY) = g(X,QY) - sum_i eta^i(X) eta^i(Y)",
      [](const LocalStructure& ls, int) {
        Mat ee = Mat::Zero(ls.dim(), ls.dim());
        for (int i = 0; i < ls.s(); ++i) ee += ls.eta(i) * ls.eta(i).transpose();
        return std::optional(
            scaled_residual(Mat(ls.f().transpose() * ls.G() * ls.f()), Mat(ls.G() * ls.Q() - ee)));
      });
  add("axioms.f_kills_xi", "f xi_i = 0", [](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < ls.s(); ++i) r = std::max(r, detail::vanish(Vec(ls.f() * ls.xi(i))));
    return std::optional(r);
  });
  add("axioms.eta_f", "eta^i o f = 0", [](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < ls.s(); ++i) r = std::max(r, detail::vanish(Vec(ls.f().transpose() * ls.eta(i))));
    return std::optional(r);
  });
  add("axioms.eta_Q", "eta^i o Q = eta^i", [](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < ls.s(); ++i) {
      r = std::max(r, scaled_residual(Vec(ls.Q().transpose() * ls.eta(i)), ls.eta(i)));
    }
    return std::optional(r);
  });
  add("axioms.Q_f_commute", "Q f = f Q", [](const LocalStructure& ls, int) {
    return std::optional(scaled_residual(Mat(ls.Q() * ls.f()), Mat(ls.f() * ls.Q())));
  });
  add("axioms.f_skew", "g(fX,Y) = -g(X,fY)", [](const LocalStructure& ls, int) {
    const Mat gf = ls.G() * ls.f();
    return std::optional(scaled_residual(gf, Mat(-gf.transpose())));
  });
  add("axioms.Q_selfadjoint", "g(QX,Y) = g(X,QY)", [](const LocalStructure& ls, int) {
    const Mat gq = ls.G() * ls.Q();
    return std::optional(scaled_residual(gq, Mat(gq.transpose())));
  });
  add("axioms.Q_positive", "g(QX,X) > 0 for X != 0 (0 when positive definite, else 1)",
      [](const LocalStructure& ls, int) {
        const Mat e = orthonormal_frame(ls.G());
        const Mat a = e.transpose() * ls.G() * ls.Q() * e;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
        return std::optional(es.eigenvalues().minCoeff() > 0.0 ? 0.0 : 1.0);
      });
  add("axioms.rank_f", "rank f = 2n (0 when the rank matches, else 1)", [n](const LocalStructure& ls, int) {
    const Mat e = orthonormal_frame(ls.G());
    Eigen::JacobiSVD<Mat> svd(Mat(e.transpose() * ls.G() * ls.f() * e));
    const Vec sv = svd.singularValues();
    const double cut = 1e-8 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > cut ? 1 : 0;
    return std::optional(rank == 2 * n ? 0.0 : 1.0);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Engine self-consistency: connection, curvature and dual code paths.

inline ReportList group_engine(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int d = ctx.structure().dim(), s = ctx.structure().s;
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, cls, {}}, fn));
  };
  add("engine.metric_compatibility", "nabla g = 0", "axiom", [d](const LocalStructure& ls, int) {
    double r = 0;
    for (int j = 0; j < d; ++j) {
      r = std::max(r, detail::vanish(ls.conn().nabla_covariant2(ls.conn().metric(), detail::unit(d, j)),
                                     detail::sup(ls.G())));
    }
    return std::optional(r);
  });
  add("engine.torsion_free", "nabla_X Y - nabla_Y X = [X,Y]", "axiom", [&](const LocalStructure& ls, int k) {
    const auto& F = smp.fields[k];
    const Vec a = values(ls.conn().nabla(F[0], F[1])), b = values(ls.conn().nabla(F[1], F[0]));
    const Vec c = values(bracket(F[0], F[1]));
    return std::optional(scaled_residual(Vec(a - b), c));
  });
  add("engine.curvature_symmetries",
      "R_{X,Y} = -R_{Y,X};  g(R_{X,Y}Z,W) = -g(R_{X,Y}W,Z) = g(R_{Z,W}X,Y)", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const auto& c = ls.conn();
        const Vec rxy = c.curvature(C[0], C[1], C[2]), ryx = c.curvature(C[1], C[0], C[2]);
        const double a = c.curvature4(C[0], C[1], C[2], C[3]);
        const double b = c.curvature4(C[0], C[1], C[3], C[2]);
        const double e = c.curvature4(C[2], C[3], C[0], C[1]);
        const double scale = std::max({detail::sup(rxy), std::abs(a), std::abs(b), std::abs(e)});
        return std::optional(std::max({detail::vanish(Vec(rxy + ryx), scale), detail::vanish(a + b, scale),
                                       detail::vanish(a - e, scale)}));
      });
  add("engine.first_bianchi", "R_{X,Y}Z + R_{Y,Z}X + R_{Z,X}Y = 0", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const auto& c = ls.conn();
        const Vec a = c.curvature(C[0], C[1], C[2]), b = c.curvature(C[1], C[2], C[0]),
                  e = c.curvature(C[2], C[0], C[1]);
        const double scale = std::max({detail::sup(a), detail::sup(b), detail::sup(e)});
        return std::optional(detail::vanish(Vec(a + b + e), scale));
      });
  add("engine.nijenhuis_dual_path",
      "[S,S](X,Y) by brackets equals (S nabla_Y S - nabla_{SY} S)X - (S nabla_X S - nabla_{SX} S)Y, S = f, Q",
      "identity", [&](const LocalStructure& ls, int k) {
        const auto& F = smp.fields[k];
        double r = 0;
        for (const JetMat* t : {&ls.f_jet(), &ls.Q_jet()}) {
          const Vec a = values(nijenhuis(*t, F[0], F[1]));
          const Vec b = nijenhuis_nabla(ls.conn(), *t, values(F[0]), values(F[1]));
          r = std::max(r, scaled_residual(a, b));
        }
        return std::optional(r);
      });
  add("engine.d_squared", "d(d eta^i) = 0", "axiom", [&](const LocalStructure& ls, int k) {
    const auto& F = smp.fields[k];
    double r = 0;
    for (int i = 0; i < s; ++i) {
      const JetVec& eta = ls.eta_jet(i);
      JetMat de(d, d);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          de(a, b) = ExteriorConvention::kOneForm * (eta[b].partial(a) - eta[a].partial(b));
        }
      }
      r = std::max(r, detail::vanish(d_twoform(de, F[0], F[1], F[2]).value()));
    }
    return std::optional(r);
  });
  add("engine.nabla_phi_vs_nabla_f", "(nabla_X Phi)(Y,Z) = g(Y, (nabla_X f)Z)", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const double a = ls.conn().nabla_twoform(ls.phi_jet(), C[0], C[1], C[2]);
        const double b = ls.g(C[1], ls.conn().nabla_tensor(ls.f_jet(), C[0]) * C[2]);
        return std::optional(scaled_residual(a, b));
      });
  add("engine.nabla_Q_tilde", "(nabla_X Q~)Y = (nabla_X Q)Y", "identity", [&](const LocalStructure& ls, int k) {
    const auto& C = smp.coeffs[k];
    return std::optional(scaled_residual(Vec(ls.conn().nabla_tensor(ls.Qt_jet(), C[0]) * C[1]),
                                         Vec(ls.conn().nabla_tensor(ls.Q_jet(), C[0]) * C[1])));
  });
  add("engine.n2_dual_path",
      "(L_{fX} eta^i)(Y) - (L_{fY} eta^i)(X) = 2 d eta^i(fX,Y) - 2 d eta^i(fY,X)", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& F = smp.fields[k];
        double r = 0;
        for (int i = 0; i < s; ++i) {
          r = std::max(r, scaled_residual(ls.n2(i, F[0], F[1]).value(), ls.n2_lie(i, F[0], F[1]).value()));
        }
        return std::optional(r);
      });
  add("engine.n4_dual_path", "xi_i(eta^j(X)) - eta^j([xi_i,X]) = 2 d eta^j(xi_i, X)", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& F = smp.fields[k];
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            r = std::max(r, scaled_residual(ls.n4(i, j, F[0]).value(),
                                            2.0 * d_oneform(ls.eta_jet(j), ls.xi_jet(i), F[0]).value()));
          }
        }
        return std::optional(r);
      });
  return out;
}

// ---------------------------------------------------------------------------
// Identities of weak almost S-structures with no further hypothesis.

inline ReportList group_structure(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> was = {"weak_almost_S"};
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, std::vector<std::string> hyp, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, "identity", std::move(hyp)}, fn));
  };
  add("structure.d_phi_closed", "d Phi = 0", was, [&](const LocalStructure& ls, int k) {
    const auto& F = smp.fields[k];
    return std::optional(detail::vanish(d_twoform(ls.phi_jet(), F[0], F[1], F[2]).value()));
  });
  add("structure.n2_vanishes", "N2_i(X,Y) = 0", was, [&](const LocalStructure& ls, int k) {
    const auto& F = smp.fields[k];
    double r = 0;
    for (int i = 0; i < s; ++i) {
      r = std::max({r, detail::vanish(ls.n2(i, F[0], F[1]).value()), detail::vanish(ls.n2(i, F[2], F[3]).value())});
    }
    return std::optional(r);
  });
  add("structure.n4_vanishes", "N4_ij(X) = 0", was, [&](const LocalStructure& ls, int k) {
    const auto& F = smp.fields[k];
    double r = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(ls.n4(i, j, F[0]).value()));
    }
    return std::optional(r);
  });
  add("structure.reeb_geodesic", "nabla_{xi_i} xi_j = 0", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(ls.conn().nabla(ls.xi(i), ls.xi_jet(j))));
    }
    return std::optional(r);
  });
  add("structure.kerf_leaves_flat", "R_{xi_i,xi_j} xi_k = 0", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        for (int l = 0; l < s; ++l) {
          r = std::max(r, detail::vanish(ls.conn().curvature(ls.xi(i), ls.xi(j), ls.xi(l))));
        }
      }
    }
    return std::optional(r);
  });
  add("structure.h_kills_reeb", "h_i xi_j = 0", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(Vec(ls.h(i) * ls.xi(j))));
    }
    return std::optional(r);
  });
  add("structure.eta_h", "eta^j o h_i = 0", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(Vec(ls.h(i).transpose() * ls.eta(j))));
    }
    return std::optional(r);
  });
  {
    const double t = ctx.tolerances().get("structure.killing_iff_n3", "identity");
    add("structure.killing_iff_n3",
        "N3_i = 0 exactly when (L_{xi_i} g)(X,Y) = g(nabla_Y xi_i, X) + g(nabla_X xi_i, Y) = 0 "
        "(0 when both vanish or neither does, else 1)",
        was, [&smp, s, t](const LocalStructure& ls, int k) {
          const auto& F = smp.fields[k];
          double r = 0;
          for (int i = 0; i < s; ++i) {
            const Mat gn = ls.G() * values(ls.nabla_xi_jet(i));
            const double kill = detail::vanish(Mat(gn + gn.transpose()));
            const double n3 = std::max(detail::vanish(values(ls.n3(i, F[0]))), detail::vanish(values(ls.n3(i, F[1]))));
            r = std::max(r, (kill <= t) == (n3 <= t) ? 0.0 : 1.0);
          }
          return std::optional(r);
        });
  }
  add("structure.n5_particular_values",
      "N5(X,xi_i,Z) = -N5(X,Z,xi_i) = g(N3_i(Z), Q~X);  "
      "N5(xi_i,Y,Z) = g([xi_i,fZ],Q~Y) - g([xi_i,fY],Q~Z);  N5(xi_i,xi_j,Y) = N5(xi_i,Y,xi_j) = 0",
      {}, [&](const LocalStructure& ls, int k) {
        const auto& F = smp.fields[k];
        const Vec x = values(F[0]), y = values(F[1]), z = values(F[2]);
        const JetVec yp = ls.parallel_field(y), zp = ls.parallel_field(z);
        const JetMat& f = ls.f_jet();
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const JetVec& xi = ls.xi_jet(i);
          const double n3q = ls.g(values(ls.n3(i, zp)), ls.Qt() * x);
          r = std::max(r, scaled_residual(ls.n5(F[0], ls.xi(i), z).value(), n3q));
          r = std::max(r, scaled_residual(-ls.n5(F[0], z, ls.xi(i)).value(), n3q));
          const double rhs = ls.g(values(bracket(xi, f * zp)), ls.Qt() * y) -
                             ls.g(values(bracket(xi, f * yp)), ls.Qt() * z);
          r = std::max(r, scaled_residual(ls.n5(xi, y, z).value(), rhs));
          for (int j = 0; j < s; ++j) {
            r = std::max({r, detail::vanish(ls.n5(xi, ls.xi(j), y).value()),
                          detail::vanish(ls.n5(xi, y, ls.xi(j)).value())});
          }
        }
        return std::optional(r);
      });
  {
    auto printed = std::make_shared<Accumulator>();
    CheckReport rep = run_check(
        ctx,
        {"structure.nabla_f_formula",
         "2 g((nabla_X f)Y,Z) = g(N1(Y,Z), fX) + 2 g(fX,fY) etabar(Z) - 2 g(fX,fZ) etabar(Y) + N5(X,Y,Z), "
         "N5(X,Y,Z) = fZ(g(X,Q~Y)) - fY(g(X,Q~Z)) + g([X,fZ],Q~Y) - g([X,fY],Q~Z) with nabla Y = nabla Z = 0 "
         "at the point",
         "identity", was},
        [&smp, printed](const LocalStructure& ls, int k) {
          const auto& F = smp.fields[k];
          const Vec x = values(F[0]), y = values(F[1]), z = values(F[2]);
          const Vec fx = ls.f() * x;
          const double lhs = 2.0 * ls.g(ls.conn().nabla_tensor(ls.f_jet(), x) * y, z);
          const double base = ls.g(values(ls.n1(F[1], F[2])), fx) +
                              2.0 * ls.g(fx, ls.f() * y) * ls.etabar().dot(z) -
                              2.0 * ls.g(fx, ls.f() * z) * ls.etabar().dot(y);
          printed->add(scaled_residual(lhs, base + ls.n5_with_last_line(F[0], y, z).value()));
          return std::optional(scaled_residual(lhs, base + ls.n5(F[0], y, z).value()));
        });
    if (rep.verdict != Verdict::kSkipped) {
      ctx.flags().push_back(Flag{"n5_last_line",
                                 "max residual of the nabla f formula when N5 also carries "
                                 "+g([Y,fZ] - [Z,fY] - f[Y,Z], Q~X) (stated) and without it (measured)",
                                 printed->max(), rep.max_residual, printed->max() <= rep.tolerance});
    }
    out.push_back(std::move(rep));
  }
  add("structure.nabla_reeb_f", "2 g((nabla_{xi_i} f)Y,Z) = N5(xi_i,Y,Z)", was,
      [&](const LocalStructure& ls, int k) {
        const auto& F = smp.fields[k];
        const Vec y = values(F[1]), z = values(F[2]);
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const double lhs = 2.0 * ls.g(ls.conn().nabla_tensor(ls.f_jet(), ls.xi(i)) * y, z);
          r = std::max(r, scaled_residual(lhs, ls.n5(ls.xi_jet(i), y, z).value()));
        }
        return std::optional(r);
      });
  add("structure.h_asymmetry_n5", "g((h_i - h_i^*)X, Y) = 1/2 N5(xi_i,X,Y)", was,
      [&](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const double lhs = ls.g((ls.h(i) - ls.hstar(i)) * C[0], C[1]);
          r = std::max(r, scaled_residual(lhs, 0.5 * ls.n5(ls.xi_jet(i), C[0], C[1]).value()));
        }
        return std::optional(r);
      });
  add("structure.hf_anticommutator", "h_i f + f h_i = -1/2 L_{xi_i} Q", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      r = std::max(r, scaled_residual(Mat(ls.h(i) * ls.f() + ls.f() * ls.h(i)), Mat(-0.5 * ls.lieQ(i))));
    }
    return std::optional(r);
  });
  add("structure.hq_commutator", "h_i Q - Q h_i = 1/2 [f, L_{xi_i} Q]", was, [&](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      const Mat lq = ls.lieQ(i);
      r = std::max(r, scaled_residual(Mat(ls.h(i) * ls.Q() - ls.Q() * ls.h(i)),
                                      Mat(0.5 * (ls.f() * lq - lq * ls.f()))));
    }
    return std::optional(r);
  });
  {
    auto printed = std::make_shared<Accumulator>();
    CheckReport rep = run_check(
        ctx,
        {"structure.splitting_tensor", "C_{xi_i}X = -(nabla_X xi_i)^T = (f + f Q^{-1} h_i^*)X for X in D",
         "identity", was},
        [&smp, s, printed](const LocalStructure& ls, int k) {
          const Vec x = ls.proj_D() * smp.coeffs[k][0];
          double r = 0, alt = 0;
          for (int i = 0; i < s; ++i) {
            const Vec c = splitting_tensor(ls, i, x);
            r = std::max(r, scaled_residual(c, splitting_formula(ls, i, x)));
            alt = std::max(alt, scaled_residual(c, splitting_formula_alt(ls, i, x)));
          }
          printed->add(alt);
          return std::optional(r);
        });
    if (rep.verdict != Verdict::kSkipped) {
      ctx.flags().push_back(Flag{
          "splitting_tensor_sign",
          "max residual of C X against the variant -fX - Q^{-1} f h_i X (stated) and against "
          "(f + f Q^{-1} h_i^*)X (measured); the first form has the opposite overall sign",
          printed->max(), rep.max_residual, printed->max() <= rep.tolerance});
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consequences of L_{xi_i} Q = 0.

inline ReportList group_condition_a(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> hyp = {"weak_almost_S", "condition_A"};
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, cls, hyp}, fn));
  };
  add("condition_a.nabla_reeb_Q", "nabla_{xi_i} Q = 0", "identity", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(ls.conn().nabla_tensor(ls.Q_jet(), ls.xi(i))));
    return std::optional(r);
  });
  add("condition_a.nabla_reeb_f", "nabla_{xi_i} f = 0", "identity", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(ls.conn().nabla_tensor(ls.f_jet(), ls.xi(i))));
    return std::optional(r);
  });
  add("condition_a.h_selfadjoint", "h_i = h_i^*", "identity", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, scaled_residual(ls.h(i), ls.hstar(i)));
    return std::optional(r);
  });
  add("condition_a.h_traceless", "tr h_i = 0", "identity", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(ls.h(i).trace(), detail::sup(ls.h(i))));
    return std::optional(r);
  });
  add("condition_a.h_weighted_asymmetry", "g((h_i - h_i^*)Y, X + QX) = 0", "identity",
      [&](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        double r = 0;
        for (int i = 0; i < s; ++i) {
          r = std::max(r, detail::vanish(ls.g((ls.h(i) - ls.hstar(i)) * C[1], C[0] + ls.Q() * C[0])));
        }
        return std::optional(r);
      });
  add("condition_a.htilde_spectrum_paired", "the spectrum of h~_i on D is symmetric about 0", "eigen",
      [&ctx, s](const LocalStructure&, int k) {
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const auto& ev = ctx.split(k, i).eigenvalues;
          double scale = 1.0;
          for (double v : ev) scale = std::max(scale, std::abs(v));
          for (size_t a = 0; a < ev.size(); ++a) r = std::max(r, std::abs(ev[a] + ev[ev.size() - 1 - a]) / scale);
        }
        return std::optional(r);
      });
  return out;
}

// ---------------------------------------------------------------------------
// Consequences of (nabla_X Q)Y = 0 on D.

inline ReportList group_condition_b(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> hyp = {"weak_almost_S", "condition_A", "condition_B"};
  ReportList out;
  out.push_back(run_check(ctx,
                          {"condition_b.nabla_Q_formula",
                           "(nabla_X Q)Y = sum_i eta^i(Y) Q~(f + f h~_i)X", "identity", hyp},
                          [&](const LocalStructure& ls, int k) {
                            const auto& C = smp.coeffs[k];
                            const Vec lhs = ls.conn().nabla_tensor(ls.Q_jet(), C[0]) * C[1];
                            Vec rhs = Vec::Zero(ls.dim());
                            for (int i = 0; i < s; ++i) {
                              rhs += ls.eta(i).dot(C[1]) * (ls.Qt() * (ls.f() + ls.f() * ls.htilde(i)) * C[0]);
                            }
                            return std::optional(scaled_residual(lhs, rhs));
                          }));
  out.push_back(run_check(ctx,
                          {"condition_b.nabla_Q_inverse", "(nabla_X Q^{-1})Y = 0 for Y in D", "identity", hyp},
                          [&](const LocalStructure& ls, int k) {
                            const auto& C = smp.coeffs[k];
                            const Vec y = ls.proj_D() * C[1];
                            return std::optional(
                                detail::vanish(Vec(ls.conn().nabla_tensor(ls.Qinv_jet(), C[0]) * y)));
                          }));
  return out;
}

// ---------------------------------------------------------------------------
// Curvature identities along the Reeb fields.

namespace detail {

/// (nabla_V Phi)(A,B) at one point.
struct NablaPhi {
  const LocalStructure& ls;
  double operator()(const Vec& v, const Vec& a, const Vec& b) const {
    return ls.conn().nabla_twoform(ls.phi_jet(), v, a, b);
  }
};

/// Both sides of the symmetrised nabla f identity; `sign` = +1 gives the
/// printed form of the eta-terms, -1 the form that holds.
inline double e04_residual(const LocalStructure& ls, const Vec& x, const Vec& y, double sign) {
  const auto nf = [&](const Vec& v) { return ls.conn().nabla_tensor(ls.f_jet(), v); };
  const Mat& f = ls.f();
  const Vec fx = f * x, fy = f * y;
  const Vec lhs = nf(x) * y + nf(fx) * fy;
  const Vec p = 0.5 * (nf(x) * (ls.Qt() * y) + nf(ls.Qt() * x) * y);
  Vec rhs = 2.0 * ls.g(fx, fy) * ls.xibar() - p;
  Vec mid = -ls.etabar().dot(y) * (f * fx);
  for (int j = 0; j < ls.s(); ++j) {
    const Mat m = weak_term(ls, j);
    mid += ls.eta(j).dot(y) * (ls.h(j) * x);
    rhs += 0.5 * (m * (ls.eta(j).dot(x) * y - ls.eta(j).dot(y) * x) + ls.g(m * y, x) * ls.xi(j));
  }
  rhs += sign * mid;
  return scaled_residual(lhs, rhs);
}

/// Both sides of the long Reeb curvature identity; `sign` multiplies the
/// last curvature term of the left side (-1 printed, +1 holds).
inline double e05b_residual(const LocalStructure& ls, int i, const Vec& x, const Vec& y, const Vec& z,
                            double sign) {
  const auto& c = ls.conn();
  const NablaPhi np{ls};
  const Mat& f = ls.f();
  const Mat qt = ls.Qt();
  const Mat& ht = ls.htilde(i);
  const Vec& xi = ls.xi(i);
  const Vec fx = f * x, fy = f * y, fz = f * z, htx = ht * x, hty = ht * y, htz = ht * z;
  const double t1 = c.curvature4(xi, x, y, z), t2 = c.curvature4(xi, qt * x, y, z);
  const double t3 = c.curvature4(xi, x, fy, fz), t4 = c.curvature4(xi, fx, y, fz);
  const double t5 = c.curvature4(xi, fx, fy, z);
  const double lhs = t1 + t2 - t3 + t4 + sign * t5;
  const double eb_y = ls.etabar().dot(y), eb_z = ls.etabar().dot(z);
  double rhs = 2.0 * np(htx, y, z) + 2.0 * eb_z * ls.g(x + htx, ls.Q() * y) - 2.0 * eb_y * ls.g(x + htx, ls.Q() * z);
  double inner = 0.0;
  for (int j = 0; j < ls.s(); ++j) {
    const double ex = ls.eta(j).dot(x), ey = ls.eta(j).dot(y), ez = ls.eta(j).dot(z);
    rhs -= 2.0 * ex * (ey * eb_z - eb_y * ez);
    const Mat m = weak_term(ls, j);
    inner += 2.0 * ex * ls.g(m * z, y) - 5.0 * ey * ls.g(m * z, htx + 0.4 * x) + 5.0 * ez * ls.g(m * y, htx);
  }
  inner += -np(qt * y, z, htx) + np(y, htz, qt * x) + 3.0 * np(qt * htx, y, z) - np(qt * y, htz, x) -
           np(qt * z, htx, y) + np(z, qt * x, hty) - np(qt * z, x, hty);
  rhs += 0.5 * inner;
  return scaled_residual(lhs, rhs);
}

}  // namespace detail

inline ReportList group_curvature(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> a = {"weak_almost_S", "condition_A"};
  const std::vector<std::string> ab = {"weak_almost_S", "condition_A", "condition_B"};
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, std::vector<std::string> hyp, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, "identity", std::move(hyp)}, fn));
  };
  auto e36 = [&smp, s](bool diagonal) {
    return [&smp, s, diagonal](const LocalStructure& ls, int k) {
      const Vec& x = smp.coeffs[k][0];
      const Mat& f = ls.f();
      double r = 0;
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          if (diagonal && i != j) continue;
          const Vec lhs = ls.conn().nabla_tensor(ls.h_jet(j), ls.xi(i)) * x;
          const Vec rhs = f * ls.conn().curvature(ls.xi(i), x, ls.xi(j)) + ls.h(i) * x - ls.h(j) * x +
                          ls.Q() * (f * x) - f * (ls.Qinv() * (ls.h(j) * (ls.h(i) * x)));
          r = std::max(r, scaled_residual(lhs, rhs));
        }
      }
      return std::optional(r);
    };
  };
  add("curvature.nabla_reeb_h",
      "(nabla_{xi_i} h_j)X = f R_{xi_i,X} xi_j + h_i X - h_j X + Q f X - f Q^{-1} h_j h_i X", a, e36(false));
  add("curvature.nabla_reeb_h_diagonal", "(nabla_{xi_i} h_i)X = f R_{xi_i,X} xi_i + Q f X - f Q^{-1} h_i^2 X", a,
      e36(true));
  auto e37 = [&smp, s](bool diagonal) {
    return [&smp, s, diagonal](const LocalStructure& ls, int k) {
      const Vec& x = smp.coeffs[k][0];
      const Mat& f = ls.f();
      double r = 0;
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          if (diagonal && i != j) continue;
          const Vec lhs = ls.Q() * ls.conn().curvature(ls.xi(i), x, ls.xi(j)) -
                          f * ls.conn().curvature(ls.xi(i), f * x, ls.xi(j));
          const Vec rhs = 2.0 * (ls.h(j) * (ls.h(i) * x) + ls.Q() * (f * (f * x)));
          r = std::max(r, scaled_residual(lhs, rhs));
        }
      }
      return std::optional(r);
    };
  };
  add("curvature.reeb_combination", "Q R_{xi_i,X} xi_j - f R_{xi_i,fX} xi_j = 2(h_j h_i X + Q f^2 X)", a,
      e37(false));
  add("curvature.reeb_combination_diagonal", "Q R_{xi_i,X} xi_i - f R_{xi_i,fX} xi_i = 2(h_i^2 X + Q f^2 X)", a,
      e37(true));
  add("curvature.reeb_curvature_phi",
      "g(R_{xi_i,X}Y,Z) = -(nabla_X Phi)(Y,Z) - g(X,(nabla_Y f h~_i)Z) + g(X,(nabla_Z f h~_i)Y)", a,
      [&smp, s](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const auto& c = ls.conn();
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const JetMat fh = ls.f_htilde_jet(i);
          const double lhs = c.curvature4(ls.xi(i), C[0], C[1], C[2]);
          const double rhs = -c.nabla_twoform(ls.phi_jet(), C[0], C[1], C[2]) -
                             ls.g(C[0], c.nabla_tensor(fh, C[1]) * C[2]) + ls.g(C[0], c.nabla_tensor(fh, C[2]) * C[1]);
          r = std::max(r, scaled_residual(lhs, rhs));
        }
        return std::optional(r);
      });
  add("curvature.cyclic_nabla_phi", "(nabla_Y Phi)(X,Z) - (nabla_Z Phi)(X,Y) = (nabla_X Phi)(Y,Z)",
      {"weak_almost_S"}, [&smp](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const detail::NablaPhi np{ls};
        return std::optional(
            scaled_residual(np(C[1], C[0], C[2]) - np(C[2], C[0], C[1]), np(C[0], C[1], C[2])));
      });
  {
    auto printed = std::make_shared<Accumulator>();
    CheckReport rep = run_check(
        ctx,
        {"curvature.nabla_f_symmetrised",
         "(nabla_X f)Y + (nabla_{fX} f)fY = 2 g(fX,fY) xibar + etabar(Y) f^2 X - sum_j eta^j(Y) h_j X - P(X,Y) "
         "+ 1/2 sum_j [Q~Q(I-h~_j){eta^j(X)Y - eta^j(Y)X} + g(Q~Q(I-h~_j)Y,X) xi_j], "
         "P(X,Y) = 1/2[(nabla_X f)Q~Y + (nabla_{Q~X} f)Y]",
         "identity", ab},
        [&smp, printed](const LocalStructure& ls, int k) {
          const auto& C = smp.coeffs[k];
          printed->add(detail::e04_residual(ls, C[0], C[1], +1.0));
          return std::optional(detail::e04_residual(ls, C[0], C[1], -1.0));
        });
    if (rep.verdict != Verdict::kSkipped) {
      ctx.flags().push_back(
          Flag{"nabla_f_symmetrised_sign",
               "max residual with the terms -etabar(Y) f^2 X + sum_j eta^j(Y) h_j X (stated) and with both "
               "signs reversed (measured)",
               printed->max(), rep.max_residual, printed->max() <= rep.tolerance});
    }
    out.push_back(std::move(rep));
  }
  {
    auto printed = std::make_shared<Accumulator>();
    CheckReport rep = run_check(
        ctx,
        {"curvature.reeb_curvature_long",
         "g(R_{xi_i,X}Y,Z) + g(R_{xi_i,Q~X}Y,Z) - g(R_{xi_i,X}fY,fZ) + g(R_{xi_i,fX}Y,fZ) + g(R_{xi_i,fX}fY,Z) "
         "= 2(nabla_{h~_i X} Phi)(Y,Z) + 2 etabar(Z) g(X + h~_i X, QY) - 2 etabar(Y) g(X + h~_i X, QZ) "
         "- 2 sum_j eta^j(X)[eta^j(Y) etabar(Z) - etabar(Y) eta^j(Z)] + (Q~-terms)",
         "identity", ab},
        [&smp, s, printed](const LocalStructure& ls, int k) {
          const auto& C = smp.coeffs[k];
          double r = 0, p = 0;
          for (int i = 0; i < s; ++i) {
            r = std::max(r, detail::e05b_residual(ls, i, C[0], C[1], C[2], +1.0));
            p = std::max(p, detail::e05b_residual(ls, i, C[0], C[1], C[2], -1.0));
          }
          printed->add(p);
          return std::optional(r);
        });
    if (rep.verdict != Verdict::kSkipped) {
      ctx.flags().push_back(Flag{"reeb_curvature_long_sign",
                                 "max residual with -g(R_{xi_i,fX}fY,Z) on the left (stated) and with "
                                 "+g(R_{xi_i,fX}fY,Z) (measured)",
                                 printed->max(), rep.max_residual, printed->max() <= rep.tolerance});
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// R_{X,Y} xi_i = 0: the three eigen-distributions of h~.

inline ReportList group_prop51(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int n = ctx.structure().n, s = ctx.structure().s;
  const std::vector<std::string> base = {"weak_almost_S", "condition_A", "reeb_flat"};
  const std::vector<std::string> withb = {"weak_almost_S", "condition_A", "reeb_flat", "condition_B"};
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls,
                 std::vector<std::string> hyp, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, cls, std::move(hyp)}, fn));
  };
  add("prop51.h_squared", "h_i^2 X + Q f^2 X = 0", "identity", base, [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) {
      r = std::max(r, scaled_residual(Mat(ls.h(i) * ls.h(i)), Mat(-ls.Q() * ls.f() * ls.f())));
    }
    return std::optional(r);
  });
  add("prop51.htilde_equal", "h~_i = h~_j", "identity", base, [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 1; i < s; ++i) r = std::max(r, scaled_residual(ls.htilde(i), ls.htilde(0)));
    return std::optional(r);
  });
  add("prop51.eigen_split",
      "TM = ker f + D+ + D- orthogonally, h~_i = 0, +1, -1 on them, dim D+ = dim D- = n, f D+ = D-", "eigen",
      base, [&ctx, n, s](const LocalStructure& ls, int k) {
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const EigenSplit& sp = ctx.split(k, i);
          if (sp.plus.cols() != n || sp.minus.cols() != n) return std::optional(1.0);
          r = std::max({r, sp.cluster_radius, std::abs(sp.lambda - 1.0), sp.asymmetry});
          const Mat all = detail::hcat(detail::hcat(sp.plus, sp.minus), sp.kerf);
          const int m = static_cast<int>(all.cols());
          r = std::max(r, scaled_residual(Mat(all.transpose() * ls.G() * all), Mat(Mat::Identity(m, m))));
          const Mat pm = detail::projector(sp.minus, ls.G());
          const Mat fp = ls.f() * sp.plus;
          r = std::max(r, detail::vanish(Mat(fp - pm * fp)));
        }
        return std::optional(r);
      });
  add("prop51.nabla_reeb_on_eigenspaces", "nabla_X xi_i = -2 f X on D+ and nabla_X xi_i = 0 on D-", "identity",
      base, [&ctx, s](const LocalStructure& ls, int k) {
        const EigenSplit& sp = ctx.split(k, 0);
        double r = 0;
        for (int i = 0; i < s; ++i) {
          const Mat nx = values(ls.nabla_xi_jet(i));
          for (int c = 0; c < sp.plus.cols(); ++c) {
            r = std::max(r, scaled_residual(Vec(nx * sp.plus.col(c)), Vec(-2.0 * ls.f() * sp.plus.col(c))));
          }
          for (int c = 0; c < sp.minus.cols(); ++c) r = std::max(r, detail::vanish(Vec(nx * sp.minus.col(c))));
        }
        return std::optional(r);
      });
  add("prop51.nabla_phi_htilde",
      "4(nabla_{h~X} Phi)(Y,Z) = (nabla_{Q~Y} Phi)(Z,h~X) + (nabla_{Q~Y} Phi)(h~Z,X) + (nabla_{Q~Z} Phi)(h~X,Y) "
      "+ (nabla_{Q~Z} Phi)(X,h~Y) - 3(nabla_{Q~h~X} Phi)(Y,Z) - (nabla_Y Phi)(h~Z,Q~X) - (nabla_Z Phi)(Q~X,h~Y), "
      "X,Y,Z in D",
      "identity", withb, [&smp](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const detail::NablaPhi np{ls};
        const Vec x = ls.proj_D() * C[0], y = ls.proj_D() * C[1], z = ls.proj_D() * C[2];
        const Mat& ht = ls.htilde(0);
        const Mat qt = ls.Qt();
        const double lhs = 4.0 * np(ht * x, y, z);
        const double rhs = np(qt * y, z, ht * x) + np(qt * y, ht * z, x) + np(qt * z, ht * x, y) +
                           np(qt * z, x, ht * y) - 3.0 * np(qt * (ht * x), y, z) - np(y, ht * z, qt * x) -
                           np(z, qt * x, ht * y);
        return std::optional(scaled_residual(lhs, rhs));
      });
  add("prop51.nabla_phi_mixed", "(nabla_X Phi)(Y,Z) = 0 for X,Z in D-, Y in D+", "identity", withb,
      [&ctx, &smp](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const EigenSplit& sp = ctx.split(k, 0);
        const detail::NablaPhi np{ls};
        return std::optional(
            detail::vanish(np(detail::combo(sp.minus, C[0]), detail::combo(sp.plus, C[1]), detail::combo(sp.minus, C[2]))));
      });
  add("prop51.nabla_phi_plus", "(nabla_X Phi)(Y,Z) = 0 for X,Y in D+, Z in D", "identity", withb,
      [&ctx, &smp](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const EigenSplit& sp = ctx.split(k, 0);
        const detail::NablaPhi np{ls};
        return std::optional(
            detail::vanish(np(detail::combo(sp.plus, C[0]), detail::combo(sp.plus, C[1]), ls.proj_D() * C[2])));
      });
  return out;
}

// ---------------------------------------------------------------------------
// R_{X,Y} xi_i = 0 together with the conditions on Q: foliations.

inline ReportList group_theorem1(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int n = ctx.structure().n, s = ctx.structure().s;
  const std::vector<std::string> base = {"weak_almost_S", "condition_A", "reeb_flat"};
  const std::vector<std::string> withb = {"weak_almost_S", "condition_A", "reeb_flat", "condition_B"};
  std::vector<std::string> classical = withb;
  classical.push_back("q_tilde_zero");
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls,
                 std::vector<std::string> hyp, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, cls, std::move(hyp)}, fn));
  };
  // projector jets onto D+ and D-; the spectrum is {0, +-1} here
  auto projectors = [&ctx](const LocalStructure& ls, int k) -> std::optional<std::pair<JetMat, JetMat>> {
    const EigenSplit& sp = ctx.split(k, 0);
    if (sp.degenerate) return std::nullopt;
    return std::make_pair(eigen_projector_jet(ls, 0, sp.lambda, +1), eigen_projector_jet(ls, 0, sp.lambda, -1));
  };
  add("theorem1.minus_kerf_involutive", "[X,Y] in D- + ker f for X,Y in D- + ker f", "theorem", base,
      [&](const LocalStructure& ls, int k) -> std::optional<double> {
        auto pr = projectors(ls, k);
        if (!pr) return 1.0;
        const auto& F = smp.fields[k];
        const Mat pp = values(pr->first);
        const JetVec x = pr->second * F[0], y = pr->second * F[1];
        std::vector<Vec> br = {values(bracket(x, y))};
        for (int i = 0; i < s; ++i) {
          br.push_back(values(bracket(x, ls.xi_jet(i))));
          for (int j = 0; j < s; ++j) br.push_back(values(bracket(ls.xi_jet(i), ls.xi_jet(j))));
        }
        double r = 0;
        for (const Vec& b : br) r = std::max(r, detail::vanish(Vec(pp * b), detail::sup(b)));
        return r;
      });
  add("theorem1.minus_kerf_geodesic", "nabla_X Y + nabla_Y X in D- + ker f for X,Y in D- + ker f", "theorem", base,
      [&](const LocalStructure& ls, int k) -> std::optional<double> {
        auto pr = projectors(ls, k);
        if (!pr) return 1.0;
        const auto& F = smp.fields[k];
        const Vec& a = smp.coeffs[k][3];
        JetVec x = pr->second * F[0], y = pr->second * F[1];
        for (int i = 0; i < s; ++i) {
          x = x + a[i] * ls.xi_jet(i);
          y = y + a[(i + 1) % a.size()] * ls.xi_jet(i);
        }
        const Vec v = ls.conn().nabla(values(x), y) + ls.conn().nabla(values(y), x);
        return detail::vanish(Vec(values(pr->first) * v), detail::sup(v));
      });
  add("theorem1.minus_kerf_leaves_flat", "g(R_{X,Y}Z,W) = 0 for X,Y,Z,W in D- + ker f", "theorem", base,
      [&ctx](const LocalStructure& ls, int k) {
        const EigenSplit& sp = ctx.split(k, 0);
        const Mat b = detail::hcat(sp.minus, sp.kerf);
        double r = 0;
        for (int p = 0; p < b.cols(); ++p) {
          for (int q = p + 1; q < b.cols(); ++q) {
            const Mat rpq = ls.conn().curvature_operator(b.col(p), b.col(q));
            for (int u = 0; u < b.cols(); ++u) {
              const Vec w = rpq * b.col(u);
              for (int v = 0; v < b.cols(); ++v) r = std::max(r, std::abs(ls.g(w, b.col(v))));
            }
          }
        }
        return std::optional(r);
      });
  add("theorem1.plus_integrable_geodesic", "[X,Y] in D+ and nabla_X Y + nabla_Y X in D+ for X,Y in D+", "theorem",
      withb, [&](const LocalStructure& ls, int k) -> std::optional<double> {
        auto pr = projectors(ls, k);
        if (!pr) return 1.0;
        const auto& F = smp.fields[k];
        const Mat rest = Mat::Identity(ls.dim(), ls.dim()) - values(pr->first);
        const JetVec x = pr->first * F[0], y = pr->first * F[1];
        const Vec b = values(bracket(x, y));
        const Vec v = ls.conn().nabla(values(x), y) + ls.conn().nabla(values(y), x);
        return std::max(detail::vanish(Vec(rest * b), detail::sup(b)), detail::vanish(Vec(rest * v), detail::sup(v)));
      });
  add("theorem1.nabla_f_plus", "(nabla_X f)Y = 2 g(QX,Y) xibar for X,Y in D+", "theorem", withb,
      [&ctx, &smp](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const EigenSplit& sp = ctx.split(k, 0);
        const Vec x = detail::combo(sp.plus, C[0]), y = detail::combo(sp.plus, C[1]);
        return std::optional(scaled_residual(Vec(ls.conn().nabla_tensor(ls.f_jet(), x) * y),
                                             Vec(2.0 * ls.g(ls.Q() * x, y) * ls.xibar())));
      });
  add("theorem1.plus_curvature",
      "g(R_{X,Y}Z,W) = 4s{g(QY,Z)g(QX,W) - g(QY,W)g(QX,Z)} - g(R_{X,Y}Z, Q~W) for X,Y,Z,W in D+", "theorem",
      withb, [&ctx, &smp, s](const LocalStructure& ls, int k) {
        const auto& C = smp.coeffs[k];
        const EigenSplit& sp = ctx.split(k, 0);
        const Vec x = detail::combo(sp.plus, C[0]), y = detail::combo(sp.plus, C[1]),
                  z = detail::combo(sp.plus, C[2]), w = detail::combo(sp.plus, C[3]);
        const Vec rz = ls.conn().curvature(x, y, z);
        const Mat& q = ls.Q();
        const double rhs = 4.0 * s * (ls.g(q * y, z) * ls.g(q * x, w) - ls.g(q * y, w) * ls.g(q * x, z)) -
                           ls.g(rz, ls.Qt() * w);
        return std::optional(scaled_residual(ls.g(rz, w), rhs));
      });
  {
    CheckReport rep = run_check(
        ctx,
        {"theorem1.plus_curvature_bound",
         "|g(R_{X,Y}Z,W) - 4s{g(Y,Z)g(X,W) - g(X,Z)g(Y,W)}| <= |Q~|(8s|Q~| + |R|) for unit X,Y,Z,W in D+ "
         "(residual: excess of the left side over the estimated right side)",
         "theorem", withb},
        [&ctx, &smp, n, s](const LocalStructure& ls, int k) -> std::optional<double> {
          if (n < 2) return std::nullopt;
          const auto& C = smp.coeffs[k];
          const EigenSplit& sp = ctx.split(k, 0);
          Vec u[4];
          for (int a = 0; a < 4; ++a) u[a] = detail::unit_g(ls, detail::combo(sp.plus, C[a]));
          const double lhs =
              std::abs(ls.conn().curvature4(u[0], u[1], u[2], u[3]) -
                       4.0 * s * (ls.g(u[1], u[2]) * ls.g(u[0], u[3]) - ls.g(u[0], u[2]) * ls.g(u[1], u[3])));
          const double qn = tensor_norm(ls.Qt(), ls.G());
          const double rhs = qn * (8.0 * s * qn + ctx.curvature_norm(k));
          return std::max(0.0, lhs - rhs);
        });
    if (rep.verdict == Verdict::kPass || rep.verdict == Verdict::kFail) {
      ctx.flags().push_back(Flag{"curvature_norm_estimator",
                                 "|Q~| is the largest singular value in a g-orthonormal frame; |R| is a "
                                 "lower-bound estimate of max |g(R_{X,Y}Z,W)| over g-unit vectors "
                                 "(frame components plus seeded alternating slot ascent)",
                                 std::nullopt, std::nullopt, true});
    }
    out.push_back(std::move(rep));
  }
  add("theorem1.plus_sectional", "sectional curvature of planes in D+ equals 4s when Q~ = 0", "sectional",
      classical, [&ctx, &smp, n, s](const LocalStructure& ls, int k) -> std::optional<double> {
        if (n < 2) return std::nullopt;
        const EigenSplit& sp = ctx.split(k, 0);
        std::vector<std::pair<Vec, Vec>> planes;
        for (int a = 0; a < sp.plus.cols(); ++a) {
          for (int b = a + 1; b < sp.plus.cols(); ++b) planes.emplace_back(sp.plus.col(a), sp.plus.col(b));
        }
        // one random plane, orthonormalised
        const Vec x = detail::unit_g(ls, detail::combo(sp.plus, smp.coeffs[k][0]));
        Vec y = detail::combo(sp.plus, smp.coeffs[k][1]);
        y = detail::unit_g(ls, Vec(y - ls.g(x, y) * x));
        planes.emplace_back(x, y);
        double r = 0;
        for (const auto& [a, b] : planes) r = std::max(r, std::abs(ls.conn().curvature4(a, b, b, a) - 4.0 * s));
        return r;
      });
  add("theorem1.not_flat", "for n > 1 the curvature does not vanish: |R| >= 4s (residual: shortfall below 4s)",
      "theorem", classical, [&ctx, n, s](const LocalStructure&, int k) -> std::optional<double> {
        if (n < 2) return std::nullopt;
        return std::max(0.0, 4.0 * s - ctx.curvature_norm(k));
      });
  return out;
}

// ---------------------------------------------------------------------------
// n = 1: the adapted frame e1 in D+, e2 = f e1 / beta.

namespace detail {

struct PlaneFrame {
  JetVec e1, e2;
  Jet beta, b2;  ///< beta and beta^{-1} e2(beta), both with first derivatives
  Vec v1, v2;
};

inline std::optional<PlaneFrame> plane_frame(CheckContext& ctx, const LocalStructure& ls, int k) {
  const EigenSplit& sp = ctx.split(k, 0);
  if (sp.degenerate || sp.plus.cols() != 1) return std::nullopt;
  const int d = ls.dim();
  const JetMat pp = eigen_projector_jet(ls, 0, sp.lambda, +1);
  const Mat ppv = values(pp);
  int best = 0;
  double bn = -1.0;
  for (int c = 0; c < d; ++c) {
    const double v = ls.g(ppv.col(c), ppv.col(c));
    if (v > bn) bn = v, best = c;
  }
  PlaneFrame fr;
  const JetVec w = pp * constant_jets(unit(d, best), d);
  const Jet norm = sqrt(pair(w, ls.conn().metric(), w));
  fr.e1 = (1.0 / norm) * w;
  Jet tr = Jet::constant(d, 0.0);
  for (int a = 0; a < d; ++a) tr += ls.Q_jet()(a, a);
  fr.beta = sqrt((tr - static_cast<double>(ls.s())) / (2.0 * ls.n()));
  fr.e2 = (1.0 / fr.beta) * (ls.f_jet() * fr.e1);
  fr.b2 = directional(fr.e2, fr.beta) / fr.beta;
  fr.v1 = values(fr.e1);
  fr.v2 = values(fr.e2);
  return fr;
}

}  // namespace detail

inline ReportList group_theorem2(CheckContext& ctx) {
  const int s = ctx.structure().s;
  const std::vector<std::string> base = {"n_equals_1", "weak_almost_S", "condition_A", "reeb_flat"};
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, std::vector<std::string> hyp,
                 std::function<double(const LocalStructure&, const detail::PlaneFrame&, int)> fn) {
    out.push_back(run_check(ctx, {name, ref, "theorem", std::move(hyp)},
                            [&ctx, fn](const LocalStructure& ls, int k) -> std::optional<double> {
                              auto fr = detail::plane_frame(ctx, ls, k);
                              if (!fr) return 1.0;
                              return fn(ls, *fr, k);
                            }));
  };
  add("theorem2.geodesic_plus", "beta^{-1} e2(beta) = -g(nabla_{e1} e2, e1) = g(nabla_{e1} e1, e2)", base,
      [](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
        const double b2 = fr.b2.value();
        const double a = -ls.g(ls.conn().nabla(fr.v1, fr.e2), fr.v1);
        const double b = ls.g(ls.conn().nabla(fr.v1, fr.e1), fr.v2);
        return std::max(scaled_residual(b2, a), scaled_residual(b2, b));
      });
  add("theorem2.beta_reeb_invariant", "xi_i(beta) = 0", base,
      [s](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
        double r = 0;
        for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(directional(ls.xi_jet(i), fr.beta).value()));
        return r;
      });
  add("theorem2.covariant_table",
      "nabla_{e1}e1 = b e2, nabla_{e1}e2 = 2 beta xibar - b e1, nabla_{e1}xi_i = -2 beta e2, "
      "nabla_{e2} e1 = nabla_{e2} e2 = nabla_{e2} xi_i = 0, nabla_{xi_i} e1 = nabla_{xi_i} e2 = nabla_{xi_i} xi_j = 0, "
      "b = beta^{-1} e2(beta)",
      base, [s](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
        const auto& c = ls.conn();
        const double beta = fr.beta.value(), b = fr.b2.value();
        double r = std::max(scaled_residual(c.nabla(fr.v1, fr.e1), Vec(b * fr.v2)),
                            scaled_residual(c.nabla(fr.v1, fr.e2), Vec(2.0 * beta * ls.xibar() - b * fr.v1)));
        r = std::max({r, detail::vanish(c.nabla(fr.v2, fr.e1)), detail::vanish(c.nabla(fr.v2, fr.e2))});
        for (int i = 0; i < s; ++i) {
          r = std::max(r, scaled_residual(c.nabla(fr.v1, ls.xi_jet(i)), Vec(-2.0 * beta * fr.v2)));
          r = std::max({r, detail::vanish(c.nabla(fr.v2, ls.xi_jet(i))), detail::vanish(c.nabla(ls.xi(i), fr.e1)),
                        detail::vanish(c.nabla(ls.xi(i), fr.e2))});
          for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(c.nabla(ls.xi(i), ls.xi_jet(j))));
        }
        return r;
      });
  add("theorem2.lie_brackets",
      "[xi_i,xi_j] = [e2,xi_i] = 0, [e1,e2] = 2 beta xibar - b e1, [e1,xi_i] = -2 beta e2", base,
      [s](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
        const double beta = fr.beta.value(), b = fr.b2.value();
        double r = scaled_residual(values(bracket(fr.e1, fr.e2)), Vec(2.0 * beta * ls.xibar() - b * fr.v1));
        for (int i = 0; i < s; ++i) {
          r = std::max(r, detail::vanish(values(bracket(fr.e2, ls.xi_jet(i)))));
          r = std::max(r, scaled_residual(values(bracket(fr.e1, ls.xi_jet(i))), Vec(-2.0 * beta * fr.v2)));
          for (int j = 0; j < s; ++j) r = std::max(r, detail::vanish(values(bracket(ls.xi_jet(i), ls.xi_jet(j)))));
        }
        return r;
      });
  add("theorem2.curvature_table",
      "R(e1,e2)e1 = [b^2 - e2(b)]e2, R(e1,e2)e2 = e2(b)e1 + b(2 beta xibar - b e1), R(xi_i,xi_j)e = 0, "
      "R(xi_i,e1)e1 = xi_i(b)e2, R(xi_i,e1)e2 = -xi_i(b)e1, R(xi_i,e2)e1 = R(xi_i,e2)e2 = 0",
      base, [s](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
        const auto& c = ls.conn();
        const double beta = fr.beta.value(), b = fr.b2.value();
        const double e2b = directional(fr.e2, fr.b2).value();
        const Vec& v1 = fr.v1;
        const Vec& v2 = fr.v2;
        double r = std::max(scaled_residual(c.curvature(v1, v2, v1), Vec((b * b - e2b) * v2)),
                            scaled_residual(c.curvature(v1, v2, v2),
                                            Vec(e2b * v1 + b * (2.0 * beta * ls.xibar() - b * v1))));
        for (int i = 0; i < s; ++i) {
          const Vec& xi = ls.xi(i);
          const double xb = directional(ls.xi_jet(i), fr.b2).value();
          for (int j = 0; j < s; ++j) {
            r = std::max({r, detail::vanish(c.curvature(xi, ls.xi(j), v1)),
                          detail::vanish(c.curvature(xi, ls.xi(j), v2))});
          }
          r = std::max(r, scaled_residual(c.curvature(xi, v1, v1), Vec(xb * v2)));
          r = std::max(r, scaled_residual(c.curvature(xi, v1, v2), Vec(-xb * v1)));
          r = std::max({r, detail::vanish(c.curvature(xi, v2, v1)), detail::vanish(c.curvature(xi, v2, v2))});
        }
        return r;
      });
  {
    const double t = ctx.tolerances().get("theorem2.flatness_criterion", "theorem");
    add("theorem2.flatness_criterion",
        "R = 0 exactly when e2(beta) = 0 (residual: |R| when e2(beta) = xi_i(beta) = 0, otherwise 0 if R "
        "does not vanish and 1 if it does)",
        base, [&ctx, t, s](const LocalStructure& ls, const detail::PlaneFrame& fr, int k) {
          double db = std::abs(directional(fr.e2, fr.beta).value());
          for (int i = 0; i < s; ++i) db = std::max(db, std::abs(directional(ls.xi_jet(i), fr.beta).value()));
          const double rn = ctx.curvature_norm(k);
          if (db <= t) return rn;
          return rn > t ? 0.0 : 1.0;
        });
  }
  {
    std::vector<std::string> withb = base;
    withb.push_back("condition_B");
    add("theorem2.beta_forced_one", "(nabla_X Q)Y = 0 on D forces beta = 1, i.e. Q~ = 0", withb,
        [](const LocalStructure& ls, const detail::PlaneFrame& fr, int) {
          return std::max(detail::vanish(ls.Qt()), std::abs(fr.beta.value() - 1.0));
        });
  }
  return out;
}

// ---------------------------------------------------------------------------
// (kappa, mu)-nullity.

inline ReportList group_kmu(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> base = {"weak_almost_S", "condition_A", "nullity"};
  ReportList out;
  const double kappa = ctx.nullity().joint.kappa;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls,
                 std::vector<std::string> hyp, PointFn fn) {
    out.push_back(run_check(ctx, {name, ref, cls, std::move(hyp)}, fn));
  };
  add("kmu.kappa_bound", "kappa <= 1 (residual: excess over 1)", "identity", base,
      [kappa](const LocalStructure&, int) { return std::optional(std::max(0.0, kappa - 1.0)); });
  add("kmu.spectrum", "the eigenvalues of h~_i on D lie in {0, +-sqrt(1 - kappa)}", "eigen", base,
      [&ctx, s, kappa](const LocalStructure&, int k) {
        const double lam = std::sqrt(std::max(0.0, 1.0 - kappa));
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (double mu : ctx.split(k, i).eigenvalues) {
            r = std::max(r, std::min(std::abs(mu), std::abs(std::abs(mu) - lam)));
          }
        }
        return std::optional(r);
      });
  add("kmu.htilde_equal", "h~_1 = ... = h~_s", "identity", base, [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 1; i < s; ++i) r = std::max(r, scaled_residual(ls.htilde(i), ls.htilde(0)));
    return std::optional(r);
  });
  add("kmu.hh_relation", "h_j h_i = (kappa - 1) Q f^2 = h_i h_j", "identity", base,
      [s, kappa](const LocalStructure& ls, int) {
        const Mat rhs = (kappa - 1.0) * ls.Q() * ls.f() * ls.f();
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) r = std::max(r, scaled_residual(Mat(ls.h(j) * ls.h(i)), rhs));
        }
        return std::optional(r);
      });
  add("kmu.reeb_combination",
      "Q R_{xi_i,X} xi_j - f R_{xi_i,fX} xi_j = 2(Q f^2 + h_j h_i)X = 2 kappa Q f^2 X", "identity", base,
      [&smp, s, kappa](const LocalStructure& ls, int k) {
        const Vec& x = smp.coeffs[k][0];
        const Mat& f = ls.f();
        const Vec qf2x = ls.Q() * (f * (f * x));
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            const Vec lhs = ls.Q() * ls.conn().curvature(ls.xi(i), x, ls.xi(j)) -
                            f * ls.conn().curvature(ls.xi(i), f * x, ls.xi(j));
            r = std::max(r, scaled_residual(lhs, Vec(2.0 * (qf2x + ls.h(j) * (ls.h(i) * x)))));
            r = std::max(r, scaled_residual(lhs, Vec(2.0 * kappa * qf2x)));
          }
        }
        return std::optional(r);
      });
  add("kmu.eigen_integrable", "D(lambda) and D(-lambda) are involutive", "theorem",
      {"weak_almost_S", "condition_A", "nullity", "condition_B", "lambda_positive"},
      [&ctx, &smp](const LocalStructure& ls, int k) -> std::optional<double> {
        const EigenSplit& sp = ctx.split(k, 0);
        if (sp.degenerate) return std::nullopt;
        const auto& F = smp.fields[k];
        double r = 0;
        for (int sign : {+1, -1}) {
          const JetMat p = eigen_projector_jet(ls, 0, sp.lambda, sign);
          const Mat rest = Mat::Identity(ls.dim(), ls.dim()) - values(p);
          const Vec b = values(bracket(p * F[0], p * F[1]));
          r = std::max(r, detail::vanish(Vec(rest * b), detail::sup(b)));
        }
        return r;
      });
  return out;
}

// ---------------------------------------------------------------------------
// kappa = 1: the structure is an S-manifold.

inline ReportList group_kappa1(CheckContext& ctx) {
  const auto& smp = ctx.samples();
  const int s = ctx.structure().s;
  const std::vector<std::string> hyp = {"weak_almost_S", "condition_A", "condition_B", "nullity", "kappa_one"};
  ReportList out;
  using Part = std::function<double(const LocalStructure&, int)>;
  std::vector<std::pair<CheckSpec, Part>> parts = {
      {{"kappa1.h_vanishes", "h_i = 0", "identity", hyp},
       [s](const LocalStructure& ls, int) {
         double r = 0;
         for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(ls.h(i)));
         return r;
       }},
      {{"kappa1.reeb_killing", "g(nabla_Y xi_i, X) + g(nabla_X xi_i, Y) = 0", "identity", hyp},
       [s](const LocalStructure& ls, int) {
         double r = 0;
         for (int i = 0; i < s; ++i) {
           const Mat gn = ls.G() * values(ls.nabla_xi_jet(i));
           r = std::max(r, detail::vanish(Mat(gn + gn.transpose())));
         }
         return r;
       }},
      {{"kappa1.nabla_f_antisymmetric", "(nabla_X f)Y - (nabla_Y f)X = -R_{X,Y} xi_i", "identity", hyp},
       [&smp, s](const LocalStructure& ls, int k) {
         const auto& C = smp.coeffs[k];
         const auto& c = ls.conn();
         const Vec lhs = c.nabla_tensor(ls.f_jet(), C[0]) * C[1] - c.nabla_tensor(ls.f_jet(), C[1]) * C[0];
         double r = 0;
         for (int i = 0; i < s; ++i) r = std::max(r, scaled_residual(lhs, Vec(-c.curvature(C[0], C[1], ls.xi(i)))));
         return r;
       }},
      {{"kappa1.killing_second_derivative", "nabla_X nabla_Y xi_i - nabla_{nabla_X Y} xi_i = R_{X,xi_i} Y",
        "identity", hyp},
       [&smp, s](const LocalStructure& ls, int k) {
         const auto& C = smp.coeffs[k];
         const auto& c = ls.conn();
         double r = 0;
         for (int i = 0; i < s; ++i) {
           r = std::max(r, scaled_residual(Vec(c.nabla_tensor(ls.nabla_xi_jet(i), C[0]) * C[1]),
                                           c.curvature(C[0], ls.xi(i), C[1])));
         }
         return r;
       }},
      {{"kappa1.normal", "N1(X,Y) = [f,f](X,Y) + 2 sum_i d eta^i(X,Y) xi_i = 0", "identity", hyp},
       [&smp](const LocalStructure& ls, int k) {
         const auto& F = smp.fields[k];
         return detail::vanish(values(ls.n1(F[0], F[1])));
       }},
      {{"kappa1.nijenhuis_f", "[f,f](X,Y) = -2 Phi(X,Y) xibar", "identity", hyp},
       [&smp](const LocalStructure& ls, int k) {
         const auto& F = smp.fields[k];
         const double ph = pair(F[0], ls.phi_jet(), F[1]).value();
         return scaled_residual(values(nijenhuis(ls.f_jet(), F[0], F[1])), Vec(-2.0 * ph * ls.xibar()));
       }},
  };
  for (const auto& [spec, fn] : parts) {
    out.push_back(run_check(ctx, spec, [fn](const LocalStructure& ls, int k) { return std::optional(fn(ls, k)); }));
  }
  out.push_back(run_check(ctx,
                          {"kappa1.s_manifold",
                           "h = 0, xi_i Killing and N1 = 0 together (largest residual of the parts above)",
                           "identity", hyp},
                          [&parts](const LocalStructure& ls, int k) {
                            double r = 0;
                            for (const auto& pf : parts) r = std::max(r, pf.second(ls, k));
                            return std::optional(r);
                          }));
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth for the Heisenberg-type family R^{2n+s}.

inline ReportList group_paper_example(CheckContext& ctx) {
  const auto& ex = ctx.example();
  if (!ex || ex->family != "paper_R2ns") return {};
  const double beta = ex->beta;
  const int n = ctx.structure().n, s = ctx.structure().s;
  const AdaptedFrame fr = paper_frame(n, s);
  ReportList out;
  auto add = [&](const std::string& name, const std::string& ref, const std::string& cls, PointFn fn,
                 std::vector<std::string> hyp = {}) {
    out.push_back(run_check(ctx, {name, ref, cls, std::move(hyp)}, fn));
    return out.back();
  };
  struct FrameAt {
    std::vector<JetVec> E, F;
  };
  auto frame_at = [&fr](const LocalStructure& ls) {
    FrameAt r;
    for (int a = 0; a < static_cast<int>(fr.E.size()); ++a) {
      r.E.push_back(fr.E[a].at(ls.point()));
      r.F.push_back(fr.F[a].at(ls.point()));
    }
    return r;
  };
  add("paper_example.frame_orthonormal", "{E_a, F_a, xi_i} is g-orthonormal", "ground_truth",
      [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        std::vector<Vec> all;
        for (int a = 0; a < n; ++a) all.push_back(values(f.E[a]));
        for (int a = 0; a < n; ++a) all.push_back(values(f.F[a]));
        for (int i = 0; i < s; ++i) all.push_back(ls.xi(i));
        double r = 0;
        for (size_t p = 0; p < all.size(); ++p) {
          for (size_t q = 0; q < all.size(); ++q) {
            r = std::max(r, std::abs(ls.g(all[p], all[q]) - (p == q ? 1.0 : 0.0)));
          }
        }
        return std::optional(r);
      });
  add("paper_example.f_Q_on_frame",
      "f E_a = beta F_a, f F_a = -beta E_a, f xi_i = 0, Q E_a = beta^2 E_a, Q F_a = beta^2 F_a, Q xi_i = xi_i",
      "ground_truth", [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        double r = 0;
        for (int a = 0; a < n; ++a) {
          const Vec e = values(f.E[a]), fv = values(f.F[a]);
          r = std::max({r, scaled_residual(Vec(ls.f() * e), Vec(beta * fv)),
                        scaled_residual(Vec(ls.f() * fv), Vec(-beta * e)),
                        scaled_residual(Vec(ls.Q() * e), Vec(beta * beta * e)),
                        scaled_residual(Vec(ls.Q() * fv), Vec(beta * beta * fv))});
        }
        for (int i = 0; i < s; ++i) {
          r = std::max({r, detail::vanish(Vec(ls.f() * ls.xi(i))), scaled_residual(Vec(ls.Q() * ls.xi(i)), ls.xi(i))});
        }
        return std::optional(r);
      });
  add("paper_example.d_eta_EF", "d eta^i(E_a, F_a) = -beta", "ground_truth", [&](const LocalStructure& ls, int) {
    const FrameAt f = frame_at(ls);
    double r = 0;
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < s; ++i) {
        r = std::max(r, scaled_residual(d_oneform(ls.eta_jet(i), f.E[a], f.F[a]).value(), -beta));
      }
    }
    return std::optional(r);
  });
  add("paper_example.phi_EF", "Phi(E_a, F_a) = g(E_a, f F_a) = -beta", "ground_truth",
      [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        double r = 0;
        for (int a = 0; a < n; ++a) r = std::max(r, scaled_residual(pair(f.E[a], ls.phi_jet(), f.F[a]).value(), -beta));
        return std::optional(r);
      });
  add("paper_example.phi_equals_d_eta", "Phi = d eta^1 = ... = d eta^s", "axiom",
      [&](const LocalStructure& ls, int k) {
        const auto& F = ctx.samples().fields[k];
        double r = 0;
        for (int i = 0; i < s; ++i) {
          r = std::max(r, scaled_residual(pair(F[0], ls.phi_jet(), F[1]).value(),
                                          d_oneform(ls.eta_jet(i), F[0], F[1]).value()));
        }
        return std::optional(r);
      });
  add("paper_example.d_eta_reeb", "d eta^i(xi_j, V) = 0 for every frame field V", "ground_truth",
      [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        std::vector<JetVec> all = f.E;
        all.insert(all.end(), f.F.begin(), f.F.end());
        for (int j = 0; j < s; ++j) all.push_back(ls.xi_jet(j));
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            for (const JetVec& v : all) r = std::max(r, std::abs(d_oneform(ls.eta_jet(i), ls.xi_jet(j), v).value()));
          }
        }
        return std::optional(r);
      });
  add("paper_example.reeb_brackets", "[xi_i, E_a] = [xi_i, F_a] = [xi_i, xi_j] = 0", "ground_truth",
      [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int a = 0; a < n; ++a) {
            r = std::max({r, detail::sup(values(bracket(ls.xi_jet(i), f.E[a]))),
                          detail::sup(values(bracket(ls.xi_jet(i), f.F[a])))});
          }
          for (int j = 0; j < s; ++j) r = std::max(r, detail::sup(values(bracket(ls.xi_jet(i), ls.xi_jet(j)))));
        }
        return std::optional(r);
      });
  add("paper_example.bracket_d_eta_consistency", "2 d eta^i(E_a, F_a) = -eta^i([E_a, F_a])", "axiom",
      [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        double r = 0;
        for (int a = 0; a < n; ++a) {
          const JetVec b = bracket(f.E[a], f.F[a]);
          for (int i = 0; i < s; ++i) {
            r = std::max(r, scaled_residual(2.0 * d_oneform(ls.eta_jet(i), f.E[a], f.F[a]).value(),
                                            -dot(ls.eta_jet(i), b).value()));
          }
        }
        return std::optional(r);
      });
  // measured xibar-coefficients, averaged over the samples
  auto coef_bracket = std::make_shared<Accumulator>();
  auto coef_nabla = std::make_shared<Accumulator>();
  auto coef_witness = std::make_shared<Accumulator>();
  auto along_xibar = [](const LocalStructure& ls, const Vec& v, Accumulator& acc) {
    const double c = ls.eta(0).dot(v);
    acc.add(c);
    return scaled_residual(v, Vec(c * ls.xibar()));
  };
  const CheckReport rb = add("paper_example.bracket_EF_along_xibar", "[E_a, F_a] = c xibar for a constant c",
                             "identity", [&, coef_bracket](const LocalStructure& ls, int) {
                               const FrameAt f = frame_at(ls);
                               double r = 0;
                               for (int a = 0; a < n; ++a) {
                                 r = std::max(r, along_xibar(ls, values(bracket(f.E[a], f.F[a])), *coef_bracket));
                               }
                               return std::optional(r);
                             });
  const CheckReport rn = add("paper_example.nabla_E1F1_along_xibar", "nabla_{E_1} F_1 = c xibar", "identity",
                             [&, coef_nabla](const LocalStructure& ls, int) {
                               const FrameAt f = frame_at(ls);
                               return std::optional(along_xibar(ls, ls.conn().nabla(values(f.E[0]), f.F[0]), *coef_nabla));
                             });
  const CheckReport rw =
      add("paper_example.witness_along_xibar", "(nabla_{E_1} Q)F_1 = c xibar", "identity",
          [&, coef_witness](const LocalStructure& ls, int) {
            const FrameAt f = frame_at(ls);
            const Vec v = ls.conn().nabla_tensor(ls.Q_jet(), values(f.E[0])) * values(f.F[0]);
            return std::optional(along_xibar(ls, v, *coef_witness));
          });
  add("paper_example.nabla_frame_xi", "nabla_{E_a} xi_i = -f E_a = -beta F_a, nabla_{F_a} xi_i = beta E_a",
      "identity", [&](const LocalStructure& ls, int) {
        const FrameAt f = frame_at(ls);
        double r = 0;
        for (int i = 0; i < s; ++i) {
          for (int a = 0; a < n; ++a) {
            const Vec e = values(f.E[a]), fv = values(f.F[a]);
            r = std::max({r, scaled_residual(ls.conn().nabla(e, ls.xi_jet(i)), Vec(-beta * fv)),
                          scaled_residual(ls.conn().nabla(fv, ls.xi_jet(i)), Vec(beta * e))});
          }
        }
        return std::optional(r);
      });
  add("paper_example.h_vanishes", "h_i = 1/2 L_{xi_i} f = 0", "ground_truth", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, detail::sup(ls.h(i)));
    return std::optional(r);
  });
  add("paper_example.condition_A", "(L_{xi_i} Q) = 0", "hypothesis", [s](const LocalStructure& ls, int) {
    double r = 0;
    for (int i = 0; i < s; ++i) r = std::max(r, detail::vanish(ls.lieQ(i), detail::sup(ls.Q())));
    return std::optional(r);
  });
  {
    const bool b_holds = ctx.hypothesis("condition_B").met;
    const bool beta_one = std::abs(beta - 1.0) <= 1e-12;
    add("paper_example.condition_B_iff_beta_one",
        "(nabla_X Q)Y = 0 on D holds exactly when beta = 1 (0 when it matches, else 1)", "identity",
        [b_holds, beta_one](const LocalStructure&, int) { return std::optional(b_holds == beta_one ? 0.0 : 1.0); });
  }
  auto coef_flag = [&](const std::string& id, const std::string& what, double stated, const Accumulator& acc,
                       const CheckReport& rep) {
    if (rep.verdict == Verdict::kSkipped || acc.count() == 0) return;
    const double measured = acc.mean();
    ctx.flags().push_back(Flag{id, what, stated, measured, scaled_residual(stated, measured) <= 1e-8});
  };
  coef_flag("lie_bracket_EF_coefficient", "xibar-coefficient of [E_a, F_a]; stated 4 beta", 4.0 * beta,
            *coef_bracket, rb);
  coef_flag("nabla_E1F1_coefficient", "xibar-coefficient of nabla_{E_1} F_1; stated 2 beta", 2.0 * beta, *coef_nabla,
            rn);
  coef_flag("witness_coefficient", "xibar-coefficient of (nabla_{E_1} Q)F_1; stated 2 beta (beta^2 - 1)",
            2.0 * beta * (beta * beta - 1.0), *coef_witness, rw);
  return out;
}

// ---------------------------------------------------------------------------
// Registry.

struct CheckGroup {
  std::string name;
  std::function<ReportList(CheckContext&)> run;
};

inline const std::vector<CheckGroup>& check_groups() {
  static const std::vector<CheckGroup> groups = {
      {"axioms", group_axioms},         {"engine", group_engine},
      {"structure", group_structure},   {"condition_a", group_condition_a},
      {"condition_b", group_condition_b}, {"curvature", group_curvature},
      {"prop51", group_prop51},         {"theorem1", group_theorem1},
      {"theorem2", group_theorem2},     {"kmu", group_kmu},
      {"kappa1", group_kappa1},         {"paper_example", group_paper_example},
  };
  return groups;
}

/// Runs the selected checks.  A selector is "all", a group name, or a full
/// check name.
inline ReportList run_checks(CheckContext& ctx, const std::vector<std::string>& selection) {
  if (selection.empty()) throw ConfigError("empty check list");
  bool all = false;
  std::set<std::string> groups, names;
  for (const auto& sel : selection) {
    if (sel == "all") {
      all = true;
      continue;
    }
    bool known = false;
    for (const auto& g : check_groups()) {
      if (sel == g.name) {
        groups.insert(g.name);
        known = true;
      } else if (sel.rfind(g.name + ".", 0) == 0) {
        groups.insert(g.name);
        names.insert(sel);
        known = true;
      }
    }
    if (!known) throw ConfigError("unknown check '" + sel + "'");
  }
  ReportList out;
  std::set<std::string> seen;
  for (const auto& g : check_groups()) {
    if (!all && !groups.count(g.name)) continue;
    const bool whole = all || std::any_of(selection.begin(), selection.end(), [&](const auto& s) { return s == g.name; });
    for (auto& r : g.run(ctx)) {
      if (whole || names.count(r.name)) out.push_back(std::move(r));
    }
  }
  for (const auto& n : names) {
    if (std::none_of(out.begin(), out.end(), [&](const CheckReport& r) { return r.name == n; }) &&
        !(ctx.example() == std::nullopt && n.rfind("paper_example.", 0) == 0)) {
      throw ConfigError("unknown check '" + n + "'");
    }
  }
  return out;
}

/// Diagnostic flags for the (kappa, mu) fit: joint and per Reeb field.
inline void nullity_flags(CheckContext& ctx) {
  const NullityFits& fits = ctx.nullity();
  const double tol = ctx.tolerances().get("nullity", "nullity");
  auto emit = [&](const std::string& id, const NullityFit& fit) {
    ctx.flags().push_back(Flag{id + ".kappa", "least-squares kappa", std::nullopt, fit.kappa, fit.residual <= tol});
    ctx.flags().push_back(Flag{id + ".mu",
                               fit.mu_identifiable ? "least-squares mu" : "mu is not identifiable (h vanishes)",
                               std::nullopt,
                               fit.mu_identifiable ? std::optional<double>(fit.mu) : std::nullopt, true});
    ctx.flags().push_back(Flag{id + ".residual", "largest relative residual of the fitted nullity condition", 0.0,
                               fit.residual, fit.residual <= tol});
  };
  emit("nullity_fit", fits.joint);
  if (fits.per_reeb.size() > 1) {
    for (size_t i = 0; i < fits.per_reeb.size(); ++i) emit("nullity_fit.xi" + std::to_string(i + 1), fits.per_reeb[i]);
  }
}

}  // namespace wfs
