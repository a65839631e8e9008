#pragma once

#include "ksd/sdp.hpp"

namespace ksd::synth {

using affine::Expr;

struct IterationConfig {
    double rho1 = 1e-3;  // proximal weight on Y = [P1 P2]
    double rho2 = 1e-3;  // proximal weight on K
    double eps = 1e-4;   // relative-change stopping tolerance
    int max_iter = 20;
    bool gamma_in_objective = true;
};

struct IterRecord {
    int k = 0;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double dY = 0.0, dK = 0.0;
    double eig_main = 0.0;  // largest eigenvalue of the original inequality at the iterate
    SolveStatus status = SolveStatus::NumericalFailure;
};

struct SynthesisResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::string message;
    std::string mode;
    Mat K;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    Mat P1, P2, P3;
    std::vector<Mat> Q, R;
    Mat X, V;                // slack-variable route only
    double analysis_gamma = std::numeric_limits<double>::quiet_NaN();
    std::vector<IterRecord> trace;
    double solve_seconds = 0.0;
};

namespace detail {

struct SupplyCtx {
    lmi::SupplyExprs J;
    int gamma_var = -1;  // -1 when the supply rate is fixed
};

inline SupplyCtx make_supply(const SupplyRate& sr, int m, int q, affine::VarTable& vt) {
    SupplyCtx ctx;
    if (sr.mode == SupplyMode::L2GainMin) {
        ctx.gamma_var = vt.add_scalar("gamma");
        ctx.J = lmi::supply_exprs_l2gain(m, q, Expr::var(vt, ctx.gamma_var));
    } else {
        ctx.J = lmi::supply_exprs_explicit(sr);
    }
    return ctx;
}

struct LyapVars {
    int P1, P2, P3;
    std::vector<int> Q, R;
};

inline LyapVars add_lyap_vars(affine::VarTable& vt, const DimensionTable& dt) {
    LyapVars v;
    v.P1 = vt.add_sym("P1", dt.n);
    v.P2 = vt.add_rect("P2", dt.n, dt.e);
    v.P3 = vt.add_sym("P3", dt.e);
    for (int i = 0; i < dt.nu; ++i) {
        v.Q.push_back(vt.add_sym("Q" + std::to_string(i + 1), dt.n));
        v.R.push_back(vt.add_sym("R" + std::to_string(i + 1), dt.n));
    }
    return v;
}

inline std::vector<Expr> exprs_of(const affine::VarTable& vt, const std::vector<int>& ids) {
    std::vector<Expr> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(Expr::var(vt, id));
    return out;
}

inline void add_qr_lmis(SdpProblem& p, const std::vector<int>& q, const std::vector<int>& r) {
    for (size_t i = 0; i < q.size(); ++i) {
        p.add(lmi::make_lmi(Expr::var(p.vars, q[i]), lmi::AffineLMI::Sense::GeqEps,
                            "Q" + std::to_string(i + 1)));
        p.add(lmi::make_lmi(Expr::var(p.vars, r[i]), lmi::AffineLMI::Sense::GeqEps,
                            "R" + std::to_string(i + 1)));
    }
}

inline void fill_certificate(SynthesisResult& res, const affine::Assignment& a,
                             const LyapVars& v) {
    res.P1 = a[static_cast<size_t>(v.P1)];
    res.P2 = a[static_cast<size_t>(v.P2)];
    res.P3 = a[static_cast<size_t>(v.P3)];
    res.Q.clear();
    res.R.clear();
    for (int id : v.Q) res.Q.push_back(a[static_cast<size_t>(id)]);
    for (int id : v.R) res.R.push_back(a[static_cast<size_t>(id)]);
}

// Largest eigenvalue of the original synthesis inequality evaluated at a
// numeric point (negative definite iff < 0).
inline double main_inequality_eig(const AugmentedPlant& ap, const Mat& p1, const Mat& p2,
                                  const Mat& p3, const std::vector<Mat>& q,
                                  const std::vector<Mat>& r, const Mat& k,
                                  const SupplyRate& sr, double gamma) {
    lmi::SupplyExprs j = (sr.mode == SupplyMode::L2GainMin)
                             ? lmi::supply_exprs_explicit(
                                   make_supply_rate_l2gain(gamma, ap.dims.m, ap.dims.q))
                             : lmi::supply_exprs_explicit(sr);
    std::vector<Expr> qe, re;
    for (const auto& m : q) qe.push_back(Expr::constant(m));
    for (const auto& m : r) re.push_back(Expr::constant(m));
    const Mat lhs = lmi::theorem1_right(ap, Expr::constant(p1), Expr::constant(p2),
                                        Expr::constant(p3), qe, re, Expr::constant(k), j)
                        .constant_part();
    return eig_max(0.5 * (lhs + lhs.transpose()));
}

}  // namespace detail

// Slack-variable synthesis: minimize gamma subject to the convexified
// conditions; the gain is recovered as K = V X^{-1} and re-certified by the
// analysis program.
inline SynthesisResult solve_theorem2(const AugmentedPlant& ap, const SupplyRate& supply,
                                      const std::vector<double>& alphas,
                                      const SolverOptions& opts = default_solver_options());

// Analysis: K given, minimize gamma over the functional variables.
inline SynthesisResult analyze_theorem1_fixed_gain(const AugmentedPlant& ap,
                                                   const SupplyRate& supply, const Mat& K,
                                                   const SolverOptions& opts =
                                                       default_solver_options()) {
    SynthesisResult res;
    res.mode = "analyze";
    SdpProblem p;
    auto v = detail::add_lyap_vars(p.vars, ap.dims);
    auto sup = detail::make_supply(supply, ap.dims.m, ap.dims.q, p.vars);
    auto qe = detail::exprs_of(p.vars, v.Q);
    auto re = detail::exprs_of(p.vars, v.R);

    p.add(lmi::make_lmi(lmi::positivity_block(ap, Expr::var(p.vars, v.P1),
                                              Expr::var(p.vars, v.P2), Expr::var(p.vars, v.P3),
                                              qe),
                        lmi::AffineLMI::Sense::GeqEps, "functional positivity"));
    detail::add_qr_lmis(p, v.Q, v.R);
    p.add(lmi::make_lmi(
        lmi::theorem1_right(ap, Expr::var(p.vars, v.P1), Expr::var(p.vars, v.P2),
                            Expr::var(p.vars, v.P3), qe, re, Expr::constant(K), sup.J),
        lmi::AffineLMI::Sense::LeqNegEps, "dissipation inequality"));
    if (sup.gamma_var >= 0) p.minimize(Expr::var(p.vars, sup.gamma_var));

    auto sol = solve(p, opts);
    res.status = sol.status;
    res.message = sol.diag.message;
    res.solve_seconds = sol.diag.solve_seconds;
    res.K = K;
    if (sol.status != SolveStatus::Optimal) return res;
    detail::fill_certificate(res, sol.values, v);
    res.gamma = sup.gamma_var >= 0 ? sol.values[static_cast<size_t>(sup.gamma_var)](0, 0)
                                   : std::numeric_limits<double>::quiet_NaN();
    return res;
}

// Gain improvement: P1, P2 frozen, minimize gamma over (K, P3, Q, R).
inline SynthesisResult improve_gain_fixed_P(const AugmentedPlant& ap, const SupplyRate& supply,
                                            const Mat& P1, const Mat& P2,
                                            const SolverOptions& opts =
                                                default_solver_options()) {
    SynthesisResult res;
    res.mode = "improve";
    SdpProblem p;
    const auto& dt = ap.dims;
    const int kv = p.vars.add_rect("K", dt.p, dt.n);
    const int p3v = p.vars.add_sym("P3", dt.e);
    std::vector<int> qv, rv;
    for (int i = 0; i < dt.nu; ++i) {
        qv.push_back(p.vars.add_sym("Q" + std::to_string(i + 1), dt.n));
        rv.push_back(p.vars.add_sym("R" + std::to_string(i + 1), dt.n));
    }
    auto sup = detail::make_supply(supply, dt.m, dt.q, p.vars);
    auto qe = detail::exprs_of(p.vars, qv);
    auto re = detail::exprs_of(p.vars, rv);

    p.add(lmi::make_lmi(lmi::positivity_block(ap, Expr::constant(P1), Expr::constant(P2),
                                              Expr::var(p.vars, p3v), qe),
                        lmi::AffineLMI::Sense::GeqEps, "functional positivity"));
    detail::add_qr_lmis(p, qv, rv);
    p.add(lmi::make_lmi(lmi::theorem1_right(ap, Expr::constant(P1), Expr::constant(P2),
                                            Expr::var(p.vars, p3v), qe, re,
                                            Expr::var(p.vars, kv), sup.J),
                        lmi::AffineLMI::Sense::LeqNegEps, "dissipation inequality"));
    if (sup.gamma_var >= 0) p.minimize(Expr::var(p.vars, sup.gamma_var));

    auto sol = solve(p, opts);
    res.status = sol.status;
    res.message = sol.diag.message;
    res.solve_seconds = sol.diag.solve_seconds;
    if (sol.status != SolveStatus::Optimal) return res;
    res.K = sol.values[static_cast<size_t>(kv)];
    res.P1 = P1;
    res.P2 = P2;
    res.P3 = sol.values[static_cast<size_t>(p3v)];
    for (int id : qv) res.Q.push_back(sol.values[static_cast<size_t>(id)]);
    for (int id : rv) res.R.push_back(sol.values[static_cast<size_t>(id)]);
    res.gamma = sup.gamma_var >= 0 ? sol.values[static_cast<size_t>(sup.gamma_var)](0, 0)
                                   : std::numeric_limits<double>::quiet_NaN();
    return res;
}

inline SynthesisResult solve_theorem2(const AugmentedPlant& ap, const SupplyRate& supply,
                                      const std::vector<double>& alphas,
                                      const SolverOptions& opts) {
    SynthesisResult res;
    res.mode = "synth2";
    const auto& dt = ap.dims;
    if (static_cast<int>(alphas.size()) != dt.beta)
        throw DomainError("expected beta = " + std::to_string(dt.beta) + " alpha values");

    SdpProblem p;
    const int xv = p.vars.add_sym("X", dt.n);
    const int vv = p.vars.add_rect("V", dt.p, dt.n);
    auto lv = detail::add_lyap_vars(p.vars, dt);
    auto sup = detail::make_supply(supply, dt.m, dt.q, p.vars);
    auto qe = detail::exprs_of(p.vars, lv.Q);
    auto re = detail::exprs_of(p.vars, lv.R);

    p.add(lmi::make_lmi(lmi::positivity_block(ap, Expr::var(p.vars, lv.P1),
                                              Expr::var(p.vars, lv.P2),
                                              Expr::var(p.vars, lv.P3), qe),
                        lmi::AffineLMI::Sense::GeqEps, "functional positivity"));
    detail::add_qr_lmis(p, lv.Q, lv.R);
    p.add(lmi::make_lmi(
        lmi::theorem2_lmi(ap, Expr::var(p.vars, xv), Expr::var(p.vars, vv),
                          Expr::var(p.vars, lv.P1), Expr::var(p.vars, lv.P2),
                          Expr::var(p.vars, lv.P3), qe, re, sup.J, alphas),
        lmi::AffineLMI::Sense::LeqNegEps, "slack synthesis inequality"));
    if (sup.gamma_var >= 0) p.minimize(Expr::var(p.vars, sup.gamma_var));

    auto sol = solve(p, opts);
    res.status = sol.status;
    res.message = sol.diag.message;
    res.solve_seconds = sol.diag.solve_seconds;
    if (sol.status != SolveStatus::Optimal) return res;

    res.X = sol.values[static_cast<size_t>(xv)];
    res.V = sol.values[static_cast<size_t>(vv)];
    detail::fill_certificate(res, sol.values, lv);
    res.gamma = sup.gamma_var >= 0 ? sol.values[static_cast<size_t>(sup.gamma_var)](0, 0)
                                   : std::numeric_limits<double>::quiet_NaN();

    Eigen::SelfAdjointEigenSolver<Mat> es(res.X);
    const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "slack variable X numerically singular";
        return res;
    }
    res.K = res.V * res.X.inverse();

    // Independent re-certification through the analysis program.
    auto check = analyze_theorem1_fixed_gain(ap, supply, res.K, opts);
    if (check.status != SolveStatus::Optimal) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "recovered gain failed re-certification: " + check.message;
        return res;
    }
    res.analysis_gamma = check.gamma;
    if (sup.gamma_var >= 0 && !(check.gamma <= res.gamma + 1e-6)) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "analysis gamma exceeds synthesis gamma";
    }
    return res;
}

// Iterative inner convex approximation seeded by the slack-variable solve:
// alternation (analyze, improve) fixes the anchors, then each pass minimizes
// gamma plus proximal terms subject to the anchored convexification, whose
// feasibility implies the original inequality at the new iterate.
inline SynthesisResult algorithm1(const AugmentedPlant& ap, const SupplyRate& supply,
                                  const std::vector<double>& alphas,
                                  const IterationConfig& cfg = {},
                                  const SolverOptions& opts = default_solver_options()) {
    SynthesisResult res;
    res.mode = "iterate";
    const auto& dt = ap.dims;

    auto seed = solve_theorem2(ap, supply, alphas, opts);
    if (seed.status != SolveStatus::Optimal) {
        res.status = seed.status;
        res.message = "initialization failed: " + seed.message;
        return res;
    }
    auto an = analyze_theorem1_fixed_gain(ap, supply, seed.K, opts);
    if (an.status != SolveStatus::Optimal) {
        res = seed;
        res.mode = "iterate";
        res.message = "anchor analysis failed; returning the initial gain";
        return res;
    }
    auto imp = improve_gain_fixed_P(ap, supply, an.P1, an.P2, opts);
    if (imp.status != SolveStatus::Optimal) {
        res = an;
        res.mode = "iterate";
        res.K = seed.K;
        res.message = "gain improvement failed; returning the analysis anchor";
        return res;
    }

    Mat p1t = an.P1, p2t = an.P2, kt = imp.K;
    res = imp;
    res.mode = "iterate";
    res.trace.clear();

    for (int k = 1; k <= cfg.max_iter; ++k) {
        SdpProblem p;
        auto lv = detail::add_lyap_vars(p.vars, dt);
        const int kv = p.vars.add_rect("K", dt.p, dt.n);
        const int zv = p.vars.add_sym("Z", dt.n);
        const int syv = p.vars.add_sym("SY", dt.n + dt.e);
        const int skv = p.vars.add_sym("SK", dt.n);
        auto sup = detail::make_supply(supply, dt.m, dt.q, p.vars);
        auto qe = detail::exprs_of(p.vars, lv.Q);
        auto re = detail::exprs_of(p.vars, lv.R);

        p.add(lmi::make_lmi(lmi::positivity_block(ap, Expr::var(p.vars, lv.P1),
                                                  Expr::var(p.vars, lv.P2),
                                                  Expr::var(p.vars, lv.P3), qe),
                            lmi::AffineLMI::Sense::GeqEps, "functional positivity"));
        detail::add_qr_lmis(p, lv.Q, lv.R);
        p.add(lmi::make_lmi(
            lmi::eq40_lmi(ap, Expr::var(p.vars, lv.P1), Expr::var(p.vars, lv.P2),
                          Expr::var(p.vars, lv.P3), qe, re, Expr::var(p.vars, kv),
                          Expr::var(p.vars, zv), sup.J, {p1t, p2t, kt}),
            lmi::AffineLMI::Sense::LeqNegEps, "anchored convexification"));

        // Proximal epigraphs: SY >= (Y - Yt)'(Y - Yt), SK >= (K - Kt)'(K - Kt).
        Expr y = affine::hcat({Expr::var(p.vars, lv.P1), Expr::var(p.vars, lv.P2)}) -
                 Expr::constant(hstack({p1t, p2t}));
        Expr epi_y = affine::place(dt.n + dt.n + dt.e, dt.n + dt.n + dt.e, 0, 0,
                                   Expr::constant(Mat::Identity(dt.n, dt.n))) +
                     affine::place(dt.n + dt.n + dt.e, dt.n + dt.n + dt.e, 0, dt.n, y) +
                     affine::place(dt.n + dt.n + dt.e, dt.n + dt.n + dt.e, dt.n, 0, y.t()) +
                     affine::place(dt.n + dt.n + dt.e, dt.n + dt.n + dt.e, dt.n, dt.n,
                                   Expr::var(p.vars, syv));
        p.add(lmi::make_lmi(epi_y, lmi::AffineLMI::Sense::GeqEps, "prox Y", 0.0));
        Expr dk = Expr::var(p.vars, kv) - Expr::constant(kt);
        Expr epi_k = affine::place(dt.p + dt.n, dt.p + dt.n, 0, 0,
                                   Expr::constant(Mat::Identity(dt.p, dt.p))) +
                     affine::place(dt.p + dt.n, dt.p + dt.n, 0, dt.p, dk) +
                     affine::place(dt.p + dt.n, dt.p + dt.n, dt.p, 0, dk.t()) +
                     affine::place(dt.p + dt.n, dt.p + dt.n, dt.p, dt.p,
                                   Expr::var(p.vars, skv));
        p.add(lmi::make_lmi(epi_k, lmi::AffineLMI::Sense::GeqEps, "prox K", 0.0));

        Expr obj = affine::trace_of(Expr::var(p.vars, syv)).scaled(cfg.rho1) +
                   affine::trace_of(Expr::var(p.vars, skv)).scaled(cfg.rho2);
        if (cfg.gamma_in_objective && sup.gamma_var >= 0)
            obj = std::move(obj) + Expr::var(p.vars, sup.gamma_var);
        p.minimize(std::move(obj));

        auto sol = solve(p, opts);
        IterRecord rec;
        rec.k = k;
        rec.status = sol.status;
        if (sol.status != SolveStatus::Optimal) {
            res.message = "iteration " + std::to_string(k) + " " + to_string(sol.status) +
                          "; returning best iterate so far";
            res.trace.push_back(rec);
            break;
        }

        const Mat p1 = sol.values[static_cast<size_t>(lv.P1)];
        const Mat p2 = sol.values[static_cast<size_t>(lv.P2)];
        const Mat p3 = sol.values[static_cast<size_t>(lv.P3)];
        const Mat kk = sol.values[static_cast<size_t>(kv)];
        std::vector<Mat> qm, rm;
        for (int id : lv.Q) qm.push_back(sol.values[static_cast<size_t>(id)]);
        for (int id : lv.R) rm.push_back(sol.values[static_cast<size_t>(id)]);
        const double gamma = sup.gamma_var >= 0
                                 ? sol.values[static_cast<size_t>(sup.gamma_var)](0, 0)
                                 : std::numeric_limits<double>::quiet_NaN();

        // Soundness of the inner approximation: the original inequality must
        // hold at the returned point.
        rec.eig_main = detail::main_inequality_eig(ap, p1, p2, p3, qm, rm, kk, supply, gamma);
        rec.gamma = gamma;
        rec.dY = (hstack({p1, p2}) - hstack({p1t, p2t})).cwiseAbs().maxCoeff();
        rec.dK = (kk - kt).cwiseAbs().maxCoeff();
        if (rec.eig_main > -1e-9) {
            rec.status = SolveStatus::NumericalFailure;
            res.trace.push_back(rec);
            res.message = "iteration " + std::to_string(k) +
                          " violated the original inequality; returning best iterate so far";
            break;
        }

        const double y_scale = hstack({p1t, p2t}).cwiseAbs().maxCoeff() + 1.0;
        const double k_scale = kt.cwiseAbs().maxCoeff() + 1.0;

        res.K = kk;
        res.gamma = gamma;
        res.P1 = p1;
        res.P2 = p2;
        res.P3 = p3;
        res.Q = qm;
        res.R = rm;
        res.status = SolveStatus::Optimal;
        res.trace.push_back(rec);

        p1t = p1;
        p2t = p2;
        kt = kk;
        if (std::max(rec.dY / y_scale, rec.dK / k_scale) < cfg.eps) break;
    }
    return res;
}

}  // namespace ksd::synth
