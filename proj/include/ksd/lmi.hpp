#pragma once

#include "ksd/affine.hpp"
#include "ksd/augplant.hpp"

namespace ksd::lmi {

using affine::Expr;

// Product of affine expressions, defined when at most one side is variable.
inline Expr mul(const Expr& a, const Expr& b) {
    if (a.is_constant()) return b.lmul(a.constant_part());
    if (b.is_constant()) return a.rmul(b.constant_part());
    throw DomainError("bilinear product of affine expressions");
}

// M * s for a scalar expression s (sum of rank-one terms).
inline Expr scale_by_scalar(const Mat& m, const Expr& s) {
    if (s.rows() != 1 || s.cols() != 1) throw DomainError("scale_by_scalar needs a 1x1 expression");
    Expr out = Expr::zero(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Mat ej = Mat::Zero(1, m.cols());
        ej(0, j) = 1.0;
        out = std::move(out) + s.lmul(m.col(j)).rmul(ej);
    }
    return out;
}

struct AffineLMI {
    enum class Sense { GeqEps, LeqNegEps };
    Expr expr;
    Sense sense = Sense::GeqEps;
    double eps = 0.0;
    std::string name;

    // Equivalent expression constrained to the PSD cone.
    Expr normalized() const {
        const Eigen::Index n = expr.rows();
        const Mat shift = eps * Mat::Identity(n, n);
        if (sense == Sense::GeqEps) return expr - Expr::constant(shift);
        return (-expr) - Expr::constant(shift);
    }
};

// Strict inequalities are realized with a uniform margin scaled by the
// constant part of the expression.
inline AffineLMI make_lmi(Expr e, AffineLMI::Sense sense, std::string name,
                          double eps_scale = 1e-8) {
    if (e.rows() != e.cols()) throw DomainError("LMI expression must be square: " + name);
    const double nc = e.constant_part().size()
                          ? e.constant_part().cwiseAbs().maxCoeff()
                          : 0.0;
    AffineLMI l;
    l.eps = eps_scale * (1.0 + nc);
    l.expr = std::move(e);
    l.sense = sense;
    l.name = std::move(name);
    return l;
}

// Supply-rate ingredients as expressions. J1 and J3 may depend on a scalar
// gamma variable (l2-gain minimization); Jtilde and J2 are always constant.
struct SupplyExprs {
    Expr J1;
    Mat Jtilde, J2;
    Expr J3;
};

inline SupplyExprs supply_exprs_explicit(const SupplyRate& sr) {
    return {Expr::constant(sr.J1), sr.Jtilde, sr.J2, Expr::constant(sr.J3)};
}

inline SupplyExprs supply_exprs_l2gain(int m, int q, const Expr& gamma) {
    SupplyExprs s;
    s.J1 = scale_by_scalar(-Mat::Identity(m, m), gamma);
    s.Jtilde = Mat::Identity(m, m);
    s.J2 = Mat::Zero(m, q);
    s.J3 = scale_by_scalar(Mat::Identity(q, q), gamma);
    return s;
}

// (I_beta kron K) ⊕ O_q as an expression in K.
inline Expr gain_block_expr(const DimensionTable& dt, const Expr& k) {
    return affine::place(dt.input_width(), dt.state_width(), 0, 0,
                         affine::kron_identity(dt.beta, k));
}

inline Expr omega_of(const AugmentedPlant& ap, const Expr& k) {
    return Expr::constant(ap.A) + gain_block_expr(ap.dims, k).lmul(ap.B1);
}

inline Expr sigma_of(const AugmentedPlant& ap, const Expr& k) {
    return Expr::constant(ap.C) + gain_block_expr(ap.dims, k).lmul(ap.B2);
}

// Block-diagonal dissipation weight over the theta layout:
//   x:      Q_1 + rhat_1 R_1
//   chi_j:  Q_{j+1} + rhat_{j+1} R_{j+1} - Q_j   (j = 1..nu-1)
//   chi_nu: -Q_nu
//   xi_i:   -(I kron R_i),   e_i: -(I kron R_i),   w: -J3
inline Expr build_xi(const AugmentedPlant& ap, const std::vector<Expr>& q,
                     const std::vector<Expr>& r, const Expr& j3) {
    const auto& dt = ap.dims;
    const int w = dt.state_width();
    Expr out = Expr::zero(w, w);
    auto put = [&](int off, const Expr& e) {
        out = std::move(out) + affine::place(w, w, off, off, e);
    };
    put(dt.x_off(), q[0] + r[0].scaled(ap.rhat[0]));
    for (int j = 1; j <= dt.nu - 1; ++j)
        put(dt.chi_off(j), q[static_cast<size_t>(j)] +
                               r[static_cast<size_t>(j)].scaled(ap.rhat[static_cast<size_t>(j)]) -
                               q[static_cast<size_t>(j - 1)]);
    put(dt.chi_off(dt.nu), -q[static_cast<size_t>(dt.nu - 1)]);
    for (int i = 1; i <= dt.nu; ++i) {
        put(dt.xi_off(i), -affine::kron_identity(dt.varkappa[static_cast<size_t>(i - 1)],
                                                 r[static_cast<size_t>(i - 1)]));
        if (dt.mu[static_cast<size_t>(i - 1)] > 0)
            put(dt.e_off(i), -affine::kron_identity(dt.mu[static_cast<size_t>(i - 1)],
                                                    r[static_cast<size_t>(i - 1)]));
    }
    put(dt.w_off(), -j3);
    return out;
}

// P = [P1, O, P2 Ihat, O]  (n x phi_width)
inline Expr pmat(const AugmentedPlant& ap, const Expr& p1, const Expr& p2) {
    const auto& dt = ap.dims;
    const int w = dt.phi_width();
    return affine::place(dt.n, w, 0, dt.x_off(), p1) +
           affine::place(dt.n, w, 0, dt.xi_off(1), p2.rmul(ap.Ihat));
}

// [M kron I_n, O] padded to `cols` columns.
inline Mat m_padded(const AugmentedPlant& ap, int cols) {
    const auto& dt = ap.dims;
    Mat mi = kron(ap.Mmat, Mat::Identity(dt.n, dt.n));
    Mat out = Mat::Zero(mi.rows(), cols);
    out.leftCols(mi.cols()) = mi;
    return out;
}

// Phi of the main synthesis inequality: the K-independent functional part
// plus supply couplings, with trailing corner J1 (Schur corner of the left
// form). `sigma` is m x state_width.
inline Expr build_phi(const AugmentedPlant& ap, const Expr& p2, const Expr& p3,
                      const std::vector<Expr>& q, const std::vector<Expr>& r, const Expr& sigma,
                      const SupplyExprs& j) {
    const auto& dt = ap.dims;
    const int w = dt.phi_width();
    const int dn = dt.e;

    // U = [P2; O; Ihat' P3; O]  (w x dn)
    Expr u = affine::place(w, dn, dt.x_off(), 0, p2) +
             affine::place(w, dn, dt.xi_off(1), 0, p3.lmul(ap.Ihat.transpose()));

    // W2 = [O; -J2'; Jtilde]  (w x m), constant
    Mat w2 = Mat::Zero(w, dt.m);
    w2.block(dt.w_off(), 0, dt.q, dt.m) = -j.J2.transpose();
    w2.bottomRows(dt.m) = j.Jtilde;

    Expr sigma_pad = affine::hcat({sigma, Expr::zero(dt.m, dt.m)});
    Expr core = u.rmul(m_padded(ap, w)) + sigma_pad.lmul(w2);

    Expr xi = build_xi(ap, q, r, j.J3);
    return core.sym() + affine::blockdiag({xi, j.J1});
}

// Right form of the main inequality: Sy(P' Pi) + Phi, with Pi = [Omega, O].
inline Expr theorem1_right(const AugmentedPlant& ap, const Expr& p1, const Expr& p2,
                           const Expr& p3, const std::vector<Expr>& q,
                           const std::vector<Expr>& r, const Expr& k, const SupplyExprs& j) {
    const auto& dt = ap.dims;
    Expr pi = affine::hcat({omega_of(ap, k), Expr::zero(dt.n, dt.m)});
    Expr p = pmat(ap, p1, p2);
    return mul(p.t(), pi).sym() + build_phi(ap, p2, p3, q, r, sigma_of(ap, k), j);
}

// Left form [Psi, Sigma' Jt'; *, J1] assembled from the boundary-coupling
// route; used to pin the right form entrywise.
inline Expr theorem1_left(const AugmentedPlant& ap, const Expr& p1, const Expr& p2,
                          const Expr& p3, const std::vector<Expr>& q, const std::vector<Expr>& r,
                          const Expr& k, const SupplyExprs& j) {
    const auto& dt = ap.dims;
    const int sw = dt.state_width();
    const int n = dt.n, dn = dt.e;

    // S = [I_n at x; Ihat at xi]  ((n+dn) x sw)
    Mat s = Mat::Zero(n + dn, sw);
    s.block(0, dt.x_off(), n, n) = Mat::Identity(n, n);
    s.block(n, dt.xi_off(1), dn, dt.vk_tot * n) = ap.Ihat;

    // PP = [P1 P2; * P3]
    Expr pp = affine::place(n + dn, n + dn, 0, 0, p1) + affine::place(n + dn, n + dn, 0, n, p2) +
              affine::place(n + dn, n + dn, n, 0, p2.t()) +
              affine::place(n + dn, n + dn, n, n, p3);

    Expr sigma = sigma_of(ap, k);
    Expr inner = affine::vcat({omega_of(ap, k), Expr::constant(m_padded(ap, sw))});
    Mat j2row = Mat::Zero(sw, dt.m);
    j2row.bottomRows(dt.q) = j.J2.transpose();
    Expr psi = (mul(pp.lmul(s.transpose()), inner) - sigma.lmul(j2row)).sym() +
               build_xi(ap, q, r, j.J3);

    const int w = dt.phi_width();
    Expr sig_jt = sigma.t().rmul(j.Jtilde.transpose());
    return affine::place(w, w, 0, 0, psi) + affine::place(w, w, 0, sw, sig_jt) +
           affine::place(w, w, sw, 0, sig_jt.t()) + affine::place(w, w, sw, sw, j.J1);
}

// Functional positivity block [P1 P2; * P3] + [O ⊕ diag(I_{d_i} kron Q_i)].
inline Expr positivity_block(const AugmentedPlant& ap, const Expr& p1, const Expr& p2,
                             const Expr& p3, const std::vector<Expr>& q) {
    const auto& dt = ap.dims;
    const int n = dt.n, e = dt.e;
    Expr out = affine::place(n + e, n + e, 0, 0, p1) + affine::place(n + e, n + e, 0, n, p2) +
               affine::place(n + e, n + e, n, 0, p2.t()) + affine::place(n + e, n + e, n, n, p3);
    int off = n;
    for (int i = 0; i < dt.nu; ++i) {
        const int di = dt.d[static_cast<size_t>(i)];
        out = std::move(out) +
              affine::place(n + e, n + e, off, off,
                            affine::kron_identity(di, q[static_cast<size_t>(i)]));
        off += di * dt.n;
    }
    return out;
}

// The slack-variable synthesis inequality: Sy(col(I, alpha_i I, O) [-X, Pi_dot])
// + [O, P_dot; *, Phi_dot], of dimension (1+beta) n + q + m.
inline Expr theorem2_lmi(const AugmentedPlant& ap, const Expr& x, const Expr& v, const Expr& p1,
                         const Expr& p2, const Expr& p3, const std::vector<Expr>& q,
                         const std::vector<Expr>& r, const SupplyExprs& j,
                         const std::vector<double>& alphas) {
    const auto& dt = ap.dims;
    if (static_cast<int>(alphas.size()) != dt.beta)
        throw DomainError("theorem2 needs beta = " + std::to_string(dt.beta) + " alpha scalars");
    const int n = dt.n, w = dt.phi_width();
    const int dim = n + w;

    // (I_beta kron X) ⊕ I_q and (I_beta kron V) ⊕ O_q
    Expr xb = affine::place(dt.state_width(), dt.state_width(), 0, 0,
                            affine::kron_identity(dt.beta, x)) +
              Expr::constant([&] {
                  Mat c = Mat::Zero(dt.state_width(), dt.state_width());
                  c.block(dt.w_off(), dt.w_off(), dt.q, dt.q) = Mat::Identity(dt.q, dt.q);
                  return c;
              }());
    Expr vb = affine::place(dt.input_width(), dt.state_width(), 0, 0,
                            affine::kron_identity(dt.beta, v));

    Expr pi_dot = affine::hcat({xb.lmul(ap.A) + vb.lmul(ap.B1), Expr::zero(n, dt.m)});
    Expr sigma_dot = xb.lmul(ap.C) + vb.lmul(ap.B2);

    Mat col = Mat::Zero(dim, n);
    col.block(0, 0, n, n) = Mat::Identity(n, n);
    for (int b = 0; b < dt.beta; ++b)
        col.block(n + b * n, 0, n, n) = alphas[static_cast<size_t>(b)] * Mat::Identity(n, n);

    Expr row = affine::hcat({-x, pi_dot});
    Expr out = row.lmul(col).sym();

    Expr p_dot = pmat(ap, p1, p2);
    Expr phi_dot = build_phi(ap, p2, p3, q, r, sigma_dot, j);
    out = std::move(out) + affine::place(dim, dim, 0, n, p_dot) +
          affine::place(dim, dim, n, 0, p_dot.t()) + affine::place(dim, dim, n, n, phi_dot);
    return out;
}

struct Eq40Anchors {
    Mat P1, P2, K;
};

// Inner convex approximation of the main inequality around the anchors:
//   [ Phi_hat + Sy(Pt'N + P'Nt - Pt'Nt),  P' - Pt',  (N - Nt)' ]
//   [ *,                                  -Z,        O          ]
//   [ *,                                  *,         Z - I      ]
// with N = [B1, O] [(I kron K) ⊕ O_{q+m}] and Phi_hat the K-free remainder
// Sy(P' [A, O]) + Phi, so that at the anchors the (1,1) block reproduces the
// original inequality exactly.
inline Expr eq40_lmi(const AugmentedPlant& ap, const Expr& p1, const Expr& p2, const Expr& p3,
                     const std::vector<Expr>& q, const std::vector<Expr>& r, const Expr& k,
                     const Expr& z, const SupplyExprs& j, const Eq40Anchors& anchors) {
    const auto& dt = ap.dims;
    const int n = dt.n, w = dt.phi_width();
    const int dim = w + 2 * n;

    Mat b1_pad = Mat::Zero(n, dt.input_width() + dt.m);
    b1_pad.leftCols(dt.input_width()) = ap.B1;
    auto n_of = [&](const Expr& gain) {
        Expr kb = affine::place(dt.input_width() + dt.m, w, 0, 0,
                                affine::kron_identity(dt.beta, gain));
        return kb.lmul(b1_pad);
    };
    Expr n_expr = n_of(k);
    const Mat n_tilde = n_of(Expr::constant(anchors.K)).constant_part();

    Expr p_expr = pmat(ap, p1, p2);
    const Mat p_tilde =
        pmat(ap, Expr::constant(anchors.P1), Expr::constant(anchors.P2)).constant_part();

    Mat a_pad = Mat::Zero(n, w);
    a_pad.leftCols(dt.state_width()) = ap.A;
    Expr phi_hat = p_expr.t().rmul(a_pad).sym() +
                   build_phi(ap, p2, p3, q, r, sigma_of(ap, k), j);

    Expr b11 = phi_hat + (n_expr.lmul(p_tilde.transpose()) + p_expr.t().rmul(n_tilde) -
                          Expr::constant(p_tilde.transpose() * n_tilde))
                             .sym();
    Expr b12 = p_expr.t() - Expr::constant(p_tilde.transpose());
    Expr b13 = (n_expr - Expr::constant(n_tilde)).t();

    Expr out = affine::place(dim, dim, 0, 0, b11);
    out = std::move(out) + affine::place(dim, dim, 0, w, b12) + affine::place(dim, dim, w, 0, b12.t());
    out = std::move(out) + affine::place(dim, dim, 0, w + n, b13) +
          affine::place(dim, dim, w + n, 0, b13.t());
    out = std::move(out) + affine::place(dim, dim, w, w, -z);
    out = std::move(out) +
          affine::place(dim, dim, w + n, w + n, z - Expr::constant(Mat::Identity(n, n)));
    return out;
}

}  // namespace ksd::lmi
