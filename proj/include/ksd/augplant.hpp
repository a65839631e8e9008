#pragma once

#include <numeric>
#include <tuple>

#include "ksd/gram.hpp"
#include "ksd/model.hpp"

namespace ksd {

// Dimension bookkeeping for the augmented state
//   theta = [x; chi_1..chi_nu; xi_1..xi_nu; e_1..e_nu; w]
// with per-interval index counts from the KSD factorization and
// beta = 1 + nu + kappa.
struct DimensionTable {
    int n = 0, m = 0, p = 0, q = 0, nu = 0;
    std::vector<int> d, delta, mu, varkappa, kappa;  // per interval
    int d_tot = 0, vk_tot = 0, mu_tot = 0, kappa_tot = 0;
    int beta = 0;
    int e = 0;  // d_tot * n

    static DimensionTable from(const DelaySystem& sys) {
        DimensionTable t;
        t.n = sys.dims.n;
        t.m = sys.dims.m;
        t.p = sys.dims.p;
        t.q = sys.dims.q;
        t.nu = sys.dims.nu;
        for (const auto& b : sys.basis) {
            t.d.push_back(b.d());
            t.delta.push_back(b.delta());
            t.mu.push_back(b.mu());
            t.varkappa.push_back(b.varkappa());
            t.kappa.push_back(b.kappa());
        }
        t.d_tot = std::accumulate(t.d.begin(), t.d.end(), 0);
        t.vk_tot = std::accumulate(t.varkappa.begin(), t.varkappa.end(), 0);
        t.mu_tot = std::accumulate(t.mu.begin(), t.mu.end(), 0);
        t.kappa_tot = std::accumulate(t.kappa.begin(), t.kappa.end(), 0);
        t.beta = 1 + t.nu + t.kappa_tot;
        t.e = t.d_tot * t.n;
        return t;
    }

    int state_width() const { return beta * n + q; }  // columns of A and C
    int input_width() const { return beta * p + q; }  // columns of B1 and B2
    int phi_width() const { return state_width() + m; }

    // Column offsets into theta (state side). i is 1-based where present.
    int x_off() const { return 0; }
    int chi_off(int i) const { return i * n; }
    int xi_off(int i) const {
        int o = (1 + nu) * n;
        for (int j = 0; j < i - 1; ++j) o += varkappa[static_cast<size_t>(j)] * n;
        return o;
    }
    int e_off(int i) const {
        int o = (1 + nu) * n;
        for (int j = 0; j < nu; ++j) o += varkappa[static_cast<size_t>(j)] * n;
        for (int j = 0; j < i - 1; ++j) o += mu[static_cast<size_t>(j)] * n;
        return o;
    }
    int w_off() const { return beta * n; }

    // Input-side offsets (p replacing n in the first beta blocks).
    int u_pointwise_off(int i) const { return i * p; }  // i in 0..nu
    int u_xi_off(int i) const {
        int o = (1 + nu) * p;
        for (int j = 0; j < i - 1; ++j) o += varkappa[static_cast<size_t>(j)] * p;
        return o;
    }
    int u_e_off(int i) const {
        int o = (1 + nu) * p;
        for (int j = 0; j < nu; ++j) o += varkappa[static_cast<size_t>(j)] * p;
        for (int j = 0; j < i - 1; ++j) o += mu[static_cast<size_t>(j)] * p;
        return o;
    }

    // Scalar-level offsets for the d x (1 + nu + vk_tot) boundary-coupling
    // matrix: column 0 is x, columns 1..nu are the chi ladder, then xi.
    int scalar_xi_off(int i) const {
        int o = 1 + nu;
        for (int j = 0; j < i - 1; ++j) o += varkappa[static_cast<size_t>(j)];
        return o;
    }
    int scalar_f_off(int i) const {
        int o = 0;
        for (int j = 0; j < i - 1; ++j) o += d[static_cast<size_t>(j)];
        return o;
    }
};

// Coefficient matrices of one interval's kernels over the g ordering, so
// that e.g. Atilde_i(tau) = Ahat_i (g_i(tau) kron I_n) exactly.
inline std::tuple<Mat, Mat, Mat, Mat> kernel_coefficients(const DelaySystem& sys, int i) {
    const IntervalBasis& b = sys.basis.at(static_cast<size_t>(i) - 1);
    const DdKernels& k = sys.dd_kernels.at(static_cast<size_t>(i) - 1);
    const int n = sys.dims.n, m = sys.dims.m, p = sys.dims.p, kappa = b.kappa();
    auto pack = [kappa](const std::vector<KernelTerm>& terms, int rows, int cols) {
        Mat out = Mat::Zero(rows, kappa * cols);
        for (const auto& t : terms) {
            if (t.coefficient.rows() != rows || t.coefficient.cols() != cols)
                throw DomainError("kernel term coefficient dimension mismatch");
            if (t.basis_index < 0 || t.basis_index >= kappa)
                throw DomainError("kernel term references an undeclared basis index");
            out.block(0, t.basis_index * cols, rows, cols) += t.coefficient;
        }
        return out;
    };
    return {pack(k.A, n, n), pack(k.B, n, p), pack(k.C, m, n), pack(k.Bfrak, m, p)};
}

// The augmented closed-loop plant: x'(t) = (A + B1 [(I_beta kron K) ⊕ O_q]) theta(t),
// z(t) = (C + B2 [...]) theta(t), plus the structural matrices feeding the
// synthesis conditions.
struct AugmentedPlant {
    Mat A, B1, C, B2;
    std::vector<Mat> Ahat, Bhat, Chat, Bfrakhat;
    Mat Ihat;    // dn x vk n
    Mat Mmat;    // d x (1 + nu + vk)
    Mat Lambda;  // nu n x nu n, diag(rhat_i I_n)
    DimensionTable dims;
    std::vector<GramData> grams;
    std::vector<double> rhat;  // interval lengths
};

inline AugmentedPlant assemble_plant(const DelaySystem& sys, std::vector<GramData> grams) {
    if (grams.size() != sys.basis.size())
        throw DomainError("assemble_plant: one GramData per interval required");
    AugmentedPlant ap;
    ap.dims = DimensionTable::from(sys);
    const auto& dt = ap.dims;
    const int n = dt.n, m = dt.m, p = dt.p, q = dt.q, nu = dt.nu;

    for (int i = 1; i <= nu; ++i) {
        auto [ah, bh, ch, fh] = kernel_coefficients(sys, i);
        ap.Ahat.push_back(std::move(ah));
        ap.Bhat.push_back(std::move(bh));
        ap.Chat.push_back(std::move(ch));
        ap.Bfrakhat.push_back(std::move(fh));
        ap.rhat.push_back(sys.delays.rhat(i));
    }

    ap.A = Mat::Zero(n, dt.state_width());
    ap.C = Mat::Zero(m, dt.state_width());
    ap.B1 = Mat::Zero(n, dt.input_width());
    ap.B2 = Mat::Zero(m, dt.input_width());
    for (int i = 0; i <= nu; ++i) {
        ap.A.middleCols(i * n, n) = sys.A[static_cast<size_t>(i)];
        ap.C.middleCols(i * n, n) = sys.C[static_cast<size_t>(i)];
        ap.B1.middleCols(i * p, p) = sys.B[static_cast<size_t>(i)];
        ap.B2.middleCols(i * p, p) = sys.Bfrak[static_cast<size_t>(i)];
    }
    for (int i = 1; i <= nu; ++i) {
        const auto& gd = grams[static_cast<size_t>(i - 1)];
        const int vk = dt.varkappa[static_cast<size_t>(i - 1)];
        const int mu = dt.mu[static_cast<size_t>(i - 1)];
        const size_t ix = static_cast<size_t>(i - 1);
        ap.A.middleCols(dt.xi_off(i), vk * n) = ap.Ahat[ix] * kron(gd.T, Mat::Identity(n, n));
        ap.C.middleCols(dt.xi_off(i), vk * n) = ap.Chat[ix] * kron(gd.T, Mat::Identity(n, n));
        ap.B1.middleCols(dt.u_xi_off(i), vk * p) = ap.Bhat[ix] * kron(gd.T, Mat::Identity(p, p));
        ap.B2.middleCols(dt.u_xi_off(i), vk * p) =
            ap.Bfrakhat[ix] * kron(gd.T, Mat::Identity(p, p));
        if (mu > 0) {
            ap.A.middleCols(dt.e_off(i), mu * n) =
                ap.Ahat[ix] * kron(gd.Ttilde, Mat::Identity(n, n));
            ap.C.middleCols(dt.e_off(i), mu * n) =
                ap.Chat[ix] * kron(gd.Ttilde, Mat::Identity(n, n));
            ap.B1.middleCols(dt.u_e_off(i), mu * p) =
                ap.Bhat[ix] * kron(gd.Ttilde, Mat::Identity(p, p));
            ap.B2.middleCols(dt.u_e_off(i), mu * p) =
                ap.Bfrakhat[ix] * kron(gd.Ttilde, Mat::Identity(p, p));
        }
    }
    ap.A.middleCols(dt.w_off(), q) = sys.D1;
    ap.C.middleCols(dt.w_off(), q) = sys.D2;
    // B1 and B2 keep zero trailing q columns.

    // Ihat = diag_i( sqrt(F_i)^{-1} [O I_{d_i}] sqrt(H_i) ) kron I_n maps the
    // xi stack onto the normalized f-projections entering the functional.
    {
        std::vector<Mat> blocks;
        for (int i = 1; i <= nu; ++i) {
            const auto& gd = grams[static_cast<size_t>(i - 1)];
            const int di = dt.d[static_cast<size_t>(i - 1)];
            const int vk = dt.varkappa[static_cast<size_t>(i - 1)];
            Mat sel = Mat::Zero(di, vk);
            sel.rightCols(di) = Mat::Identity(di, di);
            blocks.push_back(gd.sqrtFinv * sel * gd.sqrtH);
        }
        ap.Ihat = kron(blkdiag(blocks), Mat::Identity(n, n));
    }

    // Boundary-coupling matrix M: d/dt of the normalized f-projections equals
    // (M kron I_n) [x; chi; xi].
    {
        ap.Mmat = Mat::Zero(dt.d_tot, 1 + nu + dt.vk_tot);
        for (int i = 1; i <= nu; ++i) {
            const size_t ix = static_cast<size_t>(i - 1);
            const auto& b = sys.basis[ix];
            const auto& gd = grams[ix];
            const auto [f_up, f_lo] = b.eval_boundary();  // f(-r_{i-1}), f(-r_i)
            const int ro = dt.scalar_f_off(i);
            const int di = dt.d[ix];
            ap.Mmat.block(ro, i - 1, di, 1) = gd.sqrtFinv * f_up;
            ap.Mmat.block(ro, i, di, 1) -= gd.sqrtFinv * f_lo;
            ap.Mmat.block(ro, dt.scalar_xi_off(i), di, dt.varkappa[ix]) -=
                gd.sqrtFinv * b.M * gd.sqrtH;
        }
    }

    {
        std::vector<Mat> blocks;
        for (int i = 1; i <= nu; ++i)
            blocks.push_back(ap.rhat[static_cast<size_t>(i - 1)] * Mat::Identity(n, n));
        ap.Lambda = blkdiag(blocks);
    }

    ap.grams = std::move(grams);
    return ap;
}

inline AugmentedPlant assemble_plant(const DelaySystem& sys, QuadTol tol = {}) {
    std::vector<GramData> grams;
    grams.reserve(sys.basis.size());
    for (const auto& b : sys.basis) grams.push_back(compute_gram(b, tol));
    return assemble_plant(sys, std::move(grams));
}

// (I_beta kron K) ⊕ O_q, the state-feedback block map theta -> input stack.
inline Mat gain_block(const DimensionTable& dt, const Mat& K) {
    if (K.rows() != dt.p || K.cols() != dt.n)
        throw DomainError("gain must be p x n");
    Mat z = Mat::Zero(dt.input_width(), dt.state_width());
    for (int b = 0; b < dt.beta; ++b) z.block(b * dt.p, b * dt.n, dt.p, dt.n) = K;
    return z;
}

// Omega = A + B1 [(I kron K) ⊕ O_q],  Sigma = C + B2 [(I kron K) ⊕ O_q].
inline std::pair<Mat, Mat> closed_loop_maps(const AugmentedPlant& ap, const Mat& K) {
    const Mat kb = gain_block(ap.dims, K);
    return {ap.A + ap.B1 * kb, ap.C + ap.B2 * kb};
}

}  // namespace ksd
