#pragma once

#include <cmath>

#include "ksd/basis.hpp"
#include "ksd/linalg.hpp"
#include "ksd/quadrature.hpp"

namespace ksd {

// All integral matrices of one interval basis. With g = [phi; h] and
// h = [varphi; f]:
//   G = int g g',  H = int h h',  F = int f f',  Gamma = int phi h',
//   Phi2 = int phi phi',  E = Phi2 - Gamma H^{-1} Gamma'  (error Gram),
//   T = [Gamma sqrt(H)^{-1}; sqrt(H)]  (kappa x varkappa),
//   Ttilde = [sqrt(E); 0]              (kappa x mu).
struct GramData {
    Mat G, H, F, Gamma, Phi2, E;
    Mat sqrtH, sqrtHinv, sqrtF, sqrtFinv, sqrtE, sqrtEinv;
    Mat T, Ttilde;
    double cond_G = 1.0;
    bool ill_conditioned = false;  // cond_G above 1e12; warning, not error
};

inline std::pair<Mat, Mat> transfer_matrices(const GramData& gd) {
    const Eigen::Index mu = gd.E.rows();
    const Eigen::Index vk = gd.H.rows();
    Mat t(mu + vk, vk);
    if (mu > 0) t.topRows(mu) = gd.Gamma * gd.sqrtHinv;
    t.bottomRows(vk) = gd.sqrtH;
    Mat ttilde = Mat::Zero(mu + vk, mu);
    if (mu > 0) ttilde.topRows(mu) = gd.sqrtE;
    return {std::move(t), std::move(ttilde)};
}

inline GramData compute_gram(const IntervalBasis& b, QuadTol tol = {}) {
    if (!(tol.rel > 0.0 && tol.rel <= 1e-6))
        throw DomainError("quadrature relative tolerance must lie in (0, 1e-6]");
    const int mu = b.mu(), vk = b.varkappa();
    const double len = b.length();
    const int pre = std::max(1, static_cast<int>(std::ceil(b.max_frequency() * len / M_PI)));

    GramData gd;
    gd.G = integrate([&b](double tau) { const Vec g = b.eval_g(tau); return Mat(g * g.transpose()); },
                     b.lo, b.hi, tol, pre);
    gd.G = 0.5 * (gd.G + gd.G.transpose());

    {
        Eigen::SelfAdjointEigenSolver<Mat> es(gd.G, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = es.eigenvalues().maxCoeff();
        if (!(lmin > 1e-12 * lmax))
            throw NumericalError("basis linearly dependent: Gram matrix G is singular "
                                 "(min eigenvalue " + std::to_string(lmin) + ")");
        gd.cond_G = lmax / lmin;
        gd.ill_conditioned = gd.cond_G > 1e12;
    }

    gd.H = gd.G.bottomRightCorner(vk, vk);
    gd.F = gd.G.bottomRightCorner(b.d(), b.d());
    gd.Gamma = gd.G.topRightCorner(mu, vk);
    gd.Phi2 = gd.G.topLeftCorner(mu, mu);

    if (mu > 0) {
        gd.E = gd.Phi2 - gd.Gamma * gd.H.llt().solve(gd.Gamma.transpose());
        gd.E = 0.5 * (gd.E + gd.E.transpose());
        const double scale = std::max(eig_max(gd.Phi2), 1.0);
        if (!(eig_min(gd.E) > 1e-12 * scale))
            throw NumericalError(
                "approximated functions lie in span(h): error Gram E is singular; "
                "move them from phi to varphi or f");
    } else {
        gd.E = Mat(0, 0);
    }

    auto rh = spd_sqrt(gd.H, "Gram matrix H");
    gd.sqrtH = rh.sqrt;
    gd.sqrtHinv = rh.inv_sqrt;
    auto rf = spd_sqrt(gd.F, "Gram matrix F");
    gd.sqrtF = rf.sqrt;
    gd.sqrtFinv = rf.inv_sqrt;
    if (mu > 0) {
        auto re = spd_sqrt(gd.E, "error Gram E");
        gd.sqrtE = re.sqrt;
        gd.sqrtEinv = re.inv_sqrt;
    } else {
        gd.sqrtE = Mat(0, 0);
        gd.sqrtEinv = Mat(0, 0);
    }

    std::tie(gd.T, gd.Ttilde) = transfer_matrices(gd);
    return gd;
}

// Least-squares residual eps(tau) = phi(tau) - Gamma H^{-1} h(tau).
inline Vec projection_error_at(const GramData& gd, const IntervalBasis& b, double tau) {
    if (b.mu() == 0) return Vec(0);
    Vec phi(b.mu());
    b.check_tau(tau);
    for (int j = 0; j < b.mu(); ++j) phi(j) = b.phi[j](tau);
    return phi - gd.Gamma * gd.H.llt().solve(Mat(b.eval_h(tau)));
}

}  // namespace ksd
