#pragma once

#include <vector>

#include "ksd/core.hpp"

namespace ksd {

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Sy(X) = X + X^T
inline Mat sy(const Mat& x) { return x + x.transpose(); }

inline double sym_defect(const Mat& x) {
    return (x - x.transpose()).cwiseAbs().maxCoeff();
}

inline Mat hstack(const std::vector<Mat>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        cols += b.cols();
        if (b.cols() > 0 || b.rows() > rows) rows = std::max(rows, b.rows());
    }
    Mat out = Mat::Zero(rows, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        if (b.size() > 0) out.block(0, at, b.rows(), b.cols()) = b;
        at += b.cols();
    }
    return out;
}

inline Mat vstack(const std::vector<Mat>& blocks) {
    std::vector<Mat> t;
    t.reserve(blocks.size());
    for (const auto& b : blocks) t.push_back(b.transpose());
    return hstack(t).transpose();
}

inline Mat blkdiag(const std::vector<Mat>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) { rows += b.rows(); cols += b.cols(); }
    Mat out = Mat::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        if (b.size() > 0) out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

inline double eig_min(const Mat& sym) {
    if (sym.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double eig_max(const Mat& sym) {
    if (sym.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

struct SpdRoot {
    Mat sqrt;
    Mat inv_sqrt;
    double cond;  // lambda_max / lambda_min
};

// Symmetric square root by eigendecomposition. Requires strict positive
// definiteness: lambda_min > 1e-12 * lambda_max.
inline SpdRoot spd_sqrt(const Mat& x, const std::string& what = "matrix") {
    if (x.rows() == 0) return {Mat(0, 0), Mat(0, 0), 1.0};
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    const Vec lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (!(lam.minCoeff() > 1e-12 * std::max(lmax, 0.0)))
        throw NumericalError(what + " is not positive definite (min eigenvalue " +
                             std::to_string(lam.minCoeff()) + ")");
    const Vec s = lam.cwiseSqrt();
    SpdRoot out;
    out.sqrt = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
    out.inv_sqrt = es.eigenvectors() * s.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    out.cond = lmax / lam.minCoeff();
    return out;
}

// PSD square root: eigenvalues in (-1e-12*lambda_max, 0] are clamped to zero.
inline Mat psd_sqrt(const Mat& x, const std::string& what = "matrix") {
    if (x.rows() == 0) return Mat(0, 0);
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    Vec lam = es.eigenvalues();
    const double lmax = std::max(lam.maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) <= 0.0) {
            if (lam(i) < -1e-12 * lmax)
                throw NumericalError(what + " is not positive semidefinite");
            lam(i) = 0.0;
        }
    }
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace ksd
