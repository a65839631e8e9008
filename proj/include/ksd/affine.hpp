#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ksd/core.hpp"

namespace ksd::affine {

// Matrix decision variables. Symmetric variables carry n(n+1)/2 free scalars
// (column-major upper triangle), rectangular ones rows*cols (column-major).
struct VarDecl {
    std::string name;
    int rows = 0, cols = 0;
    bool sym = false;
    int offset = 0;  // position of the first free scalar in the global vector
    int nfree = 0;
};

using Assignment = std::vector<Mat>;  // indexed by variable id

class VarTable {
public:
    int add_sym(std::string name, int n) {
        VarDecl d{std::move(name), n, n, true, total_, n * (n + 1) / 2};
        total_ += d.nfree;
        decls_.push_back(std::move(d));
        return static_cast<int>(decls_.size()) - 1;
    }
    int add_rect(std::string name, int r, int c) {
        VarDecl d{std::move(name), r, c, false, total_, r * c};
        total_ += d.nfree;
        decls_.push_back(std::move(d));
        return static_cast<int>(decls_.size()) - 1;
    }
    int add_scalar(std::string name) { return add_rect(std::move(name), 1, 1); }

    const VarDecl& decl(int id) const { return decls_.at(static_cast<size_t>(id)); }
    int count() const { return static_cast<int>(decls_.size()); }
    int total_free() const { return total_; }

    Assignment zero_assignment() const {
        Assignment a;
        a.reserve(decls_.size());
        for (const auto& d : decls_) a.push_back(Mat::Zero(d.rows, d.cols));
        return a;
    }

    Vec pack(const Assignment& a) const {
        Vec x = Vec::Zero(total_);
        for (size_t v = 0; v < decls_.size(); ++v) {
            const auto& d = decls_[v];
            const Mat& m = a.at(v);
            int k = d.offset;
            if (d.sym) {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i <= j; ++i) x(k++) = m(i, j);
            } else {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i < d.rows; ++i) x(k++) = m(i, j);
            }
        }
        return x;
    }

    Assignment unpack(const Vec& x) const {
        Assignment a = zero_assignment();
        for (size_t v = 0; v < decls_.size(); ++v) {
            const auto& d = decls_[v];
            Mat& m = a[v];
            int k = d.offset;
            if (d.sym) {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i <= j; ++i) {
                        m(i, j) = x(k);
                        m(j, i) = x(k);
                        ++k;
                    }
            } else {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i < d.rows; ++i) m(i, j) = x(k++);
            }
        }
        return a;
    }

private:
    std::vector<VarDecl> decls_;
    int total_ = 0;
};

// Matrix-valued expression, affine in the declared variables:
//   expr = constant + sum_t  L_t * op(X_t) * R_t,   op in {X, X'}.
class Expr {
public:
    struct Term {
        int var = -1;
        bool transposed = false;
        Mat left, right;
    };

    Expr() = default;

    static Expr zero(Eigen::Index r, Eigen::Index c) {
        Expr e;
        e.rows_ = r;
        e.cols_ = c;
        e.c_ = Mat::Zero(r, c);
        return e;
    }
    static Expr constant(Mat m) {
        Expr e;
        e.rows_ = m.rows();
        e.cols_ = m.cols();
        e.c_ = std::move(m);
        return e;
    }
    static Expr var(const VarTable& vt, int id) {
        const auto& d = vt.decl(id);
        Expr e = zero(d.rows, d.cols);
        e.terms_.push_back({id, false, Mat::Identity(d.rows, d.rows),
                            Mat::Identity(d.cols, d.cols)});
        return e;
    }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    const Mat& constant_part() const { return c_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }

    Expr lmul(const Mat& m) const {
        Expr out = zero(m.rows(), cols_);
        out.c_ = m * c_;
        for (const auto& t : terms_) out.terms_.push_back({t.var, t.transposed, m * t.left, t.right});
        return out;
    }
    Expr rmul(const Mat& m) const {
        Expr out = zero(rows_, m.cols());
        out.c_ = c_ * m;
        for (const auto& t : terms_) out.terms_.push_back({t.var, t.transposed, t.left, t.right * m});
        return out;
    }
    Expr t() const {
        Expr out = zero(cols_, rows_);
        out.c_ = c_.transpose();
        for (const auto& t : terms_)
            out.terms_.push_back({t.var, !t.transposed, t.right.transpose(), t.left.transpose()});
        return out;
    }
    Expr scaled(double s) const {
        Expr out = *this;
        out.c_ *= s;
        for (auto& t : out.terms_) t.left *= s;
        return out;
    }
    Expr operator-() const { return scaled(-1.0); }

    friend Expr operator+(Expr a, const Expr& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw DomainError("affine expression shape mismatch in +");
        a.c_ += b.c_;
        a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
        return a;
    }
    friend Expr operator-(Expr a, const Expr& b) { return std::move(a) + (-b); }

    // Sy(X) = X + X'
    Expr sym() const { return *this + this->t(); }

    Mat eval(const Assignment& a) const {
        Mat out = c_;
        for (const auto& t : terms_) {
            const Mat& x = a.at(static_cast<size_t>(t.var));
            out += t.transposed ? Mat(t.left * x.transpose() * t.right)
                                : Mat(t.left * x * t.right);
        }
        return out;
    }

    std::vector<int> vars_present() const {
        std::vector<int> ids;
        for (const auto& t : terms_)
            if (std::find(ids.begin(), ids.end(), t.var) == ids.end()) ids.push_back(t.var);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    // Invokes fn(global_param_index, coefficient_matrix) for every free scalar
    // this expression depends on. Coefficients of one scalar are merged.
    void for_each_param(const VarTable& vt,
                        const std::function<void(int, const Mat&)>& fn) const {
        std::map<int, std::vector<const Term*>> by_var;
        for (const auto& t : terms_) by_var[t.var].push_back(&t);
        for (const auto& [v, ts] : by_var) {
            const auto& d = vt.decl(v);
            int k = d.offset;
            if (d.sym) {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i <= j; ++i, ++k) {
                        Mat coeff = Mat::Zero(rows_, cols_);
                        for (const Term* t : ts) {
                            add_unit(coeff, *t, i, j);
                            if (i != j) add_unit(coeff, *t, j, i);
                        }
                        fn(k, coeff);
                    }
            } else {
                for (int j = 0; j < d.cols; ++j)
                    for (int i = 0; i < d.rows; ++i, ++k) {
                        Mat coeff = Mat::Zero(rows_, cols_);
                        for (const Term* t : ts) add_unit(coeff, *t, i, j);
                        fn(k, coeff);
                    }
            }
        }
    }

private:
    // coeff += L * E_ij * R  (or L * E_ij' * R when the term is transposed)
    static void add_unit(Mat& coeff, const Term& t, int i, int j) {
        if (t.transposed)
            coeff.noalias() += t.left.col(j) * t.right.row(i);
        else
            coeff.noalias() += t.left.col(i) * t.right.row(j);
    }

    Eigen::Index rows_ = 0, cols_ = 0;
    Mat c_;
    std::vector<Term> terms_;
};

// Embed `e` into an R x C zero expression at (r0, c0).
inline Expr place(Eigen::Index R, Eigen::Index C, Eigen::Index r0, Eigen::Index c0,
                  const Expr& e) {
    if (r0 + e.rows() > R || c0 + e.cols() > C)
        throw DomainError("affine place() out of bounds");
    Mat pr = Mat::Zero(R, e.rows());
    pr.block(r0, 0, e.rows(), e.rows()) = Mat::Identity(e.rows(), e.rows());
    Mat pc = Mat::Zero(e.cols(), C);
    pc.block(0, c0, e.cols(), e.cols()) = Mat::Identity(e.cols(), e.cols());
    return e.lmul(pr).rmul(pc);
}

inline Expr hcat(const std::vector<Expr>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows = std::max(rows, b.rows());
        cols += b.cols();
    }
    Expr out = Expr::zero(rows, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        if (b.cols() > 0) out = std::move(out) + place(rows, cols, 0, at, b);
        at += b.cols();
    }
    return out;
}

inline Expr vcat(const std::vector<Expr>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        cols = std::max(cols, b.cols());
        rows += b.rows();
    }
    Expr out = Expr::zero(rows, cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        if (b.rows() > 0) out = std::move(out) + place(rows, cols, at, 0, b);
        at += b.rows();
    }
    return out;
}

inline Expr blockdiag(const std::vector<Expr>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Expr out = Expr::zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        if (b.rows() > 0 && b.cols() > 0) out = std::move(out) + place(rows, cols, r, c, b);
        r += b.rows();
        c += b.cols();
    }
    return out;
}

// I_k kron X as a sum of k placements.
inline Expr kron_identity(int k, const Expr& x) {
    Expr out = Expr::zero(k * x.rows(), k * x.cols());
    for (int b = 0; b < k; ++b)
        out = std::move(out) + place(out.rows(), out.cols(), b * x.rows(), b * x.cols(), x);
    return out;
}

// tr(expr) as a 1x1 expression.
inline Expr trace_of(const Expr& e) {
    if (e.rows() != e.cols()) throw DomainError("trace of a non-square expression");
    Expr out = Expr::zero(1, 1);
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        Mat ri = Mat::Zero(1, e.rows());
        ri(0, i) = 1.0;
        Mat ci = Mat::Zero(e.cols(), 1);
        ci(i, 0) = 1.0;
        out = std::move(out) + e.lmul(ri).rmul(ci);
    }
    return out;
}

inline Expr scalar(double v) { return Expr::constant(Mat::Constant(1, 1, v)); }

}  // namespace ksd::affine
