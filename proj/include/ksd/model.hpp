#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksd/basis.hpp"
#include "ksd/core.hpp"
#include "ksd/linalg.hpp"

namespace ksd {

struct Dimensions {
    int n = 0;   // state
    int m = 0;   // regulated output
    int p = 0;   // control input
    int q = 0;   // disturbance
    int nu = 0;  // number of delays
};

// Strictly increasing positive delay values r_1 < ... < r_nu; r_0 = 0.
struct DelayLadder {
    std::vector<double> r;

    int nu() const { return static_cast<int>(r.size()); }
    double r_max() const { return r.empty() ? 0.0 : r.back(); }
    double at(int i) const { return i == 0 ? 0.0 : r.at(static_cast<size_t>(i) - 1); }
    double rhat(int i) const { return at(i) - at(i - 1); }  // interval length, i in 1..nu
    // Interval I_i = [-r_i, -r_{i-1}]
    std::pair<double, double> interval(int i) const { return {-at(i), -at(i - 1)}; }
};

// One term of a distributed-delay kernel: coefficient * g[basis_index](tau).
struct KernelTerm {
    int basis_index = 0;
    Mat coefficient;
};

// The four kernels on one interval, each a sum of KernelTerms over the
// interval's g ordering.
struct DdKernels {
    std::vector<KernelTerm> A;      // n x n
    std::vector<KernelTerm> B;      // n x p
    std::vector<KernelTerm> C;      // m x n
    std::vector<KernelTerm> Bfrak;  // m x p
};

enum class SupplyMode { L2GainMin, Explicit };

// Quadratic supply rate s(z, w) = [z; w]' [J~' J1^{-1} J~, J2; *, J3] [z; w].
// In L2GainMin mode the matrices are left empty and gamma is a decision
// variable of the synthesis layer.
struct SupplyRate {
    SupplyMode mode = SupplyMode::Explicit;
    Mat J1, Jtilde, J2, J3;
};

inline SupplyRate make_supply_rate_l2gain(double gamma, int m, int q) {
    if (!(gamma > 0.0)) throw DomainError("l2-gain supply rate needs gamma > 0");
    SupplyRate s;
    s.mode = SupplyMode::Explicit;
    s.J1 = -gamma * Mat::Identity(m, m);
    s.Jtilde = Mat::Identity(m, m);
    s.J2 = Mat::Zero(m, q);
    s.J3 = gamma * Mat::Identity(q, q);
    return s;
}

inline SupplyRate make_supply_rate_passivity(int m, int q, double epsilon) {
    if (m != q) throw DomainError("passivity pairs output with disturbance of equal dimension");
    if (!(epsilon > 0.0)) throw DomainError("passivity stand-in needs epsilon > 0");
    SupplyRate s;
    s.mode = SupplyMode::Explicit;
    s.J1 = -epsilon * Mat::Identity(m, m);
    s.Jtilde = Mat::Zero(m, m);
    s.J2 = Mat::Identity(m, m);
    s.J3 = Mat::Zero(m, m);
    return s;
}

// The open-loop plant: pointwise matrices A_i, B_i, C_i, Bfrak_i (i = 0..nu),
// disturbance paths D1, D2, and per-interval distributed-delay kernels
// expressed over declared basis families.
struct DelaySystem {
    Dimensions dims;
    DelayLadder delays;
    std::vector<Mat> A, B, C, Bfrak;  // nu+1 matrices each
    Mat D1, D2;
    std::vector<IntervalBasis> basis;     // per interval, size nu
    std::vector<DdKernels> dd_kernels;    // per interval, size nu
    SupplyRate supply;

    enum class Kernel { A, B, C, Bfrak };

    // Evaluate one distributed-delay kernel at tau in interval i (1-based).
    Mat eval_kernel(Kernel which, int i, double tau) const {
        const IntervalBasis& b = basis.at(static_cast<size_t>(i) - 1);
        const DdKernels& k = dd_kernels.at(static_cast<size_t>(i) - 1);
        const std::vector<KernelTerm>* terms = nullptr;
        Eigen::Index rows = dims.n, cols = dims.n;
        switch (which) {
            case Kernel::A: terms = &k.A; break;
            case Kernel::B: terms = &k.B; cols = dims.p; break;
            case Kernel::C: terms = &k.C; rows = dims.m; break;
            case Kernel::Bfrak: terms = &k.Bfrak; rows = dims.m; cols = dims.p; break;
        }
        const Vec g = b.eval_g(tau);
        Mat out = Mat::Zero(rows, cols);
        for (const auto& t : *terms) out += g(t.basis_index) * t.coefficient;
        return out;
    }
};

struct Violation {
    std::string code;
    std::string detail;
};

namespace detail {

inline void check_matrix_list(const std::vector<Mat>& ms, int nu, Eigen::Index rows,
                              Eigen::Index cols, const std::string& name,
                              std::vector<Violation>& out) {
    if (static_cast<int>(ms.size()) != nu + 1) {
        out.push_back({name + "_count", name + " must hold nu+1 matrices, got " +
                                            std::to_string(ms.size())});
        return;
    }
    for (size_t i = 0; i < ms.size(); ++i)
        if (ms[i].rows() != rows || ms[i].cols() != cols)
            out.push_back({name + "_" + std::to_string(i) + "_dimension_mismatch",
                           name + "_" + std::to_string(i) + " must be " + std::to_string(rows) +
                               "x" + std::to_string(cols)});
}

inline void check_kernel_terms(const std::vector<KernelTerm>& terms, int kappa,
                               Eigen::Index rows, Eigen::Index cols, const std::string& name,
                               std::vector<Violation>& out) {
    for (const auto& t : terms) {
        if (t.basis_index < 0 || t.basis_index >= kappa)
            out.push_back({name + "_basis_index",
                           name + " references basis index " + std::to_string(t.basis_index) +
                               " outside [0, " + std::to_string(kappa) + ")"});
        if (t.coefficient.rows() != rows || t.coefficient.cols() != cols)
            out.push_back({name + "_coefficient_dimension",
                           name + " coefficient must be " + std::to_string(rows) + "x" +
                               std::to_string(cols)});
    }
}

}  // namespace detail

// Structural validation. Violations are data, not exceptions: the list is
// empty iff the system conforms to the model contract.
inline std::vector<Violation> validate_system(const DelaySystem& sys) {
    std::vector<Violation> out;
    const auto& d = sys.dims;
    if (d.n <= 0) out.push_back({"n_nonpositive", "state dimension must be positive"});
    if (d.m <= 0) out.push_back({"m_nonpositive", "output dimension must be positive"});
    if (d.p <= 0) out.push_back({"p_nonpositive", "input dimension must be positive"});
    if (d.q <= 0) out.push_back({"q_nonpositive", "disturbance dimension must be positive"});
    if (d.nu < 1) out.push_back({"nu_nonpositive", "at least one delay is required"});
    if (!out.empty()) return out;

    if (static_cast<int>(sys.delays.r.size()) != d.nu)
        out.push_back({"delay_count", "expected nu delay values"});
    double prev = 0.0;
    for (size_t i = 0; i < sys.delays.r.size(); ++i) {
        if (!(sys.delays.r[i] > prev)) {
            out.push_back({"delays_not_strictly_increasing",
                           "delays must satisfy 0 < r_1 < ... < r_nu"});
            break;
        }
        prev = sys.delays.r[i];
    }

    detail::check_matrix_list(sys.A, d.nu, d.n, d.n, "A", out);
    detail::check_matrix_list(sys.B, d.nu, d.n, d.p, "B", out);
    detail::check_matrix_list(sys.C, d.nu, d.m, d.n, "C", out);
    detail::check_matrix_list(sys.Bfrak, d.nu, d.m, d.p, "Bfrak", out);
    if (sys.D1.rows() != d.n || sys.D1.cols() != d.q)
        out.push_back({"D1_dimension_mismatch", "D1 must be n x q"});
    if (sys.D2.rows() != d.m || sys.D2.cols() != d.q)
        out.push_back({"D2_dimension_mismatch", "D2 must be m x q"});

    if (static_cast<int>(sys.basis.size()) != d.nu)
        out.push_back({"basis_count", "one basis family per delay interval required"});
    if (static_cast<int>(sys.dd_kernels.size()) != d.nu)
        out.push_back({"dd_kernel_count", "one kernel set per delay interval required"});

    const int nint = std::min({static_cast<int>(sys.basis.size()),
                               static_cast<int>(sys.dd_kernels.size()), d.nu});
    for (int i = 0; i < nint; ++i) {
        const auto& b = sys.basis[static_cast<size_t>(i)];
        if (b.d() < 1)
            out.push_back({"basis_f_empty",
                           "interval " + std::to_string(i + 1) + ": f must be nonempty"});
        if (i + 1 <= sys.delays.nu()) {
            const auto [lo, hi] = sys.delays.interval(i + 1);
            if (std::abs(b.lo - lo) > 1e-12 || std::abs(b.hi - hi) > 1e-12)
                out.push_back({"basis_interval_mismatch",
                               "interval " + std::to_string(i + 1) +
                                   ": basis interval does not match the delay ladder"});
        }
        const auto& k = sys.dd_kernels[static_cast<size_t>(i)];
        const std::string tag = "interval" + std::to_string(i + 1);
        detail::check_kernel_terms(k.A, b.kappa(), d.n, d.n, tag + "_Atilde", out);
        detail::check_kernel_terms(k.B, b.kappa(), d.n, d.p, tag + "_Btilde", out);
        detail::check_kernel_terms(k.C, b.kappa(), d.m, d.n, tag + "_Ctilde", out);
        detail::check_kernel_terms(k.Bfrak, b.kappa(), d.m, d.p, tag + "_Bfraktilde", out);
    }

    if (sys.supply.mode == SupplyMode::Explicit) {
        const auto& s = sys.supply;
        if (s.J1.rows() != d.m || s.J1.cols() != d.m)
            out.push_back({"J1_dimension_mismatch", "J1 must be m x m"});
        else if (sym_defect(s.J1) > 1e-10)
            out.push_back({"J1_not_symmetric", "J1 must be symmetric"});
        else if (eig_max(s.J1) >= 0.0)
            out.push_back({"J1_not_negative_definite", "J1 must be negative definite"});
        if (s.Jtilde.rows() != d.m || s.Jtilde.cols() != d.m)
            out.push_back({"Jtilde_dimension_mismatch", "Jtilde must be m x m"});
        if (s.J2.rows() != d.m || s.J2.cols() != d.q)
            out.push_back({"J2_dimension_mismatch", "J2 must be m x q"});
        if (s.J3.rows() != d.q || s.J3.cols() != d.q)
            out.push_back({"J3_dimension_mismatch", "J3 must be q x q"});
        else if (sym_defect(s.J3) > 1e-10)
            out.push_back({"J3_not_symmetric", "J3 must be symmetric"});
    }
    return out;
}

}  // namespace ksd
