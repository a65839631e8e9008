#pragma once

#include <chrono>
#include <cstdlib>
#include <ostream>

#include "ksd/lmi.hpp"

namespace ksd {

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

struct SolverOptions {
    std::string backend = "clarabel";
    double tol = 1e-9;
    int max_iter = 200;
    bool verbose = false;
    double post_check_tol = 1e-7;
};

// Backend selection honours KSD_SOLVER / KSD_SOLVER_TOL when set.
inline SolverOptions default_solver_options() {
    SolverOptions o;
    if (const char* s = std::getenv("KSD_SOLVER")) o.backend = s;
    if (const char* t = std::getenv("KSD_SOLVER_TOL")) o.tol = std::atof(t);
    return o;
}

struct SdpSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    affine::Assignment values;
    double objective = std::numeric_limits<double>::quiet_NaN();
    struct Diagnostics {
        long iterations = 0;
        double solve_seconds = 0.0;
        std::string message;
        bool post_verified = false;
        double worst_residual = 0.0;  // most negative eigenvalue over all blocks
    } diag;
};

// A conic program over matrix variables: minimize an affine scalar subject to
// affine LMI blocks and scalar nonnegativity rows.
struct SdpProblem {
    affine::VarTable vars;
    std::vector<lmi::AffineLMI> lmis;
    std::vector<affine::Expr> nonneg;  // 1x1 expressions constrained >= 0
    affine::Expr objective = affine::scalar(0.0);

    void add(lmi::AffineLMI l) { lmis.push_back(std::move(l)); }
    void add_nonneg(affine::Expr e) {
        if (e.rows() != 1 || e.cols() != 1) throw DomainError("nonneg row must be scalar");
        nonneg.push_back(std::move(e));
    }
    void minimize(affine::Expr e) {
        if (e.rows() != 1 || e.cols() != 1) throw DomainError("objective must be scalar");
        objective = std::move(e);
    }
};

namespace sdp_detail {

inline constexpr double kSqrt2 = 1.4142135623730951;

// Scaled upper-triangle vectorization (column-major), the PSD-cone layout of
// the backend: off-diagonal entries carry a factor sqrt(2).
inline void svec_into(const Mat& m, std::vector<std::pair<long, double>>& out, long row0) {
    long k = row0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i, ++k) {
            const double v = (i == j) ? m(i, j) : 0.5 * (m(i, j) + m(j, i)) * kSqrt2;
            if (v != 0.0) out.emplace_back(k, v);
        }
}

struct ConicData {
    long nvar = 0, nrow = 0;
    std::vector<double> q;
    std::vector<long> colptr, rowidx;
    std::vector<double> values;
    std::vector<double> b;
    std::vector<long> cone_kinds, cone_dims;  // 1 = nonneg, 2 = psd-triangle
    double obj_constant = 0.0;
};

inline ConicData lower(const SdpProblem& p) {
    ConicData cd;
    cd.nvar = p.vars.total_free();

    long nrow = static_cast<long>(p.nonneg.size());
    if (!p.nonneg.empty()) {
        cd.cone_kinds.push_back(1);
        cd.cone_dims.push_back(static_cast<long>(p.nonneg.size()));
    }
    std::vector<long> lmi_row0;
    for (const auto& l : p.lmis) {
        const long n = l.expr.rows();
        lmi_row0.push_back(nrow);
        cd.cone_kinds.push_back(2);
        cd.cone_dims.push_back(n);
        nrow += n * (n + 1) / 2;
    }
    cd.nrow = nrow;

    // b = svec of the constant parts (value at x = 0)
    cd.b.assign(static_cast<size_t>(nrow), 0.0);
    for (size_t i = 0; i < p.nonneg.size(); ++i)
        cd.b[i] = p.nonneg[i].constant_part()(0, 0);
    for (size_t li = 0; li < p.lmis.size(); ++li) {
        std::vector<std::pair<long, double>> entries;
        svec_into(p.lmis[li].normalized().constant_part(), entries, lmi_row0[li]);
        for (const auto& [r, v] : entries) cd.b[static_cast<size_t>(r)] = v;
    }

    // Columns of A: -svec of each parameter's coefficient block.
    std::vector<std::vector<std::pair<long, double>>> cols(static_cast<size_t>(cd.nvar));
    for (size_t i = 0; i < p.nonneg.size(); ++i) {
        p.nonneg[i].for_each_param(p.vars, [&](int k, const Mat& c) {
            if (c(0, 0) != 0.0) cols[static_cast<size_t>(k)].emplace_back(static_cast<long>(i), -c(0, 0));
        });
    }
    for (size_t li = 0; li < p.lmis.size(); ++li) {
        const long r0 = lmi_row0[li];
        p.lmis[li].normalized().for_each_param(p.vars, [&](int k, const Mat& c) {
            std::vector<std::pair<long, double>> entries;
            svec_into(c, entries, r0);
            for (auto& [r, v] : entries) cols[static_cast<size_t>(k)].emplace_back(r, -v);
        });
    }

    cd.q.assign(static_cast<size_t>(cd.nvar), 0.0);
    p.objective.for_each_param(p.vars, [&](int k, const Mat& c) {
        cd.q[static_cast<size_t>(k)] += c(0, 0);
    });
    cd.obj_constant = p.objective.constant_part()(0, 0);

    cd.colptr.assign(static_cast<size_t>(cd.nvar) + 1, 0);
    for (long k = 0; k < cd.nvar; ++k) {
        auto& col = cols[static_cast<size_t>(k)];
        std::sort(col.begin(), col.end());
        // merge duplicate rows (several terms can hit one entry)
        std::vector<std::pair<long, double>> merged;
        for (const auto& [r, v] : col) {
            if (!merged.empty() && merged.back().first == r)
                merged.back().second += v;
            else
                merged.emplace_back(r, v);
        }
        for (const auto& [r, v] : merged) {
            if (v == 0.0) continue;
            cd.rowidx.push_back(r);
            cd.values.push_back(v);
        }
        cd.colptr[static_cast<size_t>(k) + 1] = static_cast<long>(cd.rowidx.size());
    }
    return cd;
}

}  // namespace sdp_detail

SdpSolution solve_clarabel(const SdpProblem& p, const SolverOptions& opts);

// Independent of the backend's own report: re-evaluate every constraint at
// the returned point and downgrade to numerical_failure when any block dips
// below the -tol*(1+norm) margin.
inline bool post_verify(const SdpProblem& p, SdpSolution& sol, double tol) {
    double worst = 0.0;
    bool ok = true;
    for (const auto& l : p.lmis) {
        const Mat m = l.normalized().eval(sol.values);
        const double lam = eig_min(0.5 * (m + m.transpose()));
        const double scale = 1.0 + (m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
        worst = std::min(worst, lam);
        if (lam < -tol * scale) {
            ok = false;
            sol.diag.message = "post-verification failed on " + l.name +
                               " (min eigenvalue " + std::to_string(lam) + ")";
        }
    }
    for (const auto& e : p.nonneg) {
        const double v = e.eval(sol.values)(0, 0);
        worst = std::min(worst, v);
        if (v < -tol * (1.0 + std::abs(e.constant_part()(0, 0)))) {
            ok = false;
            sol.diag.message = "post-verification failed on a scalar inequality";
        }
    }
    sol.diag.worst_residual = worst;
    sol.diag.post_verified = ok;
    return ok;
}

inline SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = default_solver_options()) {
    if (opts.backend != "clarabel")
        throw EnvironmentError("unknown solver backend \"" + opts.backend + "\"");
    const auto t0 = std::chrono::steady_clock::now();
    SdpSolution sol = solve_clarabel(p, opts);
    sol.diag.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sol.status == SolveStatus::Optimal && !post_verify(p, sol, opts.post_check_tol))
        sol.status = SolveStatus::NumericalFailure;
    return sol;
}

// Sparse SDPA (.dat-s) export for cross-checking with external solvers:
//   min c'x  s.t.  sum_i x_i F_i - F_0  psd (block diagonal).
inline void write_sdpa(const SdpProblem& p, std::ostream& os) {
    const long nvar = p.vars.total_free();
    os << nvar << " = mdim\n";
    const long nblocks = static_cast<long>(p.lmis.size()) + (p.nonneg.empty() ? 0 : 1);
    os << nblocks << " = nblocks\n";
    for (const auto& l : p.lmis) os << l.expr.rows() << " ";
    if (!p.nonneg.empty()) os << "-" << p.nonneg.size();
    os << "\n";

    std::vector<double> c(static_cast<size_t>(nvar), 0.0);
    p.objective.for_each_param(p.vars, [&](int k, const Mat& m) { c[static_cast<size_t>(k)] += m(0, 0); });
    for (long k = 0; k < nvar; ++k) os << c[static_cast<size_t>(k)] << (k + 1 < nvar ? " " : "");
    os << "\n";

    os.precision(17);
    auto emit_block = [&os](int matno, int blkno, const Mat& m, double sign) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = i; j < m.cols(); ++j) {
                const double v = sign * 0.5 * (m(i, j) + m(j, i));
                if (v != 0.0)
                    os << matno << " " << blkno << " " << (i + 1) << " " << (j + 1) << " " << v
                       << "\n";
            }
    };
    for (size_t li = 0; li < p.lmis.size(); ++li) {
        const auto norm = p.lmis[li].normalized();
        emit_block(0, static_cast<int>(li) + 1, norm.constant_part(), -1.0);  // F0 = -const
        norm.for_each_param(p.vars, [&](int k, const Mat& mk) {
            emit_block(k + 1, static_cast<int>(li) + 1, mk, 1.0);
        });
    }
    if (!p.nonneg.empty()) {
        const int blk = static_cast<int>(p.lmis.size()) + 1;
        for (size_t i = 0; i < p.nonneg.size(); ++i) {
            const double c0 = p.nonneg[i].constant_part()(0, 0);
            if (c0 != 0.0)
                os << 0 << " " << blk << " " << (i + 1) << " " << (i + 1) << " " << -c0 << "\n";
            p.nonneg[i].for_each_param(p.vars, [&](int k, const Mat& mk) {
                if (mk(0, 0) != 0.0)
                    os << (k + 1) << " " << blk << " " << (i + 1) << " " << (i + 1) << " "
                       << mk(0, 0) << "\n";
            });
        }
    }
}

}  // namespace ksd

#include "ksd/solver_clarabel.hpp"  // default backend definition
