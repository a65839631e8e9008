#pragma once

#include "ksd/sdp.hpp"

// C ABI of the bundled conic solver (solver/src/lib.rs).
extern "C" int ksd_conic_solve(long nvar, long nrow, const double* q, const long* a_colptr,
                               const long* a_rowidx, const double* a_values, const double* b,
                               const long* cone_kinds, const long* cone_dims, long ncones,
                               int verbose, long max_iter, double tol, double* x_out,
                               double* obj_out, long* iters_out);

namespace ksd {

inline SdpSolution solve_clarabel(const SdpProblem& p, const SolverOptions& opts) {
    const auto cd = sdp_detail::lower(p);
    SdpSolution sol;
    std::vector<double> x(static_cast<size_t>(cd.nvar), 0.0);
    double obj = 0.0;
    long iters = 0;
    const int status = ksd_conic_solve(
        cd.nvar, cd.nrow, cd.q.data(), cd.colptr.data(), cd.rowidx.data(), cd.values.data(),
        cd.b.data(), cd.cone_kinds.data(), cd.cone_dims.data(),
        static_cast<long>(cd.cone_kinds.size()), opts.verbose ? 1 : 0, opts.max_iter, opts.tol,
        x.data(), &obj, &iters);

    sol.diag.iterations = iters;
    sol.values = p.vars.unpack(Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())));
    sol.objective = obj + cd.obj_constant;
    switch (status) {
        case 0:
            sol.status = SolveStatus::Optimal;
            break;
        case 3:
            sol.status = SolveStatus::Optimal;
            sol.diag.message = "solver reported reduced accuracy";
            break;
        case 1:
            sol.status = SolveStatus::Infeasible;
            sol.diag.message = "primal infeasible";
            break;
        case 2:
            sol.status = SolveStatus::NumericalFailure;
            sol.diag.message = "dual infeasible (objective unbounded below)";
            break;
        case 4:
            sol.status = SolveStatus::NumericalFailure;
            sol.diag.message = "iteration limit reached";
            break;
        default:
            sol.status = SolveStatus::NumericalFailure;
            sol.diag.message = "solver rejected the problem (code " + std::to_string(status) + ")";
            break;
    }
    return sol;
}

}  // namespace ksd
