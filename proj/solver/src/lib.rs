//! C ABI around the Clarabel conic solver, specialized to the problem shape
//! produced by the C++ layer: minimize q'x subject to b - Ax in K, where K is
//! a product of zero, nonnegative and PSD-triangle cones. A is handed over in
//! compressed sparse column form.

use clarabel::algebra::CscMatrix;
use clarabel::solver::*;

pub const KSD_CONE_ZERO: i64 = 0;
pub const KSD_CONE_NONNEG: i64 = 1;
pub const KSD_CONE_PSD: i64 = 2;

/// Status codes mirrored on the C++ side.
/// 0 solved, 1 primal infeasible, 2 dual infeasible (unbounded),
/// 3 almost solved, 4 iteration/time limit, 5 numerical error, 6 bad input.
#[no_mangle]
pub unsafe extern "C" fn ksd_conic_solve(
    nvar: i64,
    nrow: i64,
    q: *const f64,
    a_colptr: *const i64,
    a_rowidx: *const i64,
    a_values: *const f64,
    b: *const f64,
    cone_kinds: *const i64,
    cone_dims: *const i64,
    ncones: i64,
    verbose: i32,
    max_iter: i64,
    tol: f64,
    x_out: *mut f64,
    obj_out: *mut f64,
    iters_out: *mut i64,
) -> i32 {
    if nvar <= 0 || nrow < 0 || ncones < 0 {
        return 6;
    }
    let n = nvar as usize;
    let m = nrow as usize;

    let q = std::slice::from_raw_parts(q, n).to_vec();
    let colptr: Vec<usize> = std::slice::from_raw_parts(a_colptr, n + 1)
        .iter()
        .map(|&v| v as usize)
        .collect();
    let nnz = colptr[n];
    let rowidx: Vec<usize> = std::slice::from_raw_parts(a_rowidx, nnz)
        .iter()
        .map(|&v| v as usize)
        .collect();
    let values = std::slice::from_raw_parts(a_values, nnz).to_vec();
    let b = std::slice::from_raw_parts(b, m).to_vec();

    let kinds = std::slice::from_raw_parts(cone_kinds, ncones as usize);
    let dims = std::slice::from_raw_parts(cone_dims, ncones as usize);
    let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(ncones as usize);
    for (&k, &d) in kinds.iter().zip(dims.iter()) {
        let d = d as usize;
        match k {
            KSD_CONE_ZERO => cones.push(ZeroConeT(d)),
            KSD_CONE_NONNEG => cones.push(NonnegativeConeT(d)),
            KSD_CONE_PSD => cones.push(PSDTriangleConeT(d)),
            _ => return 6,
        }
    }

    let p = CscMatrix::<f64>::zeros((n, n));
    let a = CscMatrix::new(m, n, colptr, rowidx, values);

    let settings = DefaultSettingsBuilder::default()
        .verbose(verbose != 0)
        .max_iter(max_iter.max(1) as u32)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .tol_feas(tol)
        .build()
        .unwrap();

    let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
        Ok(s) => s,
        Err(_) => return 6,
    };
    solver.solve();

    let sol = &solver.solution;
    let xs = std::slice::from_raw_parts_mut(x_out, n);
    xs.copy_from_slice(&sol.x);
    *obj_out = sol.obj_val;
    *iters_out = sol.iterations as i64;

    match sol.status {
        SolverStatus::Solved => 0,
        SolverStatus::PrimalInfeasible => 1,
        SolverStatus::DualInfeasible => 2,
        SolverStatus::AlmostSolved => 3,
        SolverStatus::AlmostPrimalInfeasible => 1,
        SolverStatus::AlmostDualInfeasible => 2,
        SolverStatus::MaxIterations | SolverStatus::MaxTime => 4,
        _ => 5,
    }
}
