//! Primal active-set method for convex quadratic programs.
//!
//! Equality-constrained subproblems are solved through a dense KKT
//! factorization. Constraint rows are normalized to unit infinity norm
//! before solving; multipliers are rescaled on the way out. Entering and
//! leaving constraints follow a smallest-index rule so that degenerate
//! vertices cannot cycle.

use ndarray::{s, Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::{self, Lu};
use crate::qp::problem::{kkt_residuals, QpProblem, QpSolution, QpStatus};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Absolute feasibility tolerance.
    pub feas_tol: f64,
    /// KKT residual tolerance for the optimality certificate.
    pub kkt_tol: f64,
    /// Iteration cap factor: max_iter = factor * (p + total constraints).
    pub max_iter_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { feas_tol: 1e-9, kkt_tol: 1e-6, max_iter_factor: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    /// Row i of the problem's A matrix.
    General(usize),
    /// Lower bound on coordinate j, written -x_j <= -lb_j.
    Lower(usize),
    /// Upper bound on coordinate j, written x_j <= ub_j.
    Upper(usize),
}

struct IneqRow {
    coeffs: Array1<f64>,
    rhs: f64,
    scale: f64,
    kind: RowKind,
}

/// Scaled internal form: independent equality rows plus a flat list of
/// inequality rows (general rows first, then finite bounds).
struct Internal {
    p: usize,
    eq_rows: Array2<f64>,
    eq_rhs: Array1<f64>,
    eq_orig: Vec<usize>,
    eq_scale: Vec<f64>,
    ineqs: Vec<IneqRow>,
}

fn build_internal(prob: &QpProblem, opts: &SolverOptions) -> Result<Internal> {
    let p = prob.p();

    // Scale equality rows, drop zero rows, reject inconsistent ones.
    let mut rows: Vec<(Array1<f64>, f64, usize, f64)> = Vec::new();
    for (i, row) in prob.aeq.rows().into_iter().enumerate() {
        let scale = linalg::norm_inf(&row);
        if scale == 0.0 {
            if prob.beq[i].abs() > opts.feas_tol {
                return Err(Error::Infeasible(format!(
                    ": zero equality row {i} with nonzero rhs {}",
                    prob.beq[i]
                )));
            }
            continue;
        }
        rows.push((row.mapv(|v| v / scale), prob.beq[i] / scale, i, scale));
    }
    let m = rows.len();
    let mut scaled = Array2::zeros((m, p));
    for (r, (row, _, _, _)) in rows.iter().enumerate() {
        scaled.row_mut(r).assign(row);
    }
    let keep = linalg::independent_rows(&scaled.view(), 1e-10);

    let mut eq_rows = Array2::zeros((keep.len(), p));
    let mut eq_rhs = Array1::zeros(keep.len());
    let mut eq_orig = Vec::with_capacity(keep.len());
    let mut eq_scale = Vec::with_capacity(keep.len());
    for (r, &idx) in keep.iter().enumerate() {
        eq_rows.row_mut(r).assign(&rows[idx].0);
        eq_rhs[r] = rows[idx].1;
        eq_orig.push(rows[idx].2);
        eq_scale.push(rows[idx].3);
    }

    // Dropped dependent rows must be consistent with the kept ones.
    if keep.len() < m && !keep.is_empty() {
        let gram = eq_rows.dot(&eq_rows.t());
        let lu = Lu::factor(&gram.view())
            .map_err(|_| Error::Singular("equality Gram matrix".into()))?;
        for (idx, (row, rhs, orig, _)) in rows.iter().enumerate() {
            if keep.contains(&idx) {
                continue;
            }
            let proj = lu.solve(&eq_rows.dot(row).view());
            let implied_rhs = eq_rhs.dot(&proj);
            if (rhs - implied_rhs).abs() > 1e-8 * (1.0 + rhs.abs()) {
                return Err(Error::Infeasible(format!(
                    ": equality row {orig} is dependent but inconsistent"
                )));
            }
        }
    }

    let mut ineqs = Vec::new();
    for (i, row) in prob.a.rows().into_iter().enumerate() {
        let scale = linalg::norm_inf(&row);
        if scale == 0.0 {
            if prob.b[i] < -opts.feas_tol {
                return Err(Error::Infeasible(format!(
                    ": zero inequality row {i} with negative rhs {}",
                    prob.b[i]
                )));
            }
            continue;
        }
        ineqs.push(IneqRow {
            coeffs: row.mapv(|v| v / scale),
            rhs: prob.b[i] / scale,
            scale,
            kind: RowKind::General(i),
        });
    }
    for j in 0..p {
        if prob.lb[j].is_finite() {
            let mut c = Array1::zeros(p);
            c[j] = -1.0;
            ineqs.push(IneqRow { coeffs: c, rhs: -prob.lb[j], scale: 1.0, kind: RowKind::Lower(j) });
        }
        if prob.ub[j].is_finite() {
            let mut c = Array1::zeros(p);
            c[j] = 1.0;
            ineqs.push(IneqRow { coeffs: c, rhs: prob.ub[j], scale: 1.0, kind: RowKind::Upper(j) });
        }
    }

    // Deterministic anti-degeneracy shift: distinct tiny slacks keep
    // many inequality boundaries from meeting at one point, which is
    // what lets the active-set exchange cycle at degenerate vertices.
    // Rows have unit inf-norm, so each shift is at most 1e-10 absolute -
    // below the feasibility tolerance reported against the original
    // problem.
    let n_ineq = ineqs.len().max(1) as f64;
    for (i, r) in ineqs.iter_mut().enumerate() {
        r.rhs += 1e-10 * (i + 1) as f64 / n_ineq;
    }

    Ok(Internal { p, eq_rows, eq_rhs, eq_orig, eq_scale, ineqs })
}

impl Internal {
    /// Least-norm solution of the (independent) equality system.
    fn min_norm_eq_point(&self) -> Result<Array1<f64>> {
        if self.eq_rows.nrows() == 0 {
            return Ok(Array1::zeros(self.p));
        }
        let gram = self.eq_rows.dot(&self.eq_rows.t());
        let y = linalg::solve(&gram.view(), &self.eq_rhs.view())?;
        Ok(self.eq_rows.t().dot(&y))
    }

    /// Project `x` onto the equality manifold.
    fn project_eq(&self, x: &mut Array1<f64>) -> Result<()> {
        if self.eq_rows.nrows() == 0 {
            return Ok(());
        }
        let r = &self.eq_rhs - &self.eq_rows.dot(x);
        if linalg::norm_inf(&r.view()) == 0.0 {
            return Ok(());
        }
        let gram = self.eq_rows.dot(&self.eq_rows.t());
        let y = linalg::solve(&gram.view(), &r.view())?;
        *x += &self.eq_rows.t().dot(&y);
        Ok(())
    }

    fn max_ineq_violation(&self, x: &ArrayView1<f64>) -> f64 {
        self.ineqs
            .iter()
            .fold(0.0f64, |m, r| m.max(r.coeffs.dot(x) - r.rhs))
    }
}

/// Outcome of one equality-constrained KKT solve.
struct EqpStep {
    xstar: Array1<f64>,
    lambda: Array1<f64>,
}

fn solve_eqp(
    h: &Array2<f64>,
    f: &Array1<f64>,
    m_rows: &Array2<f64>,
    m_rhs: &Array1<f64>,
    ridge_events: &mut usize,
) -> Result<EqpStep> {
    let p = f.len();
    let k = m_rows.nrows();
    let n = p + k;
    let mut kkt = Array2::zeros((n, n));
    kkt.slice_mut(s![..p, ..p]).assign(h);
    if k > 0 {
        kkt.slice_mut(s![..p, p..]).assign(&m_rows.t());
        kkt.slice_mut(s![p.., ..p]).assign(m_rows);
    }
    let mut rhs = Array1::zeros(n);
    rhs.slice_mut(s![..p]).assign(&f.mapv(|v| -v));
    if k > 0 {
        rhs.slice_mut(s![p..]).assign(m_rhs);
    }

    // A clean LU factorization is not enough: a nearly singular reduced
    // Hessian can pass the pivot threshold yet produce a step that is not a
    // minimizer of the working-set subproblem (wild multipliers, objective
    // increase on the "full step"). Guard every solve with a residual check
    // and one round of iterative refinement, escalating a primal ridge until
    // the solution is trustworthy.
    let rhs_scale = rhs.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let kkt_scale = kkt.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    let attempt = |kkt: &Array2<f64>| -> Option<Array1<f64>> {
        let lu = Lu::factor(&kkt.view()).ok()?;
        let mut sol = lu.solve(&rhs.view());
        let residual = |sol: &Array1<f64>| &rhs - &kkt.dot(sol);
        // One step of iterative refinement sharpens a mildly ill-conditioned
        // solve; it cannot rescue a truly singular system.
        let r = residual(&sol);
        sol = &sol + &lu.solve(&r.view());
        let r = residual(&sol);
        let rnorm = r.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let snorm = sol.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let tol = 1e-9 * (rhs_scale + kkt_scale * snorm).max(1.0);
        if rnorm > tol {
            log::trace!("working-set KKT solve rejected: rnorm={rnorm:.3e} tol={tol:.3e}");
        }
        (rnorm <= tol).then_some(sol)
    };

    let diag_mean =
        ((0..p).map(|i| h[[i, i]].abs()).sum::<f64>() / p.max(1) as f64).max(kkt_scale * 1e-8);
    let mut sol = attempt(&kkt);
    let mut ridge_applied = 0.0;
    for &ridge_rel in &[1e-10, 1e-8, 1e-6] {
        if sol.is_some() {
            break;
        }
        *ridge_events += 1;
        let ridge = ridge_rel * diag_mean;
        for i in 0..p {
            kkt[[i, i]] += ridge - ridge_applied;
        }
        ridge_applied = ridge;
        sol = attempt(&kkt);
    }
    let sol = sol.ok_or_else(|| Error::Singular("working-set KKT system".into()))?;
    Ok(EqpStep {
        xstar: sol.slice(s![..p]).to_owned(),
        lambda: sol.slice(s![p..]).to_owned(),
    })
}

struct LoopResult {
    x: Array1<f64>,
    lambda: Array1<f64>,
    working: Vec<usize>,
    status: QpStatus,
    iterations: usize,
    objective_trace: Vec<f64>,
}

/// Core active-set loop. `x0` must satisfy the equality system and all
/// inequalities of `intern` within the feasibility tolerance.
/// Feasible point candidate with every inequality held at its boundary.
/// The equality system plus all inequality rows (as equalities) is often
/// consistent for monotone-pattern constraint systems, and its least-norm
/// solution is then feasible outright - no slack minimization needed.
/// Returns None when the stacked system is inconsistent or the point
/// still violates something (e.g. crossing bound pairs).
fn tight_point(intern: &Internal, opts: &SolverOptions) -> Option<Array1<f64>> {
    let p = intern.p;
    let m_eq = intern.eq_rows.nrows();
    let total = m_eq + intern.ineqs.len();
    if total == 0 {
        return Some(Array1::zeros(p));
    }
    let mut rows = Array2::zeros((total, p));
    let mut rhs = Array1::zeros(total);
    if m_eq > 0 {
        rows.slice_mut(s![..m_eq, ..]).assign(&intern.eq_rows);
        rhs.slice_mut(s![..m_eq]).assign(&intern.eq_rhs);
    }
    for (i, r) in intern.ineqs.iter().enumerate() {
        rows.row_mut(m_eq + i).assign(&r.coeffs);
        rhs[m_eq + i] = r.rhs;
    }
    let keep = linalg::independent_rows(&rows.view(), 1e-10);
    let k = keep.len();
    let mut sub = Array2::zeros((k, p));
    let mut sub_rhs = Array1::zeros(k);
    for (r, &idx) in keep.iter().enumerate() {
        sub.row_mut(r).assign(&rows.row(idx));
        sub_rhs[r] = rhs[idx];
    }
    // Least-norm solution x = M'(MM')^{-1} rhs of the kept rows.
    let gram = sub.dot(&sub.t());
    let lu = Lu::factor(&gram.view()).ok()?;
    let y = lu.solve(&sub_rhs.view());
    let x = sub.t().dot(&y);

    // The point must satisfy the dropped rows and the equalities too.
    for r in 0..m_eq {
        if (intern.eq_rows.row(r).dot(&x) - intern.eq_rhs[r]).abs() > opts.feas_tol {
            return None;
        }
    }
    if intern.max_ineq_violation(&x.view()) > opts.feas_tol {
        return None;
    }
    Some(x)
}

/// Whether row `a` lies outside the row space of `m`, judged by the
/// least-squares residual of projecting `a` onto it.
fn row_independent(m: &Array2<f64>, a: &Array1<f64>) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    if m.nrows() >= m.ncols() {
        return false;
    }
    let gram = m.dot(&m.t());
    let ma = m.dot(a);
    match linalg::Lu::factor(&gram.view()) {
        Ok(lu) => {
            let y = lu.solve(&ma.view());
            let resid = a - &m.t().dot(&y);
            linalg::norm_inf(&resid.view()) > 1e-8 * (1.0 + linalg::norm_inf(&a.view()))
        }
        // A singular Gram matrix means the working system itself is
        // degenerate; refuse to grow it.
        Err(_) => false,
    }
}

fn active_set_loop(
    prob: &QpProblem,
    intern: &Internal,
    mut x: Array1<f64>,
    opts: &SolverOptions,
) -> Result<LoopResult> {
    let p = intern.p;
    let m_eq = intern.eq_rows.nrows();
    let n_ineq = intern.ineqs.len();
    let max_iter = opts.max_iter_factor * (p + m_eq + n_ineq).max(1);

    let mut working: Vec<usize> = Vec::new();
    let mut in_working = vec![false; n_ineq];
    let mut lambda = Array1::zeros(m_eq);
    let mut trace = Vec::new();
    let mut ridge_events = 0usize;
    // Anti-bounce guard: a constraint dropped on multiplier noise whose
    // removal directly re-violates it (zero-length step straight back)
    // is held in the working set until the iterate actually moves.
    let mut no_drop = vec![false; n_ineq];
    let mut last_dropped: Option<usize> = None;

    let objective =
        |x: &Array1<f64>| 0.5 * x.dot(&prob.h.dot(x)) + prob.f.dot(x);

    let mut iterations = 0usize;
    let status = loop {
        if iterations >= max_iter {
            break QpStatus::MaxIterations;
        }
        iterations += 1;

        // Working system: equality rows then active inequality rows.
        let k = m_eq + working.len();
        let mut m_rows = Array2::zeros((k, p));
        let mut m_rhs = Array1::zeros(k);
        if m_eq > 0 {
            m_rows.slice_mut(s![..m_eq, ..]).assign(&intern.eq_rows);
            m_rhs.slice_mut(s![..m_eq]).assign(&intern.eq_rhs);
        }
        for (r, &w) in working.iter().enumerate() {
            m_rows.row_mut(m_eq + r).assign(&intern.ineqs[w].coeffs);
            m_rhs[m_eq + r] = intern.ineqs[w].rhs;
        }

        let step = solve_eqp(&prob.h, &prob.f, &m_rows, &m_rhs, &mut ridge_events)?;
        lambda = step.lambda;
        let d = &step.xstar - &x;
        let dnorm = linalg::norm_inf(&d.view());
        let xscale = 1.0 + linalg::norm_inf(&x.view());

        // Blocking constraint: smallest step fraction, ties to the
        // smallest inequality index. Rows dependent on the working
        // system only register a'd > 0 through round-off (exact
        // arithmetic gives M d = 0 => a'd = 0), and adding one would
        // make the KKT matrix singular, so dependent candidates are
        // rejected and the scan moves to the next-smallest fraction.
        let mut candidates: Vec<(f64, usize)> = Vec::new();
        if dnorm > 0.0 {
            let dir_tol = 1e-11 * dnorm;
            for (i, row) in intern.ineqs.iter().enumerate() {
                if in_working[i] {
                    continue;
                }
                let ad = row.coeffs.dot(&d);
                if ad > dir_tol {
                    let t = ((row.rhs - row.coeffs.dot(&x)) / ad).max(0.0);
                    if t < 1.0 {
                        candidates.push((t, i));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite step fractions"));
        let mut alpha = f64::INFINITY;
        let mut blocker: Option<usize> = None;
        for &(t, i) in &candidates {
            if row_independent(&m_rows, &intern.ineqs[i].coeffs) {
                alpha = t;
                blocker = Some(i);
                break;
            }
        }

        if blocker.is_none() || alpha >= 1.0 {
            // Full step to the subproblem optimum. A descent direction
            // with no curvature and nothing blocking it is a ray to
            // -infinity (the step only terminated because of the ridge).
            if blocker.is_none() && dnorm > 1e-12 * xscale {
                let curv = d.dot(&prob.h.dot(&d));
                let slope = (prob.h.dot(&x) + &prob.f).dot(&d);
                let dsq = d.dot(&d);
                if dnorm > 1e13 * xscale
                    || (curv <= 1e-10 * dsq && slope < -1e-12 * dsq.sqrt())
                {
                    break QpStatus::Unbounded;
                }
            }
            if dnorm > 1e-10 * xscale {
                no_drop.iter_mut().for_each(|b| *b = false);
            }
            x = step.xstar;
            trace.push(objective(&x));
            // Optimality test on working-set multipliers.
            let grad_scale = 1.0
                + linalg::norm_inf(&(prob.h.dot(&x) + &prob.f).view());
            let mult_tol = 1e-7 * grad_scale;
            let mut drop: Option<(usize, usize)> = None; // (ineq index, working pos)
            for (pos, &w) in working.iter().enumerate() {
                if no_drop[w] {
                    continue;
                }
                if lambda[m_eq + pos] < -mult_tol {
                    match drop {
                        Some((wi, _)) if wi <= w => {}
                        _ => drop = Some((w, pos)),
                    }
                }
            }
            match drop {
                None => break QpStatus::Optimal,
                Some((w, pos)) => {
                    working.remove(pos);
                    in_working[w] = false;
                    last_dropped = Some(w);
                }
            }
        } else {
            if alpha > 1e-10 {
                no_drop.iter_mut().for_each(|b| *b = false);
            }
            x.scaled_add(alpha, &d);
            trace.push(objective(&x));
            let w = blocker.unwrap();
            // A drop that only earned a zero-length step was based on a
            // noise-level multiplier; don't retry it at this iterate.
            if alpha <= 1e-10 {
                if let Some(d) = last_dropped.take() {
                    no_drop[d] = true;
                }
            }
            // Hold the new constraint exactly at its boundary.
            working.push(w);
            in_working[w] = true;
        }
    };

    if ridge_events > 0 {
        log::debug!("active set applied Hessian ridge {ridge_events} time(s)");
    }

    Ok(LoopResult { x, lambda, working, status, iterations, objective_trace: trace })
}

fn extract_solution(
    prob: &QpProblem,
    intern: &Internal,
    lr: LoopResult,
) -> QpSolution {
    let p = intern.p;
    let m_eq = intern.eq_rows.nrows();
    let mut x = lr.x;

    // Polish equality feasibility; the correction is within solver noise.
    if lr.status == QpStatus::Optimal {
        let _ = intern.project_eq(&mut x);
    }

    let mut mult_eq = Array1::zeros(prob.aeq.nrows());
    for r in 0..m_eq {
        mult_eq[intern.eq_orig[r]] = lr.lambda[r] / intern.eq_scale[r];
    }
    let mut mult_ineq = Array1::zeros(prob.a.nrows());
    let mut mult_lower = Array1::zeros(p);
    let mut mult_upper = Array1::zeros(p);
    for (pos, &w) in lr.working.iter().enumerate() {
        // On early termination lambda can be stale (one working-set
        // mutation behind); missing entries count as zero.
        let Some(&lam) = lr.lambda.get(m_eq + pos) else { break };
        let row = &intern.ineqs[w];
        let v = lam / row.scale;
        match row.kind {
            RowKind::General(i) => mult_ineq[i] = v,
            RowKind::Lower(j) => mult_lower[j] = v,
            RowKind::Upper(j) => mult_upper[j] = v,
        }
    }
    // Clip multiplier noise at the optimum.
    if lr.status == QpStatus::Optimal {
        for v in mult_ineq
            .iter_mut()
            .chain(mult_lower.iter_mut())
            .chain(mult_upper.iter_mut())
        {
            if *v < 0.0 && *v > -1e-9 {
                *v = 0.0;
            }
        }
    }

    let mut sol = QpSolution {
        x,
        mult_eq,
        mult_ineq,
        mult_lower,
        mult_upper,
        status: lr.status,
        iterations: lr.iterations,
        kkt: Default::default(),
        objective_trace: lr.objective_trace,
    };
    sol.kkt = kkt_residuals(prob, &sol);
    sol
}

fn infeasible_solution(prob: &QpProblem, iterations: usize) -> QpSolution {
    let p = prob.p();
    QpSolution {
        x: Array1::zeros(p),
        mult_eq: Array1::zeros(prob.aeq.nrows()),
        mult_ineq: Array1::zeros(prob.a.nrows()),
        mult_lower: Array1::zeros(p),
        mult_upper: Array1::zeros(p),
        status: QpStatus::Infeasible,
        iterations,
        kkt: Default::default(),
        objective_trace: Vec::new(),
    }
}

/// Solve the QP with the default tolerances.
pub fn solve_qp(prob: &QpProblem, x0: Option<&Array1<f64>>) -> Result<QpSolution> {
    solve_qp_with(prob, x0, &SolverOptions::default())
}

pub fn solve_qp_with(
    prob: &QpProblem,
    x0: Option<&Array1<f64>>,
    opts: &SolverOptions,
) -> Result<QpSolution> {
    prob.validate()?;
    let intern = match build_internal(prob, opts) {
        Ok(i) => i,
        Err(Error::Infeasible(_)) => return Ok(infeasible_solution(prob, 0)),
        Err(e) => return Err(e),
    };

    // Starting point: caller's point when feasible, otherwise the
    // least-norm equality solution, otherwise phase 1.
    let start = match x0 {
        Some(x) => {
            if x.len() != intern.p {
                return Err(Error::Dimension("x0 length != p".into()));
            }
            let mut x = x.clone();
            intern.project_eq(&mut x)?;
            if intern.max_ineq_violation(&x.view()) <= opts.feas_tol {
                Some(x)
            } else {
                None
            }
        }
        None => {
            let x = intern.min_norm_eq_point()?;
            if intern.max_ineq_violation(&x.view()) <= opts.feas_tol {
                Some(x)
            } else {
                None
            }
        }
    };
    let start = match start {
        Some(x) => x,
        None => match tight_point(&intern, opts) {
            Some(x) => x,
            None => match phase1_point(&intern, opts)? {
                Some(x) => x,
                None => return Ok(infeasible_solution(prob, 0)),
            },
        },
    };

    let lr = active_set_loop(prob, &intern, start, opts)?;
    Ok(extract_solution(prob, &intern, lr))
}

/// Deterministic phase-1: minimize the sum of nonnegative slacks on the
/// violated inequalities subject to the equality system (an LP solved by
/// the same active-set machinery with a tiny ridge Hessian). Returns a
/// feasible point, or None when the positive phase-1 minimum certifies
/// infeasibility.
pub fn phase1_feasible(prob: &QpProblem) -> Result<Option<Array1<f64>>> {
    let opts = SolverOptions::default();
    prob.validate()?;
    let intern = match build_internal(prob, &opts) {
        Ok(i) => i,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let x = intern.min_norm_eq_point()?;
    if intern.max_ineq_violation(&x.view()) <= opts.feas_tol {
        return Ok(Some(x));
    }
    phase1_point(&intern, &opts)
}

fn phase1_point(
    intern: &Internal,
    opts: &SolverOptions,
) -> Result<Option<Array1<f64>>> {
    let p = intern.p;
    let x_eq = intern.min_norm_eq_point()?;

    let violated: Vec<usize> = intern
        .ineqs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.coeffs.dot(&x_eq) - r.rhs > opts.feas_tol)
        .map(|(i, _)| i)
        .collect();
    if violated.is_empty() {
        return Ok(Some(x_eq));
    }
    let n_s = violated.len();
    let n = p + n_s;

    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        h[[i, i]] = 1e-8;
    }
    let mut f = Array1::zeros(n);
    for i in p..n {
        f[i] = 1.0;
    }

    let m_eq = intern.eq_rows.nrows();
    let mut aeq = Array2::zeros((m_eq, n));
    aeq.slice_mut(s![.., ..p]).assign(&intern.eq_rows);
    let beq = intern.eq_rhs.clone();

    let mut a = Array2::zeros((intern.ineqs.len(), n));
    let mut b = Array1::zeros(intern.ineqs.len());
    for (i, row) in intern.ineqs.iter().enumerate() {
        a.slice_mut(s![i, ..p]).assign(&row.coeffs);
        b[i] = row.rhs;
        if let Some(v) = violated.iter().position(|&vi| vi == i) {
            a[[i, p + v]] = -1.0;
        }
    }

    let mut lb = Array1::from_elem(n, f64::NEG_INFINITY);
    let ub = Array1::from_elem(n, f64::INFINITY);
    for j in p..n {
        lb[j] = 0.0;
    }

    let ext = QpProblem { h, f, aeq, beq, a, b, lb, ub };
    let ext_intern = build_internal(&ext, opts)?;

    let mut x0 = Array1::zeros(n);
    x0.slice_mut(s![..p]).assign(&x_eq);
    for (v, &i) in violated.iter().enumerate() {
        let r = &intern.ineqs[i];
        x0[p + v] = (r.coeffs.dot(&x_eq) - r.rhs).max(0.0);
    }

    let lr = active_set_loop(&ext, &ext_intern, x0, opts)?;
    if lr.status == QpStatus::MaxIterations {
        return Err(Error::MaxIterations(lr.iterations));
    }
    let x_part = lr.x.slice(s![..p]).to_owned();
    if intern.max_ineq_violation(&x_part.view()) <= 10.0 * opts.feas_tol {
        Ok(Some(x_part))
    } else {
        Ok(None)
    }
}
