//! The five score-development formulations, each reduced to one convex QP
//! or a short phi-indexed sequence of QPs with a root search that
//! restores the weight-of-evidence scale.

use ndarray::{s, Array1, Array2, ArrayView2};

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::moments::{check_woe, divergence, woe_scale, MomentSet};
use crate::qp::{solve_qp, QpProblem, QpSolution, QpStatus};

/// Default scale target for the classic quadratic program. The final
/// weight-of-evidence solution does not depend on it.
pub const DEFAULT_DELTA: f64 = 1.0;

/// Root tolerance for |g(phi)| relative to max(1, |d'S|). Much tighter
/// than the 1e-3 historically accepted for this equation, so the final
/// weights satisfy the weight-of-evidence identity to 1e-6.
pub const PHI_ROOT_TOL: f64 = 1e-7;

/// Default phi bracket before expansion.
pub const DEFAULT_PHI_BRACKET: (f64, f64) = (0.01, 4.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Classic,
    Penalized,
    Inweight,
    Range,
    Regression,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Classic => "classic",
            ProblemKind::Penalized => "penalized",
            ProblemKind::Inweight => "inweight",
            ProblemKind::Range => "range",
            ProblemKind::Regression => "regression",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(ProblemKind::Classic),
            "penalized" => Ok(ProblemKind::Penalized),
            "inweight" => Ok(ProblemKind::Inweight),
            "range" => Ok(ProblemKind::Range),
            "regression" => Ok(ProblemKind::Regression),
            other => Err(Error::Config(format!("unknown problem kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Residuals of the final weights against each constraint block.
#[derive(Debug, Clone)]
pub struct ConstraintSlacks {
    /// Ac·S (should be 0).
    pub equality: Array1<f64>,
    /// Ap·S (should be <= 0).
    pub pattern: Array1<f64>,
    /// Ai·S - IW (should be 0).
    pub inweight: Array1<f64>,
}

impl ConstraintSlacks {
    fn of(s: &Array1<f64>, cs: &ConstraintSet) -> Self {
        ConstraintSlacks {
            equality: cs.ac.dot(s),
            pattern: cs.ap.dot(s),
            inweight: if cs.ai.nrows() > 0 { cs.ai.dot(s) - &cs.iw } else { Array1::zeros(0) },
        }
    }
}

/// Final score weights with the scaling and diagnostics that produced
/// them.
#[derive(Debug, Clone)]
pub struct ScorecardSolution {
    pub kind: ProblemKind,
    /// Final score weights (on the WoE scale for problems 1-4).
    pub s: Array1<f64>,
    /// WoE scale factor applied (1 when none was applied).
    pub beta: f64,
    /// For regression only: the factor that would move S onto the WoE
    /// scale; reported, never applied.
    pub woe_equivalent_beta: Option<f64>,
    pub phi_star: Option<f64>,
    pub lambda: f64,
    pub delta: Option<f64>,
    pub intercept: Option<f64>,
    pub div_dev: f64,
    pub div_val: Option<f64>,
    pub slacks: ConstraintSlacks,
    /// (phi, g(phi)) evaluations for line-search problems.
    pub trace: Vec<(f64, f64)>,
}

impl ScorecardSolution {
    /// Divergence of the stored weights under validation-sample moments.
    pub fn set_validation(&mut self, m_val: &MomentSet) -> Result<()> {
        self.div_val = Some(divergence(&self.s.view(), m_val)?);
        Ok(())
    }
}

fn status_err(sol: &QpSolution, what: &str) -> Error {
    match sol.status {
        QpStatus::Infeasible => Error::Infeasible(format!(" in {what}")),
        QpStatus::Unbounded => Error::Unbounded,
        QpStatus::MaxIterations => Error::MaxIterations(sol.iterations),
        QpStatus::Optimal => unreachable!(),
    }
}

fn stack2(top: &Array2<f64>, bottom: &Array2<f64>) -> Array2<f64> {
    let p = top.ncols().max(bottom.ncols());
    let mut out = Array2::zeros((top.nrows() + bottom.nrows(), p));
    if top.nrows() > 0 {
        out.slice_mut(s![..top.nrows(), ..]).assign(top);
    }
    if bottom.nrows() > 0 {
        out.slice_mut(s![top.nrows().., ..]).assign(bottom);
    }
    out
}

fn row_matrix(v: &Array1<f64>) -> Array2<f64> {
    let mut m = Array2::zeros((1, v.len()));
    m.row_mut(0).assign(v);
    m
}

fn penalized_hessian(m: &MomentSet, lambda: f64) -> Array2<f64> {
    let p = m.p();
    let mut h = m.c.mapv(|v| 2.0 * v);
    if lambda > 0.0 {
        let r = 2.0 * lambda / p as f64;
        for i in 0..p {
            h[[i, i]] += r;
        }
    }
    h
}

fn solve_scaled(
    kind: ProblemKind,
    m: &MomentSet,
    cs: &ConstraintSet,
    delta: f64,
    lambda: f64,
) -> Result<ScorecardSolution> {
    if cs.ai.nrows() > 0 {
        return Err(Error::InvalidSpec(
            "classic/penalized problems take no in-weight rows".into(),
        ));
    }
    if delta <= 0.0 {
        return Err(Error::Config(format!("delta must be positive, got {delta}")));
    }
    let p = m.p();
    let h = penalized_hessian(m, lambda);
    let d_row = row_matrix(&m.d);
    let mut beq = Array1::zeros(1 + cs.ac.nrows());
    beq[0] = delta;
    let prob = QpProblem {
        h,
        f: Array1::zeros(p),
        aeq: stack2(&d_row, &cs.ac),
        beq,
        a: cs.ap.clone(),
        b: Array1::zeros(cs.ap.nrows()),
        lb: cs.lb.clone(),
        ub: cs.ub.clone(),
    };

    // Warm start from the pattern-free subproblem, mirroring the usual
    // two-step initialization; the solver falls back to phase 1 when the
    // warm start violates patterns.
    let relaxed = QpProblem { a: Array2::zeros((0, p)), b: Array1::zeros(0), ..prob.clone() };
    let x01 = solve_qp(&relaxed, None)?;
    let warm = (x01.status == QpStatus::Optimal).then_some(&x01.x);

    let sol = solve_qp(&prob, warm)?;
    if sol.status != QpStatus::Optimal {
        return Err(status_err(&sol, kind.as_str()));
    }
    let scaling = woe_scale(&sol.x.view(), m)?;
    let s = scaling.w;
    let div_dev = divergence(&s.view(), m)?;
    Ok(ScorecardSolution {
        kind,
        slacks: ConstraintSlacks::of(&s, cs),
        s,
        beta: scaling.beta,
        woe_equivalent_beta: None,
        phi_star: None,
        lambda,
        delta: Some(delta),
        intercept: None,
        div_dev,
        div_val: None,
        trace: Vec::new(),
    })
}

/// Classic problem: maximize divergence subject to score engineering,
/// solved as min S'CS with d'S = delta then rescaled to the WoE scale.
pub fn solve_classic(m: &MomentSet, cs: &ConstraintSet, delta: f64) -> Result<ScorecardSolution> {
    solve_scaled(ProblemKind::Classic, m, cs, delta, 0.0)
}

/// Penalized classic problem: identical with H = 2(C + (lambda/p) I).
pub fn solve_penalized(
    m: &MomentSet,
    cs: &ConstraintSet,
    delta: f64,
    lambda: f64,
) -> Result<ScorecardSolution> {
    if lambda < 0.0 {
        return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
    }
    solve_scaled(ProblemKind::Penalized, m, cs, delta, lambda)
}

/// Grid search for the penalty maximizing validation divergence. Ties
/// break toward the smaller lambda; grid points whose QP fails are
/// skipped with a warning.
pub fn tune_lambda(
    m_dev: &MomentSet,
    m_val: &MomentSet,
    cs: &ConstraintSet,
    delta: f64,
    grid: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    if grid.is_empty() {
        return Err(Error::Config("lambda grid is empty".into()));
    }
    let mut curve = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        match solve_penalized(m_dev, cs, delta, lambda)
            .and_then(|sol| divergence(&sol.s.view(), m_val))
        {
            Ok(dv) => {
                curve.push((lambda, dv));
                let better = match best {
                    None => true,
                    Some((_, b)) => dv > b,
                };
                if better {
                    best = Some((lambda, dv));
                }
            }
            Err(e) => log::warn!("lambda = {lambda} skipped: {e}"),
        }
    }
    match best {
        Some((lambda, _)) => Ok((lambda, curve)),
        None => Err(Error::Infeasible(": every lambda grid point failed".into())),
    }
}

/// One fixed-phi solve of the in-weighting quadratic program:
/// H = 2(phi C + (lambda/p) I), f = -(1+phi) d, under Ai S = IW,
/// Ac S = 0, Ap S <= 0. Returns S(phi) and g(phi) = S'CS - d'S.
pub fn solve_inweight_at_phi(
    m: &MomentSet,
    cs: &ConstraintSet,
    lambda: f64,
    phi: f64,
    warm: Option<&Array1<f64>>,
) -> Result<(Array1<f64>, f64)> {
    if phi < 0.0 {
        return Err(Error::Config(format!(
            "phi must be nonnegative to keep the Hessian PSD, got {phi}"
        )));
    }
    let p = m.p();
    let mut h = m.c.mapv(|v| 2.0 * phi * v);
    if lambda > 0.0 {
        let r = 2.0 * lambda / p as f64;
        for i in 0..p {
            h[[i, i]] += r;
        }
    }
    let f = m.d.mapv(|v| -(1.0 + phi) * v);
    let aeq = stack2(&cs.ai, &cs.ac);
    let mut beq = Array1::zeros(aeq.nrows());
    beq.slice_mut(s![..cs.iw.len()]).assign(&cs.iw);
    let prob = QpProblem {
        h,
        f,
        aeq,
        beq,
        a: cs.ap.clone(),
        b: Array1::zeros(cs.ap.nrows()),
        lb: cs.lb.clone(),
        ub: cs.ub.clone(),
    };
    let sol = solve_qp(&prob, warm)?;
    if sol.status != QpStatus::Optimal {
        return Err(status_err(&sol, "inweight QP"));
    }
    let scs = sol.x.dot(&m.c.dot(&sol.x));
    let ds = m.d.dot(&sol.x);
    Ok((sol.x, scs - ds))
}

/// Bracketed root search: secant steps on the two most recent bracketing
/// points with bisection fallback, after geometric bracket expansion.
/// Returns (root, trace of evaluations).
pub fn line_search_root<G>(
    mut g: G,
    bracket: (f64, f64),
    tol: f64,
) -> Result<(f64, Vec<(f64, f64)>)>
where
    G: FnMut(f64) -> Result<f64>,
{
    const MAX_EXPANSIONS: usize = 60;
    const MAX_EVALS: usize = 100;
    let mut trace = Vec::new();
    let mut evals = 0usize;
    let mut eval = |phi: f64, trace: &mut Vec<(f64, f64)>, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = g(phi)?;
        trace.push((phi, v));
        Ok(v)
    };

    let (mut lo, mut hi) = bracket;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut glo = eval(lo, &mut trace, &mut evals)?;
    if glo.abs() <= tol {
        return Ok((lo, trace));
    }
    let mut ghi = eval(hi, &mut trace, &mut evals)?;
    if ghi.abs() <= tol {
        return Ok((hi, trace));
    }

    // Expand until g(lo) > 0 > g(hi); g decreases in phi over the ranges
    // of interest, but only the sign change is relied on.
    let mut expansions = 0usize;
    while glo <= 0.0 && expansions < MAX_EXPANSIONS {
        expansions += 1;
        let new_lo = if lo > 1e-12 { lo / 2.0 } else { 0.0 };
        if new_lo == lo {
            break;
        }
        hi = lo;
        ghi = glo;
        lo = new_lo;
        glo = eval(lo, &mut trace, &mut evals)?;
        if glo.abs() <= tol {
            return Ok((lo, trace));
        }
    }
    while ghi >= 0.0 && expansions < MAX_EXPANSIONS {
        expansions += 1;
        lo = hi;
        glo = ghi;
        hi *= 2.0;
        ghi = eval(hi, &mut trace, &mut evals)?;
        if ghi.abs() <= tol {
            return Ok((hi, trace));
        }
    }
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::NoRoot(expansions));
    }

    // Illinois variant of false position: when the same endpoint survives
    // two iterations in a row its g value is halved in the interpolation,
    // which prevents the slow one-sided creep plain secant suffers when one
    // endpoint sits on a flat tail of g.
    let (mut wlo, mut whi) = (glo, ghi);
    let mut side = 0i8;
    while evals < MAX_EVALS {
        let mut phi = lo - wlo * (hi - lo) / (whi - wlo);
        let span = hi - lo;
        if !phi.is_finite() || phi <= lo + 1e-3 * span || phi >= hi - 1e-3 * span {
            phi = 0.5 * (lo + hi);
        }
        let v = eval(phi, &mut trace, &mut evals)?;
        if v.abs() <= tol || span < 1e-14 * (1.0 + hi.abs()) {
            return Ok((phi, trace));
        }
        if v > 0.0 {
            lo = phi;
            wlo = v;
            if side == 1 {
                whi *= 0.5;
            }
            side = 1;
        } else {
            hi = phi;
            whi = v;
            if side == -1 {
                wlo *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::MaxIterations(MAX_EVALS))
}

fn finish_phi_solution(
    kind: ProblemKind,
    m: &MomentSet,
    cs: &ConstraintSet,
    lambda: f64,
    phi_star: f64,
    s: Array1<f64>,
    trace: Vec<(f64, f64)>,
) -> Result<ScorecardSolution> {
    let div_dev = divergence(&s.view(), m)?;
    Ok(ScorecardSolution {
        kind,
        slacks: ConstraintSlacks::of(&s, cs),
        s,
        beta: 1.0,
        woe_equivalent_beta: None,
        phi_star: Some(phi_star),
        lambda,
        delta: None,
        intercept: None,
        div_dev,
        div_val: None,
        trace,
    })
}

/// Non-zero in-weighting problem: root of g(phi) = S(phi)'CS(phi) -
/// d'S(phi); the root restores the WoE scale, so no rescaling is applied.
/// Consecutive phi evaluations warm-start from the previous solution.
pub fn solve_inweight(
    m: &MomentSet,
    cs: &ConstraintSet,
    lambda: f64,
    phi_bracket: Option<(f64, f64)>,
) -> Result<ScorecardSolution> {
    let bracket = phi_bracket.unwrap_or(DEFAULT_PHI_BRACKET);
    let mut warm: Option<Array1<f64>> = None;
    let mut last: Option<Array1<f64>> = None;
    let mut raw = Vec::new();
    // Root test is |g| <= tol * max(1, |d'S|), so the search sees g
    // divided by that scale.
    let (phi_star, _) = line_search_root(
        |phi| {
            let (s, gval) = solve_inweight_at_phi(m, cs, lambda, phi, warm.as_ref())?;
            let scale = m.d.dot(&s).abs().max(1.0);
            warm = Some(s.clone());
            last = Some(s);
            raw.push((phi, gval));
            Ok(gval / scale)
        },
        bracket,
        PHI_ROOT_TOL,
    )?;
    let s = last.expect("line search evaluated g at least once");
    finish_phi_solution(ProblemKind::Inweight, m, cs, lambda, phi_star, s, raw)
}

/// Per-weight emphasis (diagonal of R) and targets for range engineering.
#[derive(Debug, Clone)]
pub struct RangeTargets {
    pub r: Array1<f64>,
    pub t: Array1<f64>,
}

impl RangeTargets {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.r.len() != p || self.t.len() != p {
            return Err(Error::Dimension("range targets length != p".into()));
        }
        if self.r.iter().any(|&v| v < 0.0) {
            return Err(Error::Config("range emphasis R must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Range engineering: pull weights toward targets T with emphasis R,
/// subject to score engineering, a divergence floor, and the WoE scale
/// restored through the phi root as for in-weighting.
pub fn solve_range(
    m: &MomentSet,
    cs: &ConstraintSet,
    lambda: f64,
    targets: &RangeTargets,
    div_floor: f64,
    phi_bracket: Option<(f64, f64)>,
) -> Result<ScorecardSolution> {
    let p = m.p();
    targets.validate(p)?;
    if div_floor <= 0.0 {
        return Err(Error::Config(format!("div_floor must be positive, got {div_floor}")));
    }
    let bracket = phi_bracket.unwrap_or(DEFAULT_PHI_BRACKET);

    // A = [-d'; Ap], b = [-Div; 0]
    let neg_d = row_matrix(&m.d.mapv(|v| -v));
    let a = stack2(&neg_d, &cs.ap);
    let mut b = Array1::zeros(a.nrows());
    b[0] = -div_floor;

    let aeq = stack2(&cs.ai, &cs.ac);
    let mut beq = Array1::zeros(aeq.nrows());
    beq.slice_mut(s![..cs.iw.len()]).assign(&cs.iw);

    let mut warm: Option<Array1<f64>> = None;
    let mut last: Option<Array1<f64>> = None;
    let mut eval = |phi: f64| -> Result<(f64, f64)> {
        if phi < 0.0 {
            return Err(Error::Config(format!("phi must be nonnegative, got {phi}")));
        }
        let mut h = m.c.mapv(|v| 2.0 * phi * v);
        let ridge = 2.0 * lambda / p as f64;
        for i in 0..p {
            h[[i, i]] += 2.0 * targets.r[i] + ridge;
        }
        let f = Array1::from_iter(
            (0..p).map(|i| -(phi * m.d[i] + 2.0 * targets.r[i] * targets.t[i])),
        );
        let prob = QpProblem {
            h,
            f,
            aeq: aeq.clone(),
            beq: beq.clone(),
            a: a.clone(),
            b: b.clone(),
            lb: cs.lb.clone(),
            ub: cs.ub.clone(),
        };
        let sol = solve_qp(&prob, warm.as_ref())?;
        if sol.status != QpStatus::Optimal {
            return Err(status_err(&sol, "range QP"));
        }
        let scs = sol.x.dot(&m.c.dot(&sol.x));
        let ds = m.d.dot(&sol.x);
        warm = Some(sol.x.clone());
        last = Some(sol.x);
        Ok((scs - ds, ds.abs().max(1.0)))
    };

    let (phi_star, trace) = {
        let mut raw = Vec::new();
        let (phi_star, _) = line_search_root(
            |phi| {
                let (v, scale) = eval(phi)?;
                raw.push((phi, v));
                Ok(v / scale)
            },
            bracket,
            PHI_ROOT_TOL,
        )?;
        (phi_star, raw)
    };
    let s = last.expect("line search evaluated g at least once");
    let mut sol = finish_phi_solution(ProblemKind::Range, m, cs, lambda, phi_star, s, trace)?;
    sol.kind = ProblemKind::Range;
    if sol.div_dev < div_floor - 1e-6 {
        return Err(Error::Infeasible(format!(
            ": range solution divergence {} fell below floor {div_floor}",
            sol.div_dev
        )));
    }
    Ok(sol)
}

/// Score-engineered regression: ridge-penalized least squares with an
/// unpenalized intercept column prepended and all constraint blocks
/// zero-padded for the intercept. No WoE rescaling; the equivalent scale
/// factor is reported separately.
pub fn solve_regression(
    rows: &ArrayView2<f64>,
    y: &Array1<f64>,
    cs: &ConstraintSet,
    lambda: f64,
    m_report: Option<&MomentSet>,
) -> Result<ScorecardSolution> {
    let n = rows.nrows();
    let p = rows.ncols();
    if y.len() != n {
        return Err(Error::Dimension(format!("{n} rows but {} responses", y.len())));
    }
    if cs.p() != p {
        return Err(Error::Dimension("constraint set p != design matrix p".into()));
    }
    if lambda < 0.0 {
        return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
    }

    // Xr = [1 X]; H = 2(Xr'Xr + (lambda/p) Ir) with Ir zeroing the
    // intercept penalty; f = -2 Xr'y.
    let pr = p + 1;
    let mut xtx = Array2::zeros((pr, pr));
    xtx[[0, 0]] = n as f64;
    let col_sums = rows.sum_axis(ndarray::Axis(0));
    for j in 0..p {
        xtx[[0, j + 1]] = col_sums[j];
        xtx[[j + 1, 0]] = col_sums[j];
    }
    let xtx_inner = rows.t().dot(rows);
    xtx.slice_mut(s![1.., 1..]).assign(&xtx_inner);
    let mut h = xtx.mapv(|v| 2.0 * v);
    if lambda > 0.0 {
        let r = 2.0 * lambda / p as f64;
        for j in 1..pr {
            h[[j, j]] += r;
        }
    }
    let mut f = Array1::zeros(pr);
    f[0] = -2.0 * y.sum();
    let xty = rows.t().dot(y);
    for j in 0..p {
        f[j + 1] = -2.0 * xty[j];
    }

    let pad = |m: &Array2<f64>| -> Array2<f64> {
        let mut out = Array2::zeros((m.nrows(), pr));
        if m.nrows() > 0 {
            out.slice_mut(s![.., 1..]).assign(m);
        }
        out
    };
    let aeq = stack2(&pad(&cs.ai), &pad(&cs.ac));
    let mut beq = Array1::zeros(aeq.nrows());
    beq.slice_mut(s![..cs.iw.len()]).assign(&cs.iw);
    let mut lb = Array1::from_elem(pr, f64::NEG_INFINITY);
    let mut ub = Array1::from_elem(pr, f64::INFINITY);
    lb.slice_mut(s![1..]).assign(&cs.lb);
    ub.slice_mut(s![1..]).assign(&cs.ub);

    let prob = QpProblem {
        h,
        f,
        aeq,
        beq,
        a: pad(&cs.ap),
        b: Array1::zeros(cs.ap.nrows()),
        lb,
        ub,
    };
    let sol = match solve_qp(&prob, None) {
        Ok(sol) => sol,
        Err(Error::Singular(msg)) => {
            return Err(Error::Singular(format!(
                "{msg}; the normal system is rank deficient — use lambda > 0"
            )))
        }
        Err(e) => return Err(e),
    };
    if sol.status != QpStatus::Optimal {
        return Err(status_err(&sol, "regression QP"));
    }

    let intercept = sol.x[0];
    let s = sol.x.slice(s![1..]).to_owned();
    let (div_dev, woe_equiv) = match m_report {
        Some(m) => {
            let dv = divergence(&s.view(), m).unwrap_or(0.0);
            let woe = woe_scale(&s.view(), m).map(|w| w.beta).ok();
            (dv, woe)
        }
        None => (0.0, None),
    };
    Ok(ScorecardSolution {
        kind: ProblemKind::Regression,
        slacks: ConstraintSlacks::of(&s, cs),
        s,
        beta: 1.0,
        woe_equivalent_beta: woe_equiv,
        phi_star: None,
        lambda,
        delta: None,
        intercept: Some(intercept),
        div_dev,
        div_val: None,
        trace: Vec::new(),
    })
}

/// Check that a solution's weights satisfy its constraint blocks and,
/// for problems 1-4, the WoE identity.
pub fn verify_solution(sol: &ScorecardSolution, m: &MomentSet, cs: &ConstraintSet) -> Vec<String> {
    verify_weights(sol.kind, &sol.s, m, cs)
}

/// Same checks on a bare weight vector, for re-verifying stored output.
pub fn verify_weights(
    kind: ProblemKind,
    s: &Array1<f64>,
    m: &MomentSet,
    cs: &ConstraintSet,
) -> Vec<String> {
    let mut failures = Vec::new();
    let eq = cs.ac.dot(s);
    if eq.iter().any(|v| v.abs() > 1e-7) {
        failures.push(format!(
            "Ac·S residual {:.3e} exceeds 1e-7",
            eq.iter().fold(0.0f64, |a, v| a.max(v.abs()))
        ));
    }
    let pat = cs.ap.dot(s);
    if pat.iter().any(|&v| v > 1e-7) {
        failures.push(format!(
            "Ap·S slack {:.3e} exceeds 1e-7",
            pat.iter().fold(0.0f64, |a, &v| a.max(v))
        ));
    }
    if cs.ai.nrows() > 0 && kind != ProblemKind::Regression && kind != ProblemKind::Classic
        && kind != ProblemKind::Penalized
    {
        let iw = cs.ai.dot(s) - &cs.iw;
        if iw.iter().any(|v| v.abs() > 1e-9) {
            failures.push(format!(
                "Ai·S - IW residual {:.3e} exceeds 1e-9",
                iw.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            ));
        }
    }
    if kind != ProblemKind::Regression && !check_woe(&s.view(), m, 1e-6) {
        failures.push("weight-of-evidence identity violated at 1e-6".into());
    }
    failures
}
