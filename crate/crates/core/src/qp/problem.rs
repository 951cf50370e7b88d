//! Canonical convex quadratic program and its solution certificate.
//!
//! minimize (1/2) x'Hx + f'x
//! subject to Aeq x = beq, A x <= b, lb <= x <= ub.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub h: Array2<f64>,
    pub f: Array1<f64>,
    pub aeq: Array2<f64>,
    pub beq: Array1<f64>,
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub lb: Array1<f64>,
    pub ub: Array1<f64>,
}

impl QpProblem {
    /// Problem with no constraints beyond infinite bounds.
    pub fn unconstrained(h: Array2<f64>, f: Array1<f64>) -> Self {
        let p = f.len();
        QpProblem {
            h,
            f,
            aeq: Array2::zeros((0, p)),
            beq: Array1::zeros(0),
            a: Array2::zeros((0, p)),
            b: Array1::zeros(0),
            lb: Array1::from_elem(p, f64::NEG_INFINITY),
            ub: Array1::from_elem(p, f64::INFINITY),
        }
    }

    pub fn p(&self) -> usize {
        self.f.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if self.h.nrows() != p || self.h.ncols() != p {
            return Err(Error::Dimension(format!(
                "H is {}x{}, expected {p}x{p}",
                self.h.nrows(),
                self.h.ncols()
            )));
        }
        let hscale = self.h.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..p {
            for j in (i + 1)..p {
                if (self.h[[i, j]] - self.h[[j, i]]).abs() > 1e-10 * hscale {
                    return Err(Error::Dimension(format!(
                        "H is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if self.aeq.ncols() != p && self.aeq.nrows() > 0 {
            return Err(Error::Dimension("Aeq column count != p".into()));
        }
        if self.aeq.nrows() != self.beq.len() {
            return Err(Error::Dimension("Aeq rows != beq length".into()));
        }
        if self.a.ncols() != p && self.a.nrows() > 0 {
            return Err(Error::Dimension("A column count != p".into()));
        }
        if self.a.nrows() != self.b.len() {
            return Err(Error::Dimension("A rows != b length".into()));
        }
        if self.lb.len() != p || self.ub.len() != p {
            return Err(Error::Dimension("bound length != p".into()));
        }
        for j in 0..p {
            if self.lb[j] > self.ub[j] {
                return Err(Error::Dimension(format!(
                    "lb[{j}] = {} exceeds ub[{j}] = {}",
                    self.lb[j], self.ub[j]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

impl std::fmt::Display for QpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            QpStatus::Optimal => "optimal",
            QpStatus::Infeasible => "infeasible",
            QpStatus::Unbounded => "unbounded",
            QpStatus::MaxIterations => "max_iterations",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal)
            .max(self.dual)
            .max(self.complementarity)
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Array1<f64>,
    pub mult_eq: Array1<f64>,
    pub mult_ineq: Array1<f64>,
    pub mult_lower: Array1<f64>,
    pub mult_upper: Array1<f64>,
    pub status: QpStatus,
    pub iterations: usize,
    pub kkt: KktResiduals,
    /// Objective value after each active-set iteration.
    pub objective_trace: Vec<f64>,
}

impl QpSolution {
    pub fn objective(&self, prob: &QpProblem) -> f64 {
        0.5 * self.x.dot(&prob.h.dot(&self.x)) + prob.f.dot(&self.x)
    }
}

/// The four KKT residual norms of `sol` for `prob`:
/// stationarity |Hx + f + Aeq'mu + A'nu - mult_lower + mult_upper|_inf,
/// primal max violation, dual max(0, -min multiplier), and
/// complementarity max_i |nu_i (Ax - b)_i| (bounds included).
pub fn kkt_residuals(prob: &QpProblem, sol: &QpSolution) -> KktResiduals {
    let p = prob.p();
    let mut stat = prob.h.dot(&sol.x) + &prob.f;
    if prob.aeq.nrows() > 0 {
        stat = stat + prob.aeq.t().dot(&sol.mult_eq);
    }
    if prob.a.nrows() > 0 {
        stat = stat + prob.a.t().dot(&sol.mult_ineq);
    }
    stat = stat - &sol.mult_lower + &sol.mult_upper;
    let stationarity = stat.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut primal = 0.0f64;
    if prob.aeq.nrows() > 0 {
        let r = prob.aeq.dot(&sol.x) - &prob.beq;
        primal = r.iter().fold(primal, |m, v| m.max(v.abs()));
    }
    let slack = if prob.a.nrows() > 0 {
        let s = prob.a.dot(&sol.x) - &prob.b;
        primal = s.iter().fold(primal, |m, v| m.max(*v));
        s
    } else {
        Array1::zeros(0)
    };
    for j in 0..p {
        if prob.lb[j].is_finite() {
            primal = primal.max(prob.lb[j] - sol.x[j]);
        }
        if prob.ub[j].is_finite() {
            primal = primal.max(sol.x[j] - prob.ub[j]);
        }
    }
    primal = primal.max(0.0);

    let mut dual = 0.0f64;
    for v in sol
        .mult_ineq
        .iter()
        .chain(sol.mult_lower.iter())
        .chain(sol.mult_upper.iter())
    {
        dual = dual.max(-v);
    }
    dual = dual.max(0.0);

    let mut compl = 0.0f64;
    for (i, s) in slack.iter().enumerate() {
        compl = compl.max((sol.mult_ineq[i] * s).abs());
    }
    for j in 0..p {
        if prob.lb[j].is_finite() {
            compl = compl.max((sol.mult_lower[j] * (prob.lb[j] - sol.x[j])).abs());
        }
        if prob.ub[j].is_finite() {
            compl = compl.max((sol.mult_upper[j] * (sol.x[j] - prob.ub[j])).abs());
        }
    }

    KktResiduals { stationarity, primal, dual, complementarity: compl }
}
