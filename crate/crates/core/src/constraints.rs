//! Assembly of the score-engineering constraint matrices: the equality
//! block Ac (centering, no-inform, restrictions), the pattern inequality
//! block Ap, the in-weight block Ai with its target vector IW, and bounds.
//!
//! Sign conventions: Ac·S = 0, Ap·S <= 0, Ai·S = IW.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::layout::{EngineeringSpec, IndexMap, PatternSense};
use crate::moments::MomentSet;

#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub ac: Array2<f64>,
    pub ap: Array2<f64>,
    pub ai: Array2<f64>,
    pub iw: Array1<f64>,
    pub lb: Array1<f64>,
    pub ub: Array1<f64>,
    pub warnings: Vec<String>,
}

impl ConstraintSet {
    pub fn p(&self) -> usize {
        self.ac.ncols()
    }

    /// Constraint set with zero rows everywhere and infinite bounds.
    pub fn empty(p: usize) -> Self {
        ConstraintSet {
            ac: Array2::zeros((0, p)),
            ap: Array2::zeros((0, p)),
            ai: Array2::zeros((0, p)),
            iw: Array1::zeros(0),
            lb: Array1::from_elem(p, f64::NEG_INFINITY),
            ub: Array1::from_elem(p, f64::INFINITY),
            warnings: Vec::new(),
        }
    }

    /// Same set with the in-weight rows removed.
    pub fn without_inweights(&self) -> Self {
        let mut cs = self.clone();
        cs.ai = Array2::zeros((0, self.p()));
        cs.iw = Array1::zeros(0);
        cs
    }
}

/// One centering row per characteristic: entry e[k] on the
/// characteristic's index range, zero elsewhere. A characteristic whose
/// `e` segment is all zero still gets its (vacuous) row, plus a warning.
pub fn centering_rows(e: &Array1<f64>, map: &IndexMap) -> (Array2<f64>, Vec<String>) {
    let p = e.len();
    let n = map.low.len();
    let mut rows = Array2::zeros((n, p));
    let mut warnings = Vec::new();
    for c in 0..n {
        let mut vacuous = true;
        for k in map.low[c]..=map.high[c] {
            rows[[c, k - 1]] = e[k - 1];
            if e[k - 1] != 0.0 {
                vacuous = false;
            }
        }
        if vacuous {
            warnings.push(format!(
                "centering row for characteristic {} is vacuous (e segment all zero)",
                c + 1
            ));
        }
    }
    (rows, warnings)
}

/// One unit row per characteristic at its no-inform (last) index.
pub fn noinform_rows(map: &IndexMap, p: usize) -> Array2<f64> {
    let n = map.high.len();
    let mut rows = Array2::zeros((n, p));
    for c in 0..n {
        rows[[c, map.high[c] - 1]] = 1.0;
    }
    rows
}

/// Fix rows (unit row at each fixed index) followed by equality rows
/// (+1 at i, -1 at j for each pair).
pub fn restriction_rows(fixes: &[usize], equalities: &[(usize, usize)], p: usize) -> Array2<f64> {
    let mut rows = Array2::zeros((fixes.len() + equalities.len(), p));
    for (r, &t) in fixes.iter().enumerate() {
        rows[[r, t - 1]] = 1.0;
    }
    for (r, &(i, j)) in equalities.iter().enumerate() {
        let r = fixes.len() + r;
        rows[[r, i - 1]] = 1.0;
        rows[[r, j - 1]] = -1.0;
    }
    rows
}

/// Pattern rows with right-hand side 0. Sense S_j <= S_k emits +1 at j,
/// -1 at k; sense S_j >= S_k emits -1 at j, +1 at k, so Ap·S <= 0 is the
/// feasibility test either way. Duplicate rows are kept but flagged.
pub fn pattern_rows(
    patterns: &[crate::layout::Pattern],
    p: usize,
) -> (Array2<f64>, Vec<String>) {
    let mut rows = Array2::zeros((patterns.len(), p));
    let mut warnings = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (r, pat) in patterns.iter().enumerate() {
        let (cj, ck) = match pat.sense {
            PatternSense::Leq => (1.0, -1.0),
            PatternSense::Geq => (-1.0, 1.0),
        };
        rows[[r, pat.j - 1]] = cj;
        rows[[r, pat.k - 1]] = ck;
        if !seen.insert((pat.j, pat.k, pat.sense)) {
            warnings.push(format!(
                "duplicate pattern row {} ({} vs {}); redundant row kept",
                r + 1,
                pat.j,
                pat.k
            ));
        }
    }
    (rows, warnings)
}

/// In-weight rows: unit row per target index with its value in IW.
/// Duplicate indices are an error.
pub fn inweight_rows(
    inweights: &[crate::layout::InWeight],
    p: usize,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let mut seen = std::collections::BTreeSet::new();
    for iw in inweights {
        if !seen.insert(iw.index) {
            return Err(Error::InvalidSpec(format!(
                "duplicate in-weight index {}",
                iw.index
            )));
        }
    }
    let mut rows = Array2::zeros((inweights.len(), p));
    let mut vals = Array1::zeros(inweights.len());
    for (r, iw) in inweights.iter().enumerate() {
        rows[[r, iw.index - 1]] = 1.0;
        vals[r] = iw.value;
    }
    Ok((rows, vals))
}

fn stack_rows(blocks: &[Array2<f64>], p: usize) -> Array2<f64> {
    let m: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Array2::zeros((m, p));
    let mut r = 0;
    for b in blocks {
        for row in b.rows() {
            out.row_mut(r).assign(&row);
            r += 1;
        }
    }
    out
}

/// Assemble the full ConstraintSet. Ac stacks centering rows, then
/// no-inform rows, then restriction rows.
pub fn assemble(spec: &EngineeringSpec, m: &MomentSet, map: &IndexMap) -> Result<ConstraintSet> {
    let p = m.p();
    let mut warnings = Vec::new();
    let mut ac_blocks = Vec::new();
    if spec.centering {
        let (rows, w) = centering_rows(&m.e, map);
        warnings.extend(w);
        ac_blocks.push(rows);
    }
    if spec.noinform {
        ac_blocks.push(noinform_rows(map, p));
    }
    ac_blocks.push(restriction_rows(&spec.fixes, &spec.equalities, p));
    let ac = stack_rows(&ac_blocks, p);

    let (ap, w) = pattern_rows(&spec.patterns, p);
    warnings.extend(w);
    let (ai, iw) = inweight_rows(&spec.inweights, p)?;

    let mut lb = Array1::from_elem(p, f64::NEG_INFINITY);
    let mut ub = Array1::from_elem(p, f64::INFINITY);
    for b in &spec.bounds {
        if let Some(l) = b.lower {
            lb[b.index - 1] = l;
        }
        if let Some(u) = b.upper {
            ub[b.index - 1] = u;
        }
    }
    Ok(ConstraintSet { ac, ap, ai, iw, lb, ub, warnings })
}
