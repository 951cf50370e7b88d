//! Class-conditional score moments, divergence, and the
//! weight-of-evidence rescaling.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

const VARIANCE_TOL: f64 = 1e-12;

/// Means and covariances of the indicator data by class, with the pooled
/// covariance `c = (cg + cb) / 2`, mean-difference `d = mg - mb`, and
/// centering weights `e = mg + mb`.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub mg: Array1<f64>,
    pub mb: Array1<f64>,
    pub cg: Array2<f64>,
    pub cb: Array2<f64>,
    pub c: Array2<f64>,
    pub d: Array1<f64>,
    pub e: Array1<f64>,
    pub n_g: f64,
    pub n_b: f64,
}

impl MomentSet {
    pub fn p(&self) -> usize {
        self.d.len()
    }
}

/// Weight-of-evidence rescaling of a weight vector: `w = beta * t` with
/// `beta = d't / t'Ct`, so that `w'Cw = d'w`.
#[derive(Debug, Clone)]
pub struct WoeScaling {
    pub beta: f64,
    pub w: Array1<f64>,
}

fn class_moments(
    rows: &ArrayView2<f64>,
    weights: Option<&Array1<f64>>,
    class: &str,
) -> Result<(Array1<f64>, Array2<f64>, f64)> {
    let n = rows.nrows();
    let p = rows.ncols();
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::Dimension(format!(
                "{class}: {n} rows but {} weights",
                w.len()
            )));
        }
        if w.iter().any(|&x| x < 0.0) {
            return Err(Error::DegenerateClass {
                class: class.into(),
                reason: "negative observation weight".into(),
            });
        }
    }
    let wsum: f64 = match weights {
        Some(w) => w.sum(),
        None => n as f64,
    };
    if wsum <= 0.0 {
        return Err(Error::DegenerateClass {
            class: class.into(),
            reason: "all observation weights are zero".into(),
        });
    }
    // Frequency-weight semantics: the covariance divisor is (sum w) - 1,
    // the unbiased (count - 1) divisor in the unweighted case.
    if wsum < 2.0 {
        return Err(Error::DegenerateClass {
            class: class.into(),
            reason: format!("needs >= 2 effective rows, has {wsum}"),
        });
    }
    let mut mean = Array1::<f64>::zeros(p);
    for (i, row) in rows.rows().into_iter().enumerate() {
        let w = weights.map_or(1.0, |v| v[i]);
        mean.scaled_add(w, &row);
    }
    mean.mapv_inplace(|x| x / wsum);

    // cov = Xc' W Xc / (wsum - 1)
    let mut centered = rows.to_owned();
    for mut row in centered.rows_mut() {
        row -= &mean;
    }
    let weighted = match weights {
        Some(w) => {
            let mut m = centered.clone();
            for (i, mut row) in m.rows_mut().into_iter().enumerate() {
                row.mapv_inplace(|x| x * w[i]);
            }
            m
        }
        None => centered.clone(),
    };
    let mut cov = centered.t().dot(&weighted);
    cov.mapv_inplace(|x| x / (wsum - 1.0));
    // enforce exact symmetry
    for i in 0..p {
        for j in (i + 1)..p {
            let s = 0.5 * (cov[[i, j]] + cov[[j, i]]);
            cov[[i, j]] = s;
            cov[[j, i]] = s;
        }
    }
    Ok((mean, cov, wsum))
}

/// Compute the MomentSet from good/bad indicator rows. Weights, when
/// given, are frequency weights: a row with weight 2 is equivalent to the
/// same row duplicated.
pub fn compute_moments(
    goods: &ArrayView2<f64>,
    bads: &ArrayView2<f64>,
    good_weights: Option<&Array1<f64>>,
    bad_weights: Option<&Array1<f64>>,
) -> Result<MomentSet> {
    if goods.ncols() != bads.ncols() {
        return Err(Error::Dimension(format!(
            "goods have {} columns, bads {}",
            goods.ncols(),
            bads.ncols()
        )));
    }
    let (mg, cg, n_g) = class_moments(goods, good_weights, "good")?;
    let (mb, cb, n_b) = class_moments(bads, bad_weights, "bad")?;
    let c = (&cg + &cb) * 0.5;
    let d = &mg - &mb;
    let e = &mg + &mb;
    Ok(MomentSet { mg, mb, cg, cb, c, d, e, n_g, n_b })
}

/// Divergence (d'S)^2 / (S'CS) of the score defined by weights `s`.
pub fn divergence(s: &ArrayView1<f64>, m: &MomentSet) -> Result<f64> {
    let scs = s.dot(&m.c.dot(s));
    if scs <= VARIANCE_TOL {
        return Err(Error::ZeroVariance);
    }
    let ds = m.d.dot(s);
    Ok(ds * ds / scs)
}

/// Rescale `t` to the weight-of-evidence scale. Requires d't > 0: a
/// non-positive value would flip or annihilate the score.
pub fn woe_scale(t: &ArrayView1<f64>, m: &MomentSet) -> Result<WoeScaling> {
    let tct = t.dot(&m.c.dot(t));
    if tct <= VARIANCE_TOL {
        return Err(Error::ZeroVariance);
    }
    let dt = m.d.dot(t);
    if dt <= 0.0 {
        return Err(Error::WoeSign { dt });
    }
    let beta = dt / tct;
    Ok(WoeScaling { beta, w: t.mapv(|x| beta * x) })
}

/// True iff `s` satisfies the weight-of-evidence identity
/// |S'CS - d'S| <= tol * max(1, |d'S|).
pub fn check_woe(s: &ArrayView1<f64>, m: &MomentSet, tol: f64) -> bool {
    let scs = s.dot(&m.c.dot(s));
    let ds = m.d.dot(s);
    (scs - ds).abs() <= tol * ds.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn identity_moments(d: Array1<f64>) -> MomentSet {
        let p = d.len();
        let c = Array2::eye(p);
        MomentSet {
            mg: d.clone(),
            mb: Array1::zeros(p),
            cg: c.clone(),
            cb: c.clone(),
            c,
            e: d.clone(),
            d,
            n_g: 2.0,
            n_b: 2.0,
        }
    }

    #[test]
    fn hand_computed_moments() {
        let goods = array![[1.0, 0.0], [0.0, 1.0]];
        let bads = array![[1.0, 0.0], [1.0, 0.0]];
        let m = compute_moments(&goods.view(), &bads.view(), None, None).unwrap();
        assert_abs_diff_eq!(m.mg[0], 0.5);
        assert_abs_diff_eq!(m.mg[1], 0.5);
        assert_abs_diff_eq!(m.mb[0], 1.0);
        assert_abs_diff_eq!(m.mb[1], 0.0);
        assert_abs_diff_eq!(m.d[0], -0.5);
        assert_abs_diff_eq!(m.d[1], 0.5);
        assert_abs_diff_eq!(m.e[0], 1.5);
        assert_abs_diff_eq!(m.e[1], 0.5);
        assert!(m.cb.iter().all(|&v| v == 0.0));
        // unbiased divisor: cov of {(1,0),(0,1)} is [[.5,-.5],[-.5,.5]]
        assert_abs_diff_eq!(m.cg[[0, 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.cg[[0, 1]], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn identical_classes_give_zero_d() {
        let rows = array![[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        let m = compute_moments(&rows.view(), &rows.view(), None, None).unwrap();
        assert!(m.d.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn frequency_weight_matches_duplicated_row() {
        let goods_w = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let w = array![2.0, 1.0, 1.0];
        let goods_dup = array![
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0]
        ];
        let bads = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let a = compute_moments(&goods_w.view(), &bads.view(), Some(&w), None).unwrap();
        let b = compute_moments(&goods_dup.view(), &bads.view(), None, None).unwrap();
        for (x, y) in a.mg.iter().zip(b.mg.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        for (x, y) in a.cg.iter().zip(b.cg.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_class_errors() {
        let one = array![[1.0, 0.0]];
        let two = array![[1.0, 0.0], [0.0, 1.0]];
        assert!(compute_moments(&one.view(), &two.view(), None, None).is_err());
        let wz = array![0.0, 0.0];
        assert!(compute_moments(&two.view(), &two.view(), Some(&wz), None).is_err());
    }

    #[test]
    fn divergence_identity_case() {
        let m = identity_moments(array![1.0, 0.0]);
        let s = array![1.0, 0.0];
        assert_abs_diff_eq!(divergence(&s.view(), &m).unwrap(), 1.0);
    }

    #[test]
    fn divergence_scale_invariant() {
        let m = identity_moments(array![0.7, -0.2, 0.4]);
        let s = array![1.0, 2.0, -0.5];
        let d1 = divergence(&s.view(), &m).unwrap();
        let s7 = s.mapv(|x| 7.0 * x);
        let d2 = divergence(&s7.view(), &m).unwrap();
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-10 * d1.abs());
    }

    #[test]
    fn divergence_rejects_zero_variance() {
        let mut m = identity_moments(array![1.0, 1.0]);
        m.c = Array2::zeros((2, 2));
        let s = array![1.0, 1.0];
        assert!(matches!(divergence(&s.view(), &m), Err(Error::ZeroVariance)));
    }

    #[test]
    fn woe_scale_by_hand() {
        let m = identity_moments(array![1.0, 1.0]);
        let t = array![2.0, 2.0];
        let sc = woe_scale(&t.view(), &m).unwrap();
        assert_abs_diff_eq!(sc.beta, 0.5);
        assert_abs_diff_eq!(sc.w[0], 1.0);
        assert_abs_diff_eq!(sc.w[1], 1.0);
        let wcw = sc.w.dot(&m.c.dot(&sc.w));
        assert_abs_diff_eq!(wcw, m.d.dot(&sc.w), epsilon = 1e-14);
    }

    #[test]
    fn woe_scale_fixed_point_and_idempotence() {
        let m = identity_moments(array![1.0, 1.0]);
        let t = array![1.0, 1.0]; // t'Ct = 2 = d't
        let sc = woe_scale(&t.view(), &m).unwrap();
        assert_abs_diff_eq!(sc.beta, 1.0, epsilon = 1e-14);
        let again = woe_scale(&sc.w.view(), &m).unwrap();
        assert_abs_diff_eq!(again.beta, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn woe_scale_rejects_orthogonal_direction() {
        let m = identity_moments(array![1.0, -1.0]);
        let t = array![1.0, 1.0]; // d't = 0
        assert!(matches!(woe_scale(&t.view(), &m), Err(Error::WoeSign { .. })));
    }

    #[test]
    fn check_woe_cases() {
        let m = identity_moments(array![1.0, 1.0]);
        let zero = Array1::zeros(2);
        assert!(check_woe(&zero.view(), &m, 1e-8));
        let w = woe_scale(&array![3.0, 1.0].view(), &m).unwrap().w;
        assert!(check_woe(&w.view(), &m, 1e-8));
        let w2 = w.mapv(|x| 2.0 * x);
        assert!(!check_woe(&w2.view(), &m, 1e-8));
    }
}
