//! End-to-end acceptance gate for the solver library. Each numbered check
//! prints one PASS/FAIL line; the test fails if any check fails.

use ndarray::{s, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scoreng::constraints::{assemble, ConstraintSet};
use scoreng::data::{generate_synthetic, SynthOptions};
use scoreng::fixtures::{
    fraud_layout, fraud_range_targets, fraud_spec, FRAUD_DELTA, FRAUD_LAMBDA,
};
use scoreng::layout::build_index_map;
use scoreng::linalg;
use scoreng::moments::MomentSet;
use scoreng::problems::{
    solve_classic, solve_inweight, solve_penalized, solve_range, solve_regression, RangeTargets,
};
use scoreng::qp::{solve_qp, QpProblem, QpStatus};

fn norm_inf(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn woe_gap(s: &Array1<f64>, m: &MomentSet) -> f64 {
    let scs = s.dot(&m.c.dot(s));
    let ds = m.d.dot(s);
    (scs - ds).abs() / ds.abs().max(1.0)
}

/// Random convex QP with a known strictly feasible point.
fn random_qp(rng: &mut ChaCha8Rng, p: usize, n_eq: usize, n_ineq: usize, bounds: bool) -> QpProblem {
    let g = Array2::from_shape_fn((p + 2, p), |_| rng.gen_range(-1.0f64..1.0));
    let mut h = g.t().dot(&g);
    for i in 0..p {
        h[[i, i]] += 0.1;
    }
    let f = Array1::from_shape_fn(p, |_| rng.gen_range(-1.0f64..1.0));
    let xf = Array1::from_shape_fn(p, |_| rng.gen_range(-0.5f64..0.5));
    let aeq = Array2::from_shape_fn((n_eq, p), |_| rng.gen_range(-1.0f64..1.0));
    let beq = aeq.dot(&xf);
    let a = Array2::from_shape_fn((n_ineq, p), |_| rng.gen_range(-1.0f64..1.0));
    let b = a.dot(&xf) + &Array1::from_shape_fn(n_ineq, |_| rng.gen_range(0.1f64..1.0));
    let (lb, ub) = if bounds {
        (
            Array1::from_shape_fn(p, |i| xf[i] - rng.gen_range(0.5f64..2.0)),
            Array1::from_shape_fn(p, |i| xf[i] + rng.gen_range(0.5f64..2.0)),
        )
    } else {
        (
            Array1::from_elem(p, f64::NEG_INFINITY),
            Array1::from_elem(p, f64::INFINITY),
        )
    };
    QpProblem { h, f, aeq, beq, a, b, lb, ub }
}

fn objective(prob: &QpProblem, x: &Array1<f64>) -> f64 {
    0.5 * x.dot(&prob.h.dot(x)) + prob.f.dot(x)
}

/// 1. Solver KKT residuals on random convex programs; equality-only
/// instances must match a direct dense KKT solve.
fn qp_kernel(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let started = std::time::Instant::now();
    for case in 0..100 {
        let p = rng.gen_range(2..=20usize);
        let eq_only = case % 4 == 0;
        let n_eq = rng.gen_range(0..=(p / 2).min(3));
        let (n_ineq, bounds) = if eq_only { (0, false) } else { (rng.gen_range(0..=4usize), case % 2 == 0) };
        let prob = random_qp(rng, p, n_eq, n_ineq, bounds);
        let sol = solve_qp(&prob, None).map_err(|e| format!("case {case}: {e}"))?;
        if sol.status != QpStatus::Optimal {
            return Err(format!("case {case}: status {:?}", sol.status));
        }
        if sol.kkt.max() > 1e-6 {
            return Err(format!("case {case}: KKT residual {:.3e}", sol.kkt.max()));
        }
        if eq_only {
            let n = p + n_eq;
            let mut kkt = Array2::zeros((n, n));
            kkt.slice_mut(s![..p, ..p]).assign(&prob.h);
            if n_eq > 0 {
                kkt.slice_mut(s![..p, p..]).assign(&prob.aeq.t());
                kkt.slice_mut(s![p.., ..p]).assign(&prob.aeq);
            }
            let mut rhs = Array1::zeros(n);
            rhs.slice_mut(s![..p]).assign(&prob.f.mapv(|v| -v));
            rhs.slice_mut(s![p..]).assign(&prob.beq);
            let direct = linalg::solve(&kkt.view(), &rhs.view())
                .map_err(|e| format!("case {case}: direct solve: {e}"))?;
            let xd = direct.slice(s![..p]).to_owned();
            let err = norm_inf(&(&sol.x - &xd)) / (1.0 + norm_inf(&xd));
            if err > 1e-8 {
                return Err(format!("case {case}: direct-solve gap {err:.3e}"));
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        return Err(format!("took {elapsed:?}, budget 5 s"));
    }
    Ok(())
}

/// 2. Solver objective beats a dense feasible grid on tiny instances.
fn brute_force(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..20 {
        let p = 3;
        let g = Array2::from_shape_fn((p, p), |_| rng.gen_range(-1.0f64..1.0));
        let mut h = g.t().dot(&g);
        for i in 0..p {
            h[[i, i]] += 0.2;
        }
        let f = Array1::from_shape_fn(p, |_| rng.gen_range(-1.0f64..1.0));
        // up to three ordering rows x_j <= x_k, always feasible at 0
        let n_pat = rng.gen_range(0..=3usize);
        let mut a = Array2::zeros((n_pat, p));
        for r in 0..n_pat {
            let j = rng.gen_range(0..p);
            let mut k = rng.gen_range(0..p);
            if k == j {
                k = (j + 1) % p;
            }
            a[[r, j]] = 1.0;
            a[[r, k]] = -1.0;
        }
        let prob = QpProblem {
            h,
            f,
            aeq: Array2::zeros((0, p)),
            beq: Array1::zeros(0),
            a,
            b: Array1::zeros(n_pat),
            lb: Array1::from_elem(p, -1.0),
            ub: Array1::from_elem(p, 1.0),
        };
        let sol = solve_qp(&prob, None).map_err(|e| format!("case {case}: {e}"))?;
        if sol.status != QpStatus::Optimal {
            return Err(format!("case {case}: status {:?}", sol.status));
        }
        let obj = objective(&prob, &sol.x);
        let mut best = f64::INFINITY;
        let steps = 100usize; // 100^3 = 1e6 grid points
        let coord = |i: usize| -1.0 + 2.0 * i as f64 / (steps - 1) as f64;
        let mut x = Array1::zeros(p);
        for i in 0..steps {
            x[0] = coord(i);
            for j in 0..steps {
                x[1] = coord(j);
                for k in 0..steps {
                    x[2] = coord(k);
                    if prob.a.dot(&x).iter().all(|&v| v <= 1e-12) {
                        let o = objective(&prob, &x);
                        if o < best {
                            best = o;
                        }
                    }
                }
            }
        }
        if obj > best + 1e-6 {
            return Err(format!("case {case}: solver {obj:.9} vs grid {best:.9}"));
        }
    }
    Ok(())
}

/// 3. The rescaled solution is invariant to the interim scale target.
fn delta_invariance(m: &MomentSet, cs: &ConstraintSet) -> Result<(), String> {
    let mut sols = Vec::new();
    for delta in [0.5, FRAUD_DELTA, 3.0] {
        let sol = solve_classic(m, cs, delta).map_err(|e| format!("delta {delta}: {e}"))?;
        sols.push(sol.s);
    }
    for s in sols.iter().skip(1) {
        let gap = norm_inf(&(s - &sols[0]));
        if gap > 1e-6 {
            return Err(format!("weights differ by {gap:.3e} between scale targets"));
        }
    }
    Ok(())
}

/// 8. Regression equals the closed-form ridge solve; the intercept is
/// unpenalized and absorbs response shifts.
fn regression_checks(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = 60;
    let p = 4;
    let rows = Array2::from_shape_fn((n, p), |_| rng.gen_range(-1.0f64..1.0));
    let y = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0f64..1.0));
    let lambda = 0.3;
    let cs = ConstraintSet::empty(p);
    let sol = solve_regression(&rows.view(), &y, &cs, lambda, None)
        .map_err(|e| format!("regression: {e}"))?;

    // closed form on [1 X] with the intercept's diagonal unpenalized
    let pr = p + 1;
    let mut xr = Array2::ones((n, pr));
    xr.slice_mut(s![.., 1..]).assign(&rows);
    let mut gram = xr.t().dot(&xr).mapv(|v| 2.0 * v);
    let ridge = 2.0 * lambda / p as f64;
    for i in 1..pr {
        gram[[i, i]] += ridge;
    }
    let rhs = xr.t().dot(&y).mapv(|v| 2.0 * v);
    let direct = linalg::solve(&gram.view(), &rhs.view()).map_err(|e| e.to_string())?;
    let intercept = sol.intercept.ok_or("missing intercept")?;
    let gap = (intercept - direct[0]).abs().max(norm_inf(
        &(&sol.s - &direct.slice(s![1..]).to_owned()),
    ));
    if gap > 1e-8 {
        return Err(format!("closed-form gap {gap:.3e}"));
    }

    // shifting y moves only the intercept
    let shift = 2.75;
    let sol2 = solve_regression(&rows.view(), &y.mapv(|v| v + shift), &cs, lambda, None)
        .map_err(|e| format!("shifted regression: {e}"))?;
    let w_gap = norm_inf(&(&sol2.s - &sol.s));
    let i_gap = (sol2.intercept.unwrap() - intercept - shift).abs();
    if w_gap > 1e-8 || i_gap > 1e-8 {
        return Err(format!("shift test: weights moved {w_gap:.3e}, intercept off {i_gap:.3e}"));
    }

    // constant response: intercept c, zero weights
    let c = -1.25;
    let sol3 = solve_regression(&rows.view(), &Array1::from_elem(n, c), &cs, lambda, None)
        .map_err(|e| format!("constant regression: {e}"))?;
    if (sol3.intercept.unwrap() - c).abs() > 1e-8 || norm_inf(&sol3.s) > 1e-8 {
        return Err("constant response did not give (c, 0)".into());
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let layout = fraud_layout();
    let spec = fraud_spec();
    let map = build_index_map(&layout);
    let ds = generate_synthetic(
        &layout,
        &SynthOptions { n: 9907, seed: 20260826, ..Default::default() },
    )
    .expect("synthetic data");
    let m = ds.moments().expect("moments");
    let cs = assemble(&spec, &m, &map).expect("constraint assembly");
    let csc = cs.without_inweights();
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let mut failures = Vec::new();
    let mut run = |label: &str, result: Result<(), String>| match result {
        Ok(()) => println!("[{label}] PASS"),
        Err(msg) => {
            println!("[{label}] FAIL: {msg}");
            failures.push(format!("{label}: {msg}"));
        }
    };

    run(" 1/11 qp kernel kkt + direct-solve match", qp_kernel(&mut rng));
    run(" 2/11 brute-force grid optimality", brute_force(&mut rng));
    run(" 3/11 scale-target invariance", delta_invariance(&m, &csc));

    // shared solves for the weight-of-evidence and ordering checks
    let classic = solve_classic(&m, &csc, FRAUD_DELTA);
    let penalized = solve_penalized(&m, &csc, FRAUD_DELTA, FRAUD_LAMBDA);
    let inweight = solve_inweight(&m, &cs, FRAUD_LAMBDA, None);
    let classic_div = classic.as_ref().map(|s| s.div_dev).unwrap_or(f64::NAN);
    let floor = 0.8 * classic_div;
    let range = solve_range(&m, &cs, FRAUD_LAMBDA, &fraud_range_targets(), floor, None);

    run(
        " 4/11 weight-of-evidence identity",
        (|| {
            for (name, sol) in [
                ("classic", &classic),
                ("penalized", &penalized),
                ("inweight", &inweight),
                ("range", &range),
            ] {
                let sol = sol.as_ref().map_err(|e| format!("{name}: {e}"))?;
                let gap = woe_gap(&sol.s, &m);
                if gap > 1e-6 {
                    return Err(format!("{name}: |S'CS - d'S| gap {gap:.3e}"));
                }
            }
            Ok(())
        })(),
    );
    run(
        " 5/11 penalty continuity and divergence ordering",
        (|| {
            let classic = classic.as_ref().map_err(|e| e.to_string())?;
            let tiny = solve_penalized(&m, &csc, FRAUD_DELTA, 1e-8).map_err(|e| e.to_string())?;
            let gap = norm_inf(&(&tiny.s - &classic.s));
            if gap > 1e-4 {
                return Err(format!("lambda->0 gap {gap:.3e}"));
            }
            let pen = penalized.as_ref().map_err(|e| e.to_string())?;
            if pen.div_dev > classic.div_dev + 1e-9 {
                return Err(format!(
                    "penalized divergence {:.6} above classic {:.6}",
                    pen.div_dev, classic.div_dev
                ));
            }
            Ok(())
        })(),
    );
    run(
        " 6/11 in-weighting pins, root quality, classic limit",
        (|| {
            let sol = inweight.as_ref().map_err(|e| e.to_string())?;
            let pin_gap = norm_inf(&(&cs.ai.dot(&sol.s) - &cs.iw));
            if pin_gap > 1e-9 {
                return Err(format!("pinned weights off by {pin_gap:.3e}"));
            }
            let ds = m.d.dot(&sol.s);
            let g = sol.s.dot(&m.c.dot(&sol.s)) - ds;
            if g.abs() > 1e-3 * ds.abs().max(1.0) {
                return Err(format!("|g(phi*)| = {:.3e}", g.abs()));
            }
            let classic = classic.as_ref().map_err(|e| e.to_string())?;
            let free = solve_inweight(&m, &csc, 0.0, None).map_err(|e| e.to_string())?;
            let gap = norm_inf(&(&free.s - &classic.s));
            if gap > 1e-5 {
                return Err(format!("empty-pin solution differs from classic by {gap:.3e}"));
            }
            if sol.div_dev > classic.div_dev + 1e-9 {
                return Err(format!(
                    "in-weighted divergence {:.6} above classic {:.6}",
                    sol.div_dev, classic.div_dev
                ));
            }
            Ok(())
        })(),
    );
    run(
        " 7/11 range floor and classic-target recovery",
        (|| {
            let sol = range.as_ref().map_err(|e| e.to_string())?;
            if sol.div_dev < floor - 1e-6 {
                return Err(format!("divergence {:.6} below floor {floor:.6}", sol.div_dev));
            }
            let classic = classic.as_ref().map_err(|e| e.to_string())?;
            let targets = RangeTargets {
                r: Array1::ones(m.p()),
                t: classic.s.clone(),
            };
            let back = solve_range(&m, &csc, 0.0, &targets, 0.9 * classic.div_dev, None)
                .map_err(|e| e.to_string())?;
            let gap = norm_inf(&(&back.s - &classic.s));
            if gap > 1e-4 {
                return Err(format!("classic-target solution off by {gap:.3e}"));
            }
            Ok(())
        })(),
    );
    run(" 8/11 regression closed form and intercept handling", regression_checks(&mut rng));
    run(
        " 9/11 full-scale solve under 10 s",
        (|| {
            let started = std::time::Instant::now();
            let m9 = ds.moments().map_err(|e| e.to_string())?;
            let cs9 = assemble(&spec, &m9, &map).map_err(|e| e.to_string())?;
            let p = m9.p();
            let n_eq = 1 + cs9.ac.nrows() + cs9.ai.nrows();
            let mut aeq = Array2::zeros((n_eq, p));
            aeq.row_mut(0).assign(&m9.d);
            aeq.slice_mut(s![1..1 + cs9.ac.nrows(), ..]).assign(&cs9.ac);
            aeq.slice_mut(s![1 + cs9.ac.nrows().., ..]).assign(&cs9.ai);
            let mut beq = Array1::zeros(n_eq);
            beq[0] = FRAUD_DELTA;
            beq.slice_mut(s![1 + cs9.ac.nrows()..]).assign(&cs9.iw);
            let prob = QpProblem {
                h: m9.c.mapv(|v| 2.0 * v),
                f: Array1::zeros(p),
                aeq,
                beq,
                a: cs9.ap.clone(),
                b: Array1::zeros(cs9.ap.nrows()),
                lb: cs9.lb.clone(),
                ub: cs9.ub.clone(),
            };
            let sol = solve_qp(&prob, None).map_err(|e| e.to_string())?;
            if sol.status != QpStatus::Optimal {
                return Err(format!("status {:?}", sol.status));
            }
            let elapsed = started.elapsed();
            if elapsed.as_secs_f64() >= 10.0 {
                return Err(format!("took {elapsed:?}, budget 10 s"));
            }
            Ok(())
        })(),
    );

    assert!(failures.is_empty(), "acceptance failures:\n{}", failures.join("\n"));
}
