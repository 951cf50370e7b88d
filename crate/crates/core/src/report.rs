//! Human-readable scorecard reports and the machine-readable solution
//! file used for re-verification.
//!
//! Report: tab-delimited, one row per attribute with the characteristic
//! name, attribute label, 1-based attribute number, and each solution's
//! weight at 3 decimals; footer rows "Development Divergence" and
//! "Validation Divergence".
//!
//! Solution file: `key value` metadata lines, a blank line, then one
//! `index weight` line per attribute at full precision.

use std::path::Path;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::layout::ScorecardLayout;
use crate::problems::{ProblemKind, ScorecardSolution};

/// Render a report for one or more solutions over a shared layout.
pub fn render_report(solutions: &[&ScorecardSolution], layout: &ScorecardLayout) -> Result<String> {
    let p = layout.p();
    for sol in solutions {
        if sol.s.len() != p {
            return Err(Error::Dimension(format!(
                "solution has {} weights, layout has {p}",
                sol.s.len()
            )));
        }
    }
    let mut out = String::new();
    out.push_str("Char\tAttribute\tAtt. #");
    for sol in solutions {
        out.push('\t');
        out.push_str(sol.kind.as_str());
    }
    out.push('\n');

    let mut idx = 0usize;
    for ch in layout.characteristics() {
        for attr in &ch.attributes {
            idx += 1;
            out.push_str(&format!("{}\t{}\t{}", ch.name, attr, idx));
            for sol in solutions {
                out.push_str(&format!("\t{:.3}", sol.s[idx - 1]));
            }
            out.push('\n');
        }
    }

    out.push_str("Development Divergence\t\t");
    for sol in solutions {
        out.push_str(&format!("\t{:.3}", sol.div_dev));
    }
    out.push('\n');
    out.push_str("Validation Divergence\t\t");
    for sol in solutions {
        match sol.div_val {
            Some(v) => out.push_str(&format!("\t{v:.3}")),
            None => out.push_str("\t-"),
        }
    }
    out.push('\n');
    Ok(out)
}

pub fn write_report(
    solutions: &[&ScorecardSolution],
    layout: &ScorecardLayout,
    path: &Path,
) -> Result<()> {
    let text = render_report(solutions, layout)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Weight columns of a report, as parsed back (3-decimal precision).
pub fn parse_report_weights(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.starts_with("Development Divergence") || line.starts_with("Validation Divergence") {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(Error::Data(format!("report line {}: too few fields", i + 1)));
        }
        let weights = &fields[3..];
        if cols.is_empty() {
            cols = vec![Vec::new(); weights.len()];
        }
        for (c, w) in weights.iter().enumerate() {
            cols[c].push(
                w.parse()
                    .map_err(|_| Error::Data(format!("report line {}: bad weight '{w}'", i + 1)))?,
            );
        }
    }
    Ok(cols)
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "-".to_string(),
    }
}

/// Serialize a solution at full precision for later re-verification.
pub fn render_solution(sol: &ScorecardSolution) -> String {
    let mut out = String::new();
    out.push_str(&format!("problem {}\n", sol.kind));
    out.push_str(&format!("beta {}\n", sol.beta));
    out.push_str(&format!("phi_star {}\n", fmt_opt(sol.phi_star)));
    out.push_str(&format!("lambda {}\n", sol.lambda));
    out.push_str(&format!("delta {}\n", fmt_opt(sol.delta)));
    out.push_str(&format!("intercept {}\n", fmt_opt(sol.intercept)));
    out.push_str(&format!("woe_equivalent_beta {}\n", fmt_opt(sol.woe_equivalent_beta)));
    out.push_str(&format!("div_dev {}\n", sol.div_dev));
    out.push_str(&format!("div_val {}\n", fmt_opt(sol.div_val)));
    out.push('\n');
    for (i, w) in sol.s.iter().enumerate() {
        out.push_str(&format!("{} {}\n", i + 1, w));
    }
    out
}

pub fn write_solution(sol: &ScorecardSolution, path: &Path) -> Result<()> {
    std::fs::write(path, render_solution(sol))?;
    Ok(())
}

/// A solution file read back: metadata plus the weight vector.
#[derive(Debug, Clone)]
pub struct StoredSolution {
    pub kind: ProblemKind,
    pub beta: f64,
    pub phi_star: Option<f64>,
    pub lambda: f64,
    pub delta: Option<f64>,
    pub intercept: Option<f64>,
    pub woe_equivalent_beta: Option<f64>,
    pub div_dev: f64,
    pub div_val: Option<f64>,
    pub s: Array1<f64>,
}

fn parse_opt(v: &str, key: &str) -> Result<Option<f64>> {
    if v == "-" {
        return Ok(None);
    }
    v.parse()
        .map(Some)
        .map_err(|_| Error::Data(format!("solution file: bad value '{v}' for {key}")))
}

pub fn parse_solution(text: &str) -> Result<StoredSolution> {
    let mut kind = None;
    let mut beta = None;
    let mut phi_star = None;
    let mut lambda = None;
    let mut delta = None;
    let mut intercept = None;
    let mut woe_equivalent_beta = None;
    let mut div_dev = None;
    let mut div_val = None;
    let mut weights: Vec<(usize, f64)> = Vec::new();
    let mut in_weights = false;

    for (li, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            in_weights = true;
            continue;
        }
        let (a, b) = line
            .split_once(' ')
            .ok_or_else(|| Error::Data(format!("solution file line {}: expected 'key value'", li + 1)))?;
        if in_weights {
            let idx: usize = a
                .parse()
                .map_err(|_| Error::Data(format!("solution file line {}: bad index '{a}'", li + 1)))?;
            let w: f64 = b
                .parse()
                .map_err(|_| Error::Data(format!("solution file line {}: bad weight '{b}'", li + 1)))?;
            weights.push((idx, w));
        } else {
            match a {
                "problem" => kind = Some(b.parse::<ProblemKind>()?),
                "beta" => beta = parse_opt(b, a)?,
                "phi_star" => phi_star = parse_opt(b, a)?,
                "lambda" => lambda = parse_opt(b, a)?,
                "delta" => delta = parse_opt(b, a)?,
                "intercept" => intercept = parse_opt(b, a)?,
                "woe_equivalent_beta" => woe_equivalent_beta = parse_opt(b, a)?,
                "div_dev" => div_dev = parse_opt(b, a)?,
                "div_val" => div_val = parse_opt(b, a)?,
                other => {
                    return Err(Error::Data(format!(
                        "solution file line {}: unknown key '{other}'",
                        li + 1
                    )))
                }
            }
        }
    }

    let kind = kind.ok_or_else(|| Error::Data("solution file: missing 'problem'".into()))?;
    if weights.is_empty() {
        return Err(Error::Data("solution file: no weights".into()));
    }
    let mut s = Array1::zeros(weights.len());
    for (pos, (idx, w)) in weights.iter().enumerate() {
        if *idx != pos + 1 {
            return Err(Error::Data(format!(
                "solution file: weight index {idx} out of order (expected {})",
                pos + 1
            )));
        }
        s[pos] = *w;
    }
    Ok(StoredSolution {
        kind,
        beta: beta.ok_or_else(|| Error::Data("solution file: missing 'beta'".into()))?,
        phi_star,
        lambda: lambda.ok_or_else(|| Error::Data("solution file: missing 'lambda'".into()))?,
        delta,
        intercept,
        woe_equivalent_beta,
        div_dev: div_dev.ok_or_else(|| Error::Data("solution file: missing 'div_dev'".into()))?,
        div_val,
        s,
    })
}

pub fn load_solution(path: &Path) -> Result<StoredSolution> {
    let text = std::fs::read_to_string(path)?;
    parse_solution(&text)
}
