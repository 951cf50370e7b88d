//! Run configuration: a versioned TOML file carrying the scorecard
//! layout, engineering spec, problem parameters, and the dev/val split
//! rule.
//!
//! Schema (version 1):
//!
//! ```toml
//! schema_version = 1
//!
//! [problem]
//! kind = "classic"        # classic | penalized | inweight | range | regression
//! delta = 1.753           # classic/penalized scale target
//! lambda = 0.095          # ridge penalty
//! div_floor = 1.64        # range: divergence lower bound
//! phi_bracket = [0.01, 4.0]
//!
//! [split]
//! validation_keys = [1, 4, 8]
//!
//! [[layout]]
//! name = "age"
//! attributes = ["lt30", "30to50", "gt50"]
//!
//! [engineering]
//! fixes = [1]
//! equalities = [[2, 3]]
//!
//! [[engineering.patterns]]
//! j = 2
//! k = 3
//! sense = "leq"           # leq: S_j <= S_k; geq: S_j >= S_k
//!
//! [[engineering.inweights]]
//! index = 2
//! value = 0.5
//!
//! [[range_targets]]       # sparse; omitted weights get r = 0, t = 0
//! index = 1
//! r = 1.0
//! t = 0.15
//! ```

use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Characteristic, EngineeringSpec, ScorecardLayout};
use crate::problems::{ProblemKind, RangeTargets, DEFAULT_DELTA, DEFAULT_PHI_BRACKET};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: String,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub div_floor: Option<f64>,
    pub phi_bracket: Option<(f64, f64)>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            kind: "classic".into(),
            delta: None,
            lambda: None,
            div_floor: None,
            phi_bracket: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default)]
    pub validation_keys: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeEntry {
    /// 1-based weight index.
    pub index: usize,
    pub r: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub split: SplitConfig,
    pub layout: Vec<Characteristic>,
    #[serde(default)]
    pub engineering: EngineeringSpec,
    #[serde(default)]
    pub range_targets: Vec<RangeEntry>,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text =
            toml::to_string_pretty(self).map_err(|e| Error::Config(format!("serialize: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn scorecard_layout(&self) -> Result<ScorecardLayout> {
        ScorecardLayout::new(self.layout.clone())
    }

    pub fn problem_kind(&self) -> Result<ProblemKind> {
        self.problem.kind.parse()
    }

    /// Dense R/T vectors from the sparse entries.
    pub fn range_targets(&self, p: usize) -> Result<RangeTargets> {
        let mut r = Array1::zeros(p);
        let mut t = Array1::zeros(p);
        for e in &self.range_targets {
            if e.index == 0 || e.index > p {
                return Err(Error::Config(format!(
                    "range target index {} out of range 1..={p}",
                    e.index
                )));
            }
            r[e.index - 1] = e.r;
            t[e.index - 1] = e.t;
        }
        Ok(RangeTargets { r, t })
    }

    pub fn delta(&self) -> f64 {
        self.problem.delta.unwrap_or(DEFAULT_DELTA)
    }

    pub fn lambda(&self) -> f64 {
        self.problem.lambda.unwrap_or(0.0)
    }

    pub fn phi_bracket(&self) -> (f64, f64) {
        self.problem.phi_bracket.unwrap_or(DEFAULT_PHI_BRACKET)
    }

    fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let kind = self.problem_kind()?;
        let layout = self.scorecard_layout()?;
        let violations = crate::layout::validate_spec(&self.engineering, &layout);
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidSpec(msgs.join("; ")));
        }
        match kind {
            ProblemKind::Range => {
                if self.problem.div_floor.is_none() {
                    return Err(Error::Config("range problem requires div_floor".into()));
                }
                self.range_targets(layout.p())?;
            }
            ProblemKind::Inweight => {
                if self.engineering.inweights.is_empty() {
                    return Err(Error::Config(
                        "inweight problem requires engineering.inweights entries".into(),
                    ));
                }
            }
            _ => {}
        }
        if let Some((lo, hi)) = self.problem.phi_bracket {
            if !(0.0 <= lo && lo < hi) {
                return Err(Error::Config(format!("bad phi_bracket ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1

[problem]
kind = "classic"
delta = 1.0

[[layout]]
name = "age"
attributes = ["lt30", "30to50", "gt50"]

[[layout]]
name = "owns"
attributes = ["no", "yes"]
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::from_str(MINIMAL).unwrap();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(cfg.problem_kind().unwrap(), ProblemKind::Classic);
        assert_eq!(cfg.scorecard_layout().unwrap().p(), 5);
        assert!(cfg.split.validation_keys.is_empty());
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        let err = RunConfig::from_str(&text).unwrap_err().to_string();
        assert!(err.contains("schema_version"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}\n[problem.extra]\nfoo = 1\n");
        assert!(RunConfig::from_str(&text).is_err());
    }

    #[test]
    fn range_requires_div_floor() {
        let text = MINIMAL.replace("kind = \"classic\"", "kind = \"range\"");
        let err = RunConfig::from_str(&text).unwrap_err().to_string();
        assert!(err.contains("div_floor"), "{err}");
    }

    #[test]
    fn inweight_requires_entries() {
        let text = MINIMAL.replace("kind = \"classic\"", "kind = \"inweight\"");
        let err = RunConfig::from_str(&text).unwrap_err().to_string();
        assert!(err.contains("inweights"), "{err}");
    }

    #[test]
    fn spec_violations_surface_in_validation() {
        let text = format!("{MINIMAL}\n[engineering]\nfixes = [99]\n");
        let err = RunConfig::from_str(&text).unwrap_err().to_string();
        assert!(err.contains("99"), "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_str(MINIMAL).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        cfg.save(&path).unwrap();
        let back = RunConfig::load(&path).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn range_targets_densify() {
        let text = format!(
            "{}\n[[range_targets]]\nindex = 2\nr = 1.0\nt = 0.15\n",
            MINIMAL.replace("kind = \"classic\"", "kind = \"range\"").replace(
                "delta = 1.0",
                "delta = 1.0\ndiv_floor = 0.5"
            )
        );
        let cfg = RunConfig::from_str(&text).unwrap();
        let rt = cfg.range_targets(5).unwrap();
        assert_eq!(rt.r.to_vec(), vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(rt.t[1], 0.15);
    }
}
