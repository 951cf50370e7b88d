//! Scorecard index space: characteristics, attributes, and the
//! score-engineering specification that constraint assembly consumes.
//!
//! All attribute indices exposed here are 1-based, matching the attribute
//! numbering used in scorecard reports. The last attribute of every
//! characteristic is its NO INFORMATION slot, identified positionally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub name: String,
    pub attributes: Vec<String>,
}

/// Ordered characteristics with their attribute labels. Immutable after
/// construction; `p()` is the total attribute count and the length of the
/// score-weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorecardLayout {
    characteristics: Vec<Characteristic>,
}

impl ScorecardLayout {
    pub fn new(characteristics: Vec<Characteristic>) -> Result<Self> {
        if characteristics.is_empty() {
            return Err(Error::InvalidLayout("no characteristics".into()));
        }
        for c in &characteristics {
            if c.attributes.is_empty() {
                return Err(Error::InvalidLayout(format!(
                    "characteristic '{}' has no attributes",
                    c.name
                )));
            }
        }
        Ok(ScorecardLayout { characteristics })
    }

    pub fn characteristics(&self) -> &[Characteristic] {
        &self.characteristics
    }

    pub fn n_characteristics(&self) -> usize {
        self.characteristics.len()
    }

    /// Total attribute count across characteristics.
    pub fn p(&self) -> usize {
        self.characteristics.iter().map(|c| c.attributes.len()).sum()
    }

    /// (characteristic index, attribute label) for a 1-based weight index.
    pub fn attribute(&self, index: usize) -> Option<(usize, &str)> {
        let mut t = index;
        for (c, ch) in self.characteristics.iter().enumerate() {
            if t <= ch.attributes.len() {
                return Some((c, ch.attributes[t - 1].as_str()));
            }
            t -= ch.attributes.len();
        }
        None
    }
}

/// First/last 1-based weight index per characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    pub low: Vec<usize>,
    pub high: Vec<usize>,
}

impl IndexMap {
    /// Characteristic (0-based) owning the 1-based weight index `t`.
    pub fn owner(&self, t: usize) -> Option<usize> {
        (0..self.low.len()).find(|&c| self.low[c] <= t && t <= self.high[c])
    }
}

pub fn build_index_map(layout: &ScorecardLayout) -> IndexMap {
    let n = layout.n_characteristics();
    let mut low = Vec::with_capacity(n);
    let mut high = Vec::with_capacity(n);
    let mut next = 1usize;
    for c in layout.characteristics() {
        low.push(next);
        next += c.attributes.len();
        high.push(next - 1);
    }
    IndexMap { low, high }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternSense {
    /// S_j <= S_k
    Leq,
    /// S_j >= S_k
    Geq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub j: usize,
    pub k: usize,
    pub sense: PatternSense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InWeight {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub index: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Score-engineering specification: which equality/inequality rows and
/// bounds the constraint assembler should emit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineeringSpec {
    /// One centering row per characteristic.
    pub centering: bool,
    /// One zero-fixing row per characteristic's no-inform slot.
    pub noinform: bool,
    /// Weight indices fixed to zero.
    pub fixes: Vec<usize>,
    /// Index pairs (i, j) meaning S_i - S_j = 0.
    pub equalities: Vec<(usize, usize)>,
    pub patterns: Vec<Pattern>,
    pub inweights: Vec<InWeight>,
    pub bounds: Vec<Bound>,
}

impl Default for EngineeringSpec {
    fn default() -> Self {
        EngineeringSpec {
            centering: false,
            noinform: false,
            fixes: Vec::new(),
            equalities: Vec::new(),
            patterns: Vec::new(),
            inweights: Vec::new(),
            bounds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecViolation {
    pub index: usize,
    pub message: String,
}

impl std::fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "index {}: {}", self.index, self.message)
    }
}

/// Diagnostic check of every EngineeringSpec invariant against a layout.
/// Returns all violations; an empty list means the spec is valid.
pub fn validate_spec(spec: &EngineeringSpec, layout: &ScorecardLayout) -> Vec<SpecViolation> {
    let p = layout.p();
    let mut out = Vec::new();
    let range = |idx: usize, what: &str, out: &mut Vec<SpecViolation>| {
        if idx < 1 || idx > p {
            out.push(SpecViolation {
                index: idx,
                message: format!("{what} index out of range [1, {p}]"),
            });
        }
    };
    for &t in &spec.fixes {
        range(t, "fix", &mut out);
    }
    for &(i, j) in &spec.equalities {
        range(i, "equality", &mut out);
        range(j, "equality", &mut out);
        if i == j {
            out.push(SpecViolation {
                index: i,
                message: "equality pair must reference two distinct indices".into(),
            });
        }
    }
    for pat in &spec.patterns {
        range(pat.j, "pattern", &mut out);
        range(pat.k, "pattern", &mut out);
        if pat.j == pat.k {
            out.push(SpecViolation {
                index: pat.j,
                message: "pattern requires j != k".into(),
            });
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for iw in &spec.inweights {
        range(iw.index, "in-weight", &mut out);
        if !seen.insert(iw.index) {
            out.push(SpecViolation {
                index: iw.index,
                message: "duplicate in-weight index".into(),
            });
        }
        if spec.fixes.contains(&iw.index) {
            out.push(SpecViolation {
                index: iw.index,
                message: "index appears in both fixes and inweights".into(),
            });
        }
    }
    for b in &spec.bounds {
        range(b.index, "bound", &mut out);
        if let (Some(l), Some(u)) = (b.lower, b.upper) {
            if l > u {
                out.push(SpecViolation {
                    index: b.index,
                    message: format!("lower bound {l} exceeds upper bound {u}"),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(counts: &[usize]) -> ScorecardLayout {
        let chars = counts
            .iter()
            .enumerate()
            .map(|(i, &n)| Characteristic {
                name: format!("char{}", i + 1),
                attributes: (1..=n).map(|a| format!("att{a}")).collect(),
            })
            .collect();
        ScorecardLayout::new(chars).unwrap()
    }

    #[test]
    fn index_map_single_characteristic() {
        let m = build_index_map(&layout(&[3]));
        assert_eq!(m.low, vec![1]);
        assert_eq!(m.high, vec![3]);
    }

    #[test]
    fn index_map_two_blocks() {
        let m = build_index_map(&layout(&[2, 4]));
        assert_eq!(m.low, vec![1, 3]);
        assert_eq!(m.high, vec![2, 6]);
    }

    #[test]
    fn index_map_paper_layout() {
        let counts = [
            7, 7, 7, 13, 8, 11, 4, 7, 4, 3, 7, 7, 4, 8, 4, 6, 5, 5, 3, 4, 16, 5, 6, 10, 10,
        ];
        let l = layout(&counts);
        assert_eq!(l.p(), 171);
        let m = build_index_map(&l);
        assert_eq!(
            m.high,
            vec![
                7, 14, 21, 34, 42, 53, 57, 64, 68, 71, 78, 85, 89, 97, 101, 107, 112, 117, 120,
                124, 140, 145, 151, 161, 171
            ]
        );
    }

    #[test]
    fn every_index_has_exactly_one_owner() {
        let l = layout(&[2, 4, 3]);
        let m = build_index_map(&l);
        for t in 1..=l.p() {
            let owners: Vec<_> = (0..3)
                .filter(|&c| m.low[c] <= t && t <= m.high[c])
                .collect();
            assert_eq!(owners.len(), 1, "index {t}");
        }
        assert_eq!(m.owner(0), None);
        assert_eq!(m.owner(l.p() + 1), None);
    }

    #[test]
    fn empty_spec_is_valid() {
        let l = layout(&[3, 2]);
        assert!(validate_spec(&EngineeringSpec::default(), &l).is_empty());
    }

    #[test]
    fn degenerate_pattern_rejected() {
        let l = layout(&[5, 5]);
        let spec = EngineeringSpec {
            patterns: vec![Pattern { j: 5, k: 5, sense: PatternSense::Leq }],
            ..Default::default()
        };
        let v = validate_spec(&spec, &l);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("j != k"));
    }

    #[test]
    fn out_of_range_inweight_rejected() {
        let l = layout(&[3]);
        let spec = EngineeringSpec {
            inweights: vec![InWeight { index: 4, value: 0.5 }],
            ..Default::default()
        };
        let v = validate_spec(&spec, &l);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("out of range"));
    }
}
