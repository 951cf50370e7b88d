//! Applicant records: CSV input/output, development/validation
//! splitting, and synthetic sample generation.
//!
//! The file format is headered CSV with columns `split_key`, `outcome`,
//! then one indicator column per attribute named `v<c>_<a>` (1-based
//! characteristic and attribute). Each row must be one-hot within every
//! characteristic.

use std::collections::HashSet;
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::layout::{IndexMap, ScorecardLayout};
use crate::moments::{compute_moments, MomentSet};

/// Outcome label for a record: good (1) or bad (0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Good,
    Bad,
}

/// A loaded applicant sample in indicator form.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// n x p indicator matrix.
    pub x: Array2<f64>,
    pub outcomes: Vec<Outcome>,
    pub split_keys: Vec<u32>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Partition by split key into (development, validation).
    pub fn split(&self, validation_keys: &[u32]) -> (Dataset, Dataset) {
        let val: HashSet<u32> = validation_keys.iter().copied().collect();
        let (mut di, mut vi) = (Vec::new(), Vec::new());
        for (i, k) in self.split_keys.iter().enumerate() {
            if val.contains(k) {
                vi.push(i);
            } else {
                di.push(i);
            }
        }
        (self.take(&di), self.take(&vi))
    }

    fn take(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), idx),
            outcomes: idx.iter().map(|&i| self.outcomes[i]).collect(),
            split_keys: idx.iter().map(|&i| self.split_keys[i]).collect(),
        }
    }

    /// Class-separated views as owned matrices (goods, bads).
    pub fn by_class(&self) -> (Array2<f64>, Array2<f64>) {
        let gi: Vec<usize> = (0..self.n()).filter(|&i| self.outcomes[i] == Outcome::Good).collect();
        let bi: Vec<usize> = (0..self.n()).filter(|&i| self.outcomes[i] == Outcome::Bad).collect();
        (self.x.select(Axis(0), &gi), self.x.select(Axis(0), &bi))
    }

    /// Unweighted sample moments of this dataset.
    pub fn moments(&self) -> Result<MomentSet> {
        let (g, b) = self.by_class();
        compute_moments(&g.view(), &b.view(), None, None)
    }

    /// Regression response: +1 goods, -1 bads.
    pub fn regression_response(&self) -> Array1<f64> {
        Array1::from_iter(self.outcomes.iter().map(|o| match o {
            Outcome::Good => 1.0,
            Outcome::Bad => -1.0,
        }))
    }
}

/// Expected header for a layout: split_key, outcome, v1_1, v1_2, ...
pub fn expected_header(layout: &ScorecardLayout) -> Vec<String> {
    let mut h = vec!["split_key".to_string(), "outcome".to_string()];
    for (c, ch) in layout.characteristics().iter().enumerate() {
        for a in 0..ch.attributes.len() {
            h.push(format!("v{}_{}", c + 1, a + 1));
        }
    }
    h
}

/// Load a CSV sample, validating the header against the layout and
/// one-hot structure row by row. Errors carry 1-based line numbers.
pub fn load_dataset(path: &Path, layout: &ScorecardLayout) -> Result<Dataset> {
    let map = crate::layout::build_index_map(layout);
    let p = layout.p();
    let want = expected_header(layout);

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let got: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if got != want {
        let detail = got
            .iter()
            .zip(want.iter())
            .enumerate()
            .find(|(_, (g, w))| g != w)
            .map(|(i, (g, w))| format!("column {} is '{}', expected '{}'", i + 1, g, w))
            .unwrap_or_else(|| format!("{} columns, expected {}", got.len(), want.len()));
        return Err(Error::Data(format!("header mismatch: {detail}")));
    }

    let mut rows: Vec<f64> = Vec::new();
    let mut outcomes = Vec::new();
    let mut split_keys = Vec::new();
    for (rec_i, rec) in rdr.records().enumerate() {
        let line = rec_i + 2; // 1-based, after the header
        let rec = rec?;
        if rec.len() != p + 2 {
            return Err(Error::Data(format!(
                "line {line}: {} fields, expected {}",
                rec.len(),
                p + 2
            )));
        }
        let key: u32 = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("line {line}: bad split_key '{}'", &rec[0])))?;
        let outcome = match rec[1].trim() {
            "1" => Outcome::Good,
            "0" => Outcome::Bad,
            other => {
                return Err(Error::Data(format!(
                    "line {line}: outcome must be 0 or 1, got '{other}'"
                )))
            }
        };
        let mut row = vec![0.0f64; p];
        for j in 0..p {
            match rec[j + 2].trim() {
                "0" => {}
                "1" => row[j] = 1.0,
                other => {
                    return Err(Error::Data(format!(
                        "line {line}: indicator column {} must be 0 or 1, got '{other}'",
                        want[j + 2]
                    )))
                }
            }
        }
        check_one_hot(&row, &map, line)?;
        rows.extend_from_slice(&row);
        outcomes.push(outcome);
        split_keys.push(key);
    }
    let n = outcomes.len();
    if n == 0 {
        return Err(Error::Data("no data rows".into()));
    }
    let x = Array2::from_shape_vec((n, p), rows)
        .map_err(|e| Error::Data(format!("shape error: {e}")))?;
    Ok(Dataset { x, outcomes, split_keys })
}

fn check_one_hot(row: &[f64], map: &IndexMap, line: usize) -> Result<()> {
    for c in 0..map.low.len() {
        let lo = map.low[c] - 1;
        let hi = map.high[c];
        let ones = row[lo..hi].iter().filter(|&&v| v == 1.0).count();
        if ones != 1 {
            return Err(Error::Data(format!(
                "line {line}: characteristic {} has {ones} indicators set, expected exactly 1",
                c + 1
            )));
        }
    }
    Ok(())
}

/// Write a dataset to CSV in the standard format.
pub fn write_dataset(path: &Path, ds: &Dataset, layout: &ScorecardLayout) -> Result<()> {
    if ds.p() != layout.p() {
        return Err(Error::Dimension("dataset p != layout p".into()));
    }
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(expected_header(layout))?;
    for i in 0..ds.n() {
        let mut rec = Vec::with_capacity(ds.p() + 2);
        rec.push(ds.split_keys[i].to_string());
        rec.push(match ds.outcomes[i] {
            Outcome::Good => "1".to_string(),
            Outcome::Bad => "0".to_string(),
        });
        for j in 0..ds.p() {
            rec.push(if ds.x[[i, j]] == 1.0 { "1".to_string() } else { "0".to_string() });
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parameters for synthetic generation.
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub n: usize,
    pub seed: u64,
    /// Number of split keys cycled uniformly (keys 1..=k).
    pub split_key_count: u32,
    /// Overall good rate.
    pub good_rate: f64,
    /// Strength of class separation per characteristic (0 = none).
    pub separation: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { n: 2000, seed: 0, split_key_count: 10, good_rate: 0.6, separation: 0.8 }
    }
}

/// Generate a synthetic applicant sample. Each characteristic gets a
/// random base distribution over attributes; the good-class distribution
/// is tilted toward later attributes and the bad class toward earlier
/// ones, so sample divergence is positive with high probability. Fully
/// deterministic given the seed.
pub fn generate_synthetic(layout: &ScorecardLayout, opts: &SynthOptions) -> Result<Dataset> {
    if opts.n < 4 {
        return Err(Error::Config("synthetic n must be at least 4".into()));
    }
    if !(0.0 < opts.good_rate && opts.good_rate < 1.0) {
        return Err(Error::Config("good_rate must be in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let p = layout.p();

    let mut good_dists = Vec::new();
    let mut bad_dists = Vec::new();
    for ch in layout.characteristics() {
        let k = ch.attributes.len();
        let base: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2f64..1.0)).collect();
        let mut gw = Vec::with_capacity(k);
        let mut bw = Vec::with_capacity(k);
        for (a, &b) in base.iter().enumerate() {
            // tilt: linear ramp across attributes, opposite signs by class
            let ramp = if k > 1 { (a as f64 / (k - 1) as f64) - 0.5 } else { 0.0 };
            gw.push(b * (opts.separation * ramp).exp());
            bw.push(b * (-opts.separation * ramp).exp());
        }
        good_dists.push(WeightedIndex::new(&gw).map_err(|e| Error::Config(e.to_string()))?);
        bad_dists.push(WeightedIndex::new(&bw).map_err(|e| Error::Config(e.to_string()))?);
    }

    let map = crate::layout::build_index_map(layout);
    let mut x = Array2::zeros((opts.n, p));
    let mut outcomes = Vec::with_capacity(opts.n);
    let mut split_keys = Vec::with_capacity(opts.n);
    for i in 0..opts.n {
        // force at least two of each class so moments are computable
        let good = match i {
            0 | 1 => true,
            2 | 3 => false,
            _ => rng.gen_bool(opts.good_rate),
        };
        let dists = if good { &good_dists } else { &bad_dists };
        for (c, dist) in dists.iter().enumerate() {
            let a = dist.sample(&mut rng);
            x[[i, map.low[c] - 1 + a]] = 1.0;
        }
        outcomes.push(if good { Outcome::Good } else { Outcome::Bad });
        split_keys.push(1 + (rng.gen_range(0..opts.split_key_count)));
    }
    Ok(Dataset { x, outcomes, split_keys })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Characteristic;

    fn tiny_layout() -> ScorecardLayout {
        ScorecardLayout::new(vec![
            Characteristic {
                name: "age".into(),
                attributes: vec!["lt30".into(), "30to50".into(), "gt50".into()],
            },
            Characteristic { name: "owns".into(), attributes: vec!["no".into(), "yes".into()] },
        ])
        .unwrap()
    }

    #[test]
    fn header_names_follow_layout() {
        let h = expected_header(&tiny_layout());
        assert_eq!(h, vec!["split_key", "outcome", "v1_1", "v1_2", "v1_3", "v2_1", "v2_2"]);
    }

    #[test]
    fn round_trip_preserves_everything() {
        let layout = tiny_layout();
        let ds = generate_synthetic(&layout, &SynthOptions { n: 50, ..Default::default() }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.csv");
        write_dataset(&path, &ds, &layout).unwrap();
        let back = load_dataset(&path, &layout).unwrap();
        assert_eq!(back.x, ds.x);
        assert_eq!(back.outcomes, ds.outcomes);
        assert_eq!(back.split_keys, ds.split_keys);
    }

    #[test]
    fn synthetic_is_deterministic_per_seed() {
        let layout = tiny_layout();
        let opts = SynthOptions { n: 30, seed: 7, ..Default::default() };
        let a = generate_synthetic(&layout, &opts).unwrap();
        let b = generate_synthetic(&layout, &opts).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.split_keys, b.split_keys);
        let c =
            generate_synthetic(&layout, &SynthOptions { seed: 8, ..opts }).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn synthetic_rows_are_one_hot() {
        let layout = tiny_layout();
        let map = crate::layout::build_index_map(&layout);
        let ds = generate_synthetic(&layout, &SynthOptions { n: 40, seed: 3, ..Default::default() })
            .unwrap();
        for i in 0..ds.n() {
            let row: Vec<f64> = ds.x.row(i).to_vec();
            check_one_hot(&row, &map, i + 2).unwrap();
        }
    }

    #[test]
    fn header_mismatch_is_reported_with_column() {
        let layout = tiny_layout();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "split_key,outcome,v1_1,v1_2,v1_3,v2_1,wrong\n1,1,1,0,0,0,1\n")
            .unwrap();
        let err = load_dataset(&path, &layout).unwrap_err().to_string();
        assert!(err.contains("column 7"), "{err}");
        assert!(err.contains("v2_2"), "{err}");
    }

    #[test]
    fn one_hot_violation_names_the_line() {
        let layout = tiny_layout();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "split_key,outcome,v1_1,v1_2,v1_3,v2_1,v2_2\n1,1,1,0,0,0,1\n2,0,1,1,0,0,1\n",
        )
        .unwrap();
        let err = load_dataset(&path, &layout).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("characteristic 1"), "{err}");
    }

    #[test]
    fn bad_outcome_value_rejected() {
        let layout = tiny_layout();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "split_key,outcome,v1_1,v1_2,v1_3,v2_1,v2_2\n1,2,1,0,0,0,1\n")
            .unwrap();
        let err = load_dataset(&path, &layout).unwrap_err().to_string();
        assert!(err.contains("outcome"), "{err}");
    }

    #[test]
    fn split_partitions_sample() {
        let layout = tiny_layout();
        let ds = generate_synthetic(&layout, &SynthOptions { n: 100, seed: 1, ..Default::default() })
            .unwrap();
        let (dev, val) = ds.split(&[1, 4, 8]);
        assert_eq!(dev.n() + val.n(), ds.n());
        assert!(val.split_keys.iter().all(|k| [1, 4, 8].contains(k)));
        assert!(dev.split_keys.iter().all(|k| ![1, 4, 8].contains(k)));
    }

    #[test]
    fn regression_response_signs() {
        let layout = tiny_layout();
        let ds = generate_synthetic(&layout, &SynthOptions { n: 10, seed: 2, ..Default::default() })
            .unwrap();
        let y = ds.regression_response();
        for (i, o) in ds.outcomes.iter().enumerate() {
            let want = if *o == Outcome::Good { 1.0 } else { -1.0 };
            assert_eq!(y[i], want);
        }
    }
}
