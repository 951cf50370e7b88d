//! The 25-characteristic, 171-attribute transaction-fraud scorecard
//! used throughout the tests and benchmarks: layout, engineering spec,
//! range targets, and standard run parameters.

use ndarray::Array1;

use crate::config::{ProblemConfig, RangeEntry, RunConfig, SplitConfig, SCHEMA_VERSION};
use crate::layout::{
    Characteristic, EngineeringSpec, InWeight, Pattern, PatternSense, ScorecardLayout,
};
use crate::problems::RangeTargets;

pub const FRAUD_DELTA: f64 = 1.753;
pub const FRAUD_LAMBDA: f64 = 0.095;
pub const FRAUD_DIV_FLOOR: f64 = 1.64;
pub const FRAUD_VALIDATION_KEYS: [u32; 3] = [1, 4, 8];

fn ch(name: &str, attributes: &[&str]) -> Characteristic {
    Characteristic {
        name: name.to_string(),
        attributes: attributes.iter().map(|s| s.to_string()).collect(),
    }
}

/// The fraud scorecard layout: p = 171.
pub fn fraud_layout() -> ScorecardLayout {
    ScorecardLayout::new(vec![
        ch("char170", &["-9999999", "0-<5", "5-<25", "25-<35", "35-<300", "300-High", "NO INFORMATION"]),
        ch("char191", &["-9999999", "0-<2", "2-<5", "5-<7", "7-<650", "650-High", "NO INFORMATION"]),
        ch("char193", &["-9999999", "0", "1", "2", "3-<18", "18-High", "NO INFORMATION"]),
        ch("char211", &["-9999999", "-9999998", "0", "1-<7", "7-<35", "35-<80", "80-<200", "200-<400", "400-<800", "800-<1300", "1300-<1700", "1700-High", "NO INFORMATION"]),
        ch("char260", &["-9999999", "0-<101", "101-<210", "210-<305", "305-<565", "565-<700", "700-High", "NO INFORMATION"]),
        ch("char320", &["-9999999-<0", "0-<590", "590-<2055", "2055-<8405", "8405-<16960", "16960-<20000", "20000-<30000", "30000-<40375", "40375-<70000", "70000-High", "NO INFORMATION"]),
        ch("char330", &["0", "1-<250", "250-High", "NO INFORMATION"]),
        ch("char380", &["-9999999-<0", "0-<635", "635-<1210", "1210-<1915", "1915-<5000", "5000-High", "NO INFORMATION"]),
        ch("char471", &["-9999999", "0", "1-<101", "NO INFORMATION"]),
        ch("char503", &["0", "1-High", "NO INFORMATION"]),
        ch("char533", &["-9999999-<1", "1", "2", "3", "4", "5-High", "NO INFORMATION"]),
        ch("char635", &["0", "1-<3", "3", "4", "5", "6-High", "NO INFORMATION"]),
        ch("char665", &["0", "1", "2-High", "NO INFORMATION"]),
        ch("char710", &["-9999999", "-9999998", "0", "1-<360", "360-<675", "675-<2435", "2435-High", "NO INFORMATION"]),
        ch("char830", &["0", "1", "2-High", "NO INFORMATION"]),
        ch("char835", &["0", "1", "2", "3", "4-High", "NO INFORMATION"]),
        ch("char840", &["0", "1", "2", "3-High", "NO INFORMATION"]),
        ch("char843", &["1", "2", "3", "4", "NO INFORMATION"]),
        ch("char860", &["0", "1-High", "NO INFORMATION"]),
        ch("char870", &["0", "1", "2-High", "NO INFORMATION"]),
        ch("char950", &["-9999998-<7011", "3300-<4901", "Travel", "5511-High", "MOTO", "5697-<7995", "3723-<5945", "5611-<8000", "4814-<4830", "5013-<8100", "Gas", "5655-<5949", "5300-<5942", "5815-<5963", "5423-<5655", "NO INFORMATION"]),
        ch("char960", &["Below -1700", "-1700-<-800", "-800-<-450", "-450-<High", "NO INFORMATION"]),
        ch("char961", &["-9999999", "-3000-<-1700", "-1700-<-800", "-800-<550", "550-High", "NO INFORMATION"]),
        ch("char962", &["Below -1500", "-1500-<-1100", "-1100-<-850", "-850-<-550", "-550-<-400", "-400-<-300", "-300-<1", "1-<200", "200-High", "NO INFORMATION"]),
        ch("char965", &["Below -950", "-950-<-750", "-750-<-550", "-550-<-400", "-400-<-300", "-300-<-200", "-200-<-100", "-100-<80", "80-High", "NO INFORMATION"]),
    ])
    .expect("fraud layout is valid")
}

/// j-indices of the 106 pattern constraints; k = j+1 except at the three
/// listed positions.
const PATTERN_J: [usize; 106] = [
    2, 3, 4, 5, 9, 10, 11, 12, 16, 17, 18, 19, 24, 25, 26, 27, 28, 29, 30, 31, 32, 36, 37, 38,
    39, 40, 43, 44, 45, 46, 47, 48, 49, 50, 51, 54, 55, 59, 60, 61, 62, 66, 69, 69, 73, 74, 75,
    76, 80, 81, 82, 83, 86, 87, 92, 93, 94, 95, 98, 99, 102, 103, 104, 105, 108, 109, 110, 118,
    121, 122, 125, 126, 127, 128, 129, 130, 131, 132, 133, 134, 135, 136, 137, 138, 141, 142,
    143, 147, 148, 149, 152, 153, 154, 155, 156, 157, 158, 159, 162, 163, 164, 165, 166, 167,
    168, 169,
];

/// The fraud scorecard's engineering constraints: 6 fixed weights, 3
/// cross-characteristic equalities, 106 monotone patterns, and the two
/// in-weights IW = (.5, .3) at attributes 2 and 13.
pub fn fraud_spec() -> EngineeringSpec {
    let mut patterns = Vec::with_capacity(106);
    for (pos, &j) in PATTERN_J.iter().enumerate() {
        // 1-based position in the pattern list
        let i = pos + 1;
        let k = match i {
            13 => 31,
            14 => 30,
            44 => 71,
            _ => j + 1,
        };
        // positions 1-4, 22-41, 43-84 are "S_j at least S_k"
        let sense = if (1..=4).contains(&i) || (22..=41).contains(&i) || (43..=84).contains(&i) {
            PatternSense::Geq
        } else {
            PatternSense::Leq
        };
        patterns.push(Pattern { j, k, sense });
    }
    EngineeringSpec {
        centering: true,
        noinform: true,
        fixes: vec![1, 8, 58, 65, 90, 91],
        equalities: vec![(69, 98), (69, 118), (69, 121)],
        patterns,
        inweights: vec![InWeight { index: 2, value: 0.5 }, InWeight { index: 13, value: 0.3 }],
        bounds: Vec::new(),
    }
}

/// Range-engineering emphasis and targets: restrict char170 and expand
/// char191 (the first 14 attributes), unit emphasis on each.
pub fn fraud_range_targets() -> RangeTargets {
    let mut r = Array1::zeros(171);
    let mut t = Array1::zeros(171);
    let targets = [
        0.0, 0.15, 0.08, -0.03, -0.13, -0.44, 0.0, 0.0, -1.71, -1.55, -0.86, -0.003, 0.14, 0.0,
    ];
    for (i, &v) in targets.iter().enumerate() {
        r[i] = 1.0;
        t[i] = v;
    }
    RangeTargets { r, t }
}

/// A complete run configuration for the fraud fixture.
pub fn fraud_config(kind: &str) -> RunConfig {
    let layout = fraud_layout();
    let range_targets = {
        let rt = fraud_range_targets();
        (0..14)
            .map(|i| RangeEntry { index: i + 1, r: rt.r[i], t: rt.t[i] })
            .collect()
    };
    RunConfig {
        schema_version: SCHEMA_VERSION,
        problem: ProblemConfig {
            kind: kind.to_string(),
            delta: Some(FRAUD_DELTA),
            lambda: Some(FRAUD_LAMBDA),
            div_floor: Some(FRAUD_DIV_FLOOR),
            phi_bracket: None,
        },
        split: SplitConfig { validation_keys: FRAUD_VALIDATION_KEYS.to_vec() },
        layout: layout.characteristics().to_vec(),
        engineering: fraud_spec(),
        range_targets,
    }
}
