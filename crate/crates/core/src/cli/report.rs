//! Verification campaign configuration and report schema.
//!
//! A report is a JSON document:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "config":  { identity, dims, trials, seed, tol, include_singular, include_infinite },
//!   "summary": { records, failures, max_residual, infinite_cases },
//!   "records": [ { identity, dim, trial, seed, case, residual, sigma_min_eigenvalue,
//!                  block_min_eigenvalue?, leakage, pass, note? }, … ]
//! }
//! ```
//!
//! `residual` is a number, or one of `"infinite-consistent"`,
//! `"infinite-mismatch"`, `"error"`. Records are ordered by
//! `(dim position in config, trial)`. Wall time is reported on the console
//! only, so identical configurations produce byte-identical files.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linop::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    Lemma1,
    Theorem1,
    Corollary1,
    Corollary2,
    Corollary3,
    Theorem2,
    Eq3a,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Lemma1,
        Identity::Theorem1,
        Identity::Corollary1,
        Identity::Corollary2,
        Identity::Corollary3,
        Identity::Theorem2,
        Identity::Eq3a,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Identity::Lemma1 => "lemma1",
            Identity::Theorem1 => "theorem1",
            Identity::Corollary1 => "corollary1",
            Identity::Corollary2 => "corollary2",
            Identity::Corollary3 => "corollary3",
            Identity::Theorem2 => "theorem2",
            Identity::Eq3a => "eq3a",
        }
    }

    /// Stream coordinate used when deriving trial seeds.
    pub fn code(&self) -> u64 {
        Self::ALL.iter().position(|i| i == self).expect("listed") as u64 + 1
    }

    /// Whether the identity has a `+∞` branch worth exercising.
    pub fn has_infinite_branch(&self) -> bool {
        matches!(self, Identity::Theorem1 | Identity::Corollary3 | Identity::Theorem2)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|i| i.tag() == s)
            .ok_or_else(|| format!("unknown identity {s:?}; expected one of lemma1, theorem1, corollary1, corollary2, corollary3, theorem2, eq3a"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub identity: Identity,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
    pub include_singular: bool,
    pub include_infinite: bool,
}

impl VerifyConfig {
    pub const DEFAULT_DIMS: [usize; 5] = [2, 3, 4, 8, 16];
    pub const DEFAULT_TRIALS: usize = 200;

    pub fn new(identity: Identity) -> Self {
        Self {
            identity,
            dims: Self::DEFAULT_DIMS.to_vec(),
            trials: Self::DEFAULT_TRIALS,
            seed: 0,
            tol: Tolerances::default(),
            include_singular: true,
            include_infinite: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.dims.is_empty() {
            return Err("at least one dimension is required".into());
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(format!("dimension {d} is below 2"));
        }
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        self.tol.validate().map_err(|e| e.to_string())
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Value(f64),
    InfiniteConsistent,
    InfiniteMismatch,
    Error,
}

impl Residual {
    pub fn value(&self) -> Option<f64> {
        match self {
            Residual::Value(x) => Some(*x),
            _ => None,
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        match self {
            Residual::Value(x) => *x <= tol,
            Residual::InfiniteConsistent => true,
            Residual::InfiniteMismatch | Residual::Error => false,
        }
    }
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Residual::Value(x) => s.serialize_f64(*x),
            Residual::InfiniteConsistent => s.serialize_str("infinite-consistent"),
            Residual::InfiniteMismatch => s.serialize_str("infinite-mismatch"),
            Residual::Error => s.serialize_str("error"),
        }
    }
}

impl<'de> Deserialize<'de> for Residual {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Num(x) => Residual::Value(x),
            Repr::Str(s) => match s.as_str() {
                "infinite-consistent" => Residual::InfiniteConsistent,
                "infinite-mismatch" => Residual::InfiniteMismatch,
                "error" => Residual::Error,
                other => return Err(serde::de::Error::custom(format!("bad residual {other:?}"))),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub identity: Identity,
    pub dim: usize,
    pub trial: usize,
    pub seed: u64,
    /// Short description of the generated fixture.
    pub case: String,
    pub residual: Residual,
    pub sigma_min_eigenvalue: Option<f64>,
    /// Smallest nonzero eigenvalue over the blocks `σ_k` that `ρ` occupies.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block_min_eigenvalue: Option<f64>,
    pub leakage: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub infinite_cases: usize,
}

impl Summary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        Self {
            records: records.len(),
            failures: records.iter().filter(|r| !r.pass).count(),
            max_residual: records.iter().filter_map(|r| r.residual.value()).fold(0.0, f64::max),
            infinite_cases: records
                .iter()
                .filter(|r| matches!(r.residual, Residual::InfiniteConsistent | Residual::InfiniteMismatch))
                .count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: VerifyConfig,
    pub summary: Summary,
    pub records: Vec<TrialRecord>,
}

impl Report {
    pub fn new(config: VerifyConfig, records: Vec<TrialRecord>) -> Self {
        Self { schema_version: SCHEMA_VERSION, summary: Summary::from_records(&records), config, records }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
