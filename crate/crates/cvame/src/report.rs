//! Report documents. Field order follows declaration order, so output is
//! deterministic apart from `elapsed_ms`. Mode indices are 1-based.

use serde::{Deserialize, Serialize};

use crate::format::MatrixFile;

pub const TOOLKIT: &str = "cvame";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub toolkit: String,
    pub version: String,
    pub command: String,
    pub backend: String,
    pub elapsed_ms: f64,
    pub result: T,
}

impl<T> Report<T> {
    pub fn new(command: &str, backend: String, elapsed_ms: f64, result: T) -> Self {
        Report { toolkit: TOOLKIT.into(), version: VERSION.into(), command: command.into(), backend, elapsed_ms, result }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOut {
    pub k: usize,
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckResult {
    /// Every level up to `n/2`.
    Uniformity {
        n: usize,
        k_max: usize,
        is_ame: bool,
        witnesses: Vec<WitnessOut>,
    },
    /// One requested level.
    Level {
        n: usize,
        k: usize,
        holds: bool,
        witness: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_side: Option<String>,
    },
    Mds {
        n: usize,
        k: usize,
        mds: bool,
        witness: Option<Vec<usize>>,
    },
    Stabilizer {
        n: usize,
        k_max: usize,
        is_ame: bool,
        witnesses: Vec<WitnessOut>,
        pure_distance: usize,
        fourier_modes: Vec<usize>,
    },
    Zak {
        n: usize,
        k_max: usize,
        is_ame: bool,
        witness_side: Option<String>,
        witness: Option<WitnessOut>,
    },
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        match self {
            CheckResult::Uniformity { is_ame, .. } | CheckResult::Stabilizer { is_ame, .. } | CheckResult::Zak { is_ame, .. } => *is_ame,
            CheckResult::Level { holds, .. } => *holds,
            CheckResult::Mds { mds, .. } => *mds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingOut {
    pub pairs: Vec<(usize, usize)>,
    pub ancilla: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub target: f64,
    pub threshold_db: f64,
    pub r: f64,
    pub fidelity_at_threshold: f64,
    pub pairing: PairingOut,
    pub is_ame: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullifierResult {
    pub support: Vec<usize>,
    pub found: bool,
    /// Combination of the rows of `H`.
    pub coefficients: Option<Vec<String>>,
    /// The nullifier over `(x_1..x_n, p_1..p_n)`.
    pub nullifier: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpOut {
    Fourier { modes: Vec<usize> },
    RowBasisChange { matrix: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterFormResult {
    pub adjacency: MatrixFile,
    pub log: Vec<OpOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCut {
    pub subset: Vec<usize>,
    pub purity: f64,
    pub full_rank: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub db: f64,
    pub cuts: Vec<OracleCut>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
