//! JSON tensor and report files.
//!
//! Files use 1-based indices; memory is 0-based. Only canonical nonzero
//! components are stored. Readers never trust the stored Kähler flag.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kahler::{kahler_residual, ComplexStructure, KAHLER_TOL};
use crate::report::VerificationReport;
use crate::spectral::{AlphaVerdict, Threshold};
use crate::tensor::{CurvatureOperator, CONVENTION};

pub const TENSOR_FORMAT: &str = "secondkind-tensor";
pub const REPORT_FORMAT: &str = "secondkind-report";
pub const FORMAT_VERSION: u32 = 1;

/// One stored component `[i, j, k, l, value]`, 1-based.
pub type Entry = (usize, usize, usize, usize, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub kahler: bool,
    pub convention: String,
    pub entries: Vec<Entry>,
}

/// A tensor read back from disk, with the Kähler property recomputed.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedTensor {
    pub operator: CurvatureOperator,
    /// Complex dimension when the tensor is Kähler for the adapted structure.
    pub m: Option<usize>,
    pub kahler_residual: Option<f64>,
    /// The file claimed a different Kähler flag than the one recomputed.
    pub flag_mismatch: bool,
}

fn kahler_m(r: &CurvatureOperator) -> (Option<usize>, Option<f64>) {
    if r.dim() % 2 == 1 || r.dim() == 0 {
        return (None, None);
    }
    let j = ComplexStructure::for_dim(r.dim()).expect("even dimension");
    let res = kahler_residual(r, &j).expect("matching dimension");
    let m = (res <= KAHLER_TOL * r.scale()).then_some(r.dim() / 2);
    (m, Some(res))
}

impl TensorFile {
    pub fn from_operator(r: &CurvatureOperator) -> Self {
        let (m, _) = kahler_m(r);
        Self {
            format: TENSOR_FORMAT.into(),
            version: FORMAT_VERSION,
            n: r.dim(),
            m,
            kahler: m.is_some(),
            convention: CONVENTION.into(),
            entries: r
                .canonical_entries()
                .into_iter()
                .map(|(i, j, k, l, v)| (i + 1, j + 1, k + 1, l + 1, v))
                .collect(),
        }
    }

    /// Rebuilds and re-validates the operator.
    pub fn to_operator(&self) -> Result<LoadedTensor> {
        if self.format != TENSOR_FORMAT {
            return Err(Error::Format(format!("unknown format {:?}", self.format)));
        }
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", self.version)));
        }
        if self.convention != CONVENTION {
            return Err(Error::Format(format!(
                "convention {:?} is not {CONVENTION:?}",
                self.convention
            )));
        }
        let n = self.n;
        if n == 0 {
            return Err(Error::Format("n must be positive".into()));
        }
        let mut r = CurvatureOperator::zeros(n);
        for &(i, j, k, l, v) in &self.entries {
            if [i, j, k, l].iter().any(|&a| a == 0 || a > n) {
                return Err(Error::Format(format!("entry ({i},{j},{k},{l}) outside 1..={n}")));
            }
            if i == j || k == l {
                return Err(Error::Format(format!(
                    "entry ({i},{j},{k},{l}) must vanish by antisymmetry"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Format(format!("entry ({i},{j},{k},{l}) is not finite")));
            }
            let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
            let old = r.get(i, j, k, l);
            if old != 0.0 && old != v {
                return Err(Error::Format(format!(
                    "entry ({},{},{},{}) conflicts with an earlier entry of its symmetry class",
                    i + 1,
                    j + 1,
                    k + 1,
                    l + 1
                )));
            }
            r.set(i, j, k, l, v)?;
        }
        r.validate()?;
        let (m, residual) = kahler_m(&r);
        Ok(LoadedTensor {
            flag_mismatch: self.kahler != m.is_some(),
            m,
            kahler_residual: residual,
            operator: r,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tensor files always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn write_tensor(path: &Path, r: &CurvatureOperator) -> Result<()> {
    fs::write(path, TensorFile::from_operator(r).to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads, parses and validates a tensor file; also returns the raw bytes' digest.
pub fn read_tensor(path: &Path) -> Result<(LoadedTensor, String)> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
    let loaded = TensorFile::from_json(text)?.to_operator()?;
    Ok((loaded, digest(&bytes)))
}

/// Hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// What is needed to rerun the command that produced a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub command: String,
    pub seeds: Vec<u64>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_nonneg: Option<Threshold>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<AlphaVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<VerificationReport>,
    pub passed: bool,
    pub replay: Replay,
}

impl ReportFile {
    pub fn new(replay: Replay) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            version: FORMAT_VERSION,
            input_digest: None,
            n: None,
            m: None,
            spectrum: None,
            scalar: None,
            threshold_nonneg: None,
            verdicts: Vec::new(),
            suites: Vec::new(),
            passed: true,
            replay,
        }
    }

    pub fn push_suite(&mut self, suite: VerificationReport) {
        self.passed &= suite.passed();
        self.suites.push(suite);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if r.format != REPORT_FORMAT {
            return Err(Error::Format(format!("unknown format {:?}", r.format)));
        }
        Ok(r)
    }
}
