//! The matrix of `R̊`, its spectrum, the partial-sum functional `f(A, x)` and
//! fractional α-positivity.
//!
//! α-status is decided from sorted eigenvalues: over all orthonormal bases the
//! smallest weighted diagonal sum is attained at an eigenbasis (Ky Fan), and
//! the fractional case is the convex combination of its two integer neighbours.
//! [`basis_probe`] checks this reduction empirically.

use std::fmt;

use nalgebra::DMatrix;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisLabel, TracelessBasis};
use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::CurvatureOperator;

/// Relative tolerance for treating eigenvalues and f-values as zero.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SecondKindMatrix {
    n: usize,
    matrix: DMatrix<f64>,
    labels: Vec<BasisLabel>,
}

impl SecondKindMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(self)
    }
}

/// `M[a][b] = R̊(φ_a, φ_b)` over a complete orthonormal basis.
pub fn assemble(r: &CurvatureOperator, basis: &TracelessBasis) -> Result<SecondKindMatrix> {
    if r.dim() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            got: r.dim(),
        });
    }
    if !basis.is_complete() {
        return Err(Error::InvalidBasis(format!(
            "basis has {} elements, S²₀ of R^{} needs {}",
            basis.len(),
            basis.n(),
            (basis.n() - 1) * (basis.n() + 2) / 2
        )));
    }
    let images = basis
        .tensors()
        .map(|phi| r.apply_second_kind(phi).map(|t| t.to_vector()))
        .collect::<Result<Vec<_>>>()?;
    let cols = basis.as_columns();
    let raw = cols.tr_mul(&DMatrix::from_columns(&images));
    let matrix = (&raw + raw.transpose()) * 0.5;
    Ok(SecondKindMatrix {
        n: basis.n(),
        matrix,
        labels: basis.elements().iter().map(|e| e.label).collect(),
    })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigenvalues(m: &SecondKindMatrix) -> Vec<f64> {
    sorted_eigenvalues(m.matrix.clone())
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `f(A, x) = Σ_{i ≤ ⌊x⌋} a_i + (x - ⌊x⌋) a_{⌊x⌋+1}` over the ascending sort of `A`.
pub fn f_partial(a: &[f64], x: f64) -> Result<f64> {
    let mut sorted = a.to_vec();
    sorted.sort_by(f64::total_cmp);
    f_sorted(&sorted, x)
}

fn f_sorted(a: &[f64], x: f64) -> Result<f64> {
    let len = a.len() as f64;
    if !(x >= 1.0 && x <= len) {
        return Err(Error::OutOfRange {
            value: x,
            lo: 1.0,
            hi: len,
        });
    }
    let k = x.floor() as usize;
    let frac = x - x.floor();
    let mut s: f64 = a[..k].iter().sum();
    if frac > 0.0 {
        s += frac * a[k];
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaStatus {
    Positive,
    Nonnegative,
    Indefinite,
    Nonpositive,
    Negative,
    Zero,
}

impl AlphaStatus {
    pub fn is_nonnegative(self) -> bool {
        matches!(self, AlphaStatus::Positive | AlphaStatus::Nonnegative | AlphaStatus::Zero)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, AlphaStatus::Negative | AlphaStatus::Nonpositive | AlphaStatus::Zero)
    }

    /// The status of `-R` given the status of `R`.
    pub fn negated(self) -> Self {
        match self {
            AlphaStatus::Positive => AlphaStatus::Negative,
            AlphaStatus::Nonnegative => AlphaStatus::Nonpositive,
            AlphaStatus::Negative => AlphaStatus::Positive,
            AlphaStatus::Nonpositive => AlphaStatus::Nonnegative,
            s => s,
        }
    }
}

impl fmt::Display for AlphaStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlphaStatus::Positive => "positive",
            AlphaStatus::Nonnegative => "nonnegative",
            AlphaStatus::Indefinite => "indefinite",
            AlphaStatus::Nonpositive => "nonpositive",
            AlphaStatus::Negative => "negative",
            AlphaStatus::Zero => "zero",
        };
        f.write_str(s)
    }
}

/// Status at one α together with both witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaVerdict {
    pub alpha: f64,
    pub status: AlphaStatus,
    /// `f(eigs, α)`.
    pub f_nonneg: f64,
    /// `f(-eigs, α)`: nonnegative exactly when `R` is α-nonpositive.
    pub f_nonpos: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ThresholdRepr", try_from = "ThresholdRepr")]
pub enum Threshold {
    At(f64),
    Never,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ThresholdRepr {
    Value(f64),
    Word(String),
}

impl From<Threshold> for ThresholdRepr {
    fn from(t: Threshold) -> Self {
        match t {
            Threshold::At(x) => ThresholdRepr::Value(x),
            Threshold::Never => ThresholdRepr::Word("never".into()),
        }
    }
}

impl TryFrom<ThresholdRepr> for Threshold {
    type Error = String;
    fn try_from(r: ThresholdRepr) -> std::result::Result<Self, String> {
        match r {
            ThresholdRepr::Value(x) => Ok(Threshold::At(x)),
            ThresholdRepr::Word(w) if w == "never" => Ok(Threshold::Never),
            ThresholdRepr::Word(w) => Err(format!("unknown threshold {w:?}")),
        }
    }
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::At(x) => Some(x),
            Threshold::Never => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::At(x) => write!(f, "{x}"),
            Threshold::Never => f.write_str("never"),
        }
    }
}

/// An ascending spectrum of `R̊`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_unsorted(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    pub fn tolerance(&self) -> f64 {
        ZERO_TOL * (1.0 + self.max_abs())
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        f_sorted(&self.eigenvalues, x)
    }

    /// `f` of the negated spectrum.
    pub fn f_negated(&self, x: f64) -> Result<f64> {
        let neg: Vec<f64> = self.eigenvalues.iter().rev().map(|v| -v).collect();
        f_sorted(&neg, x)
    }

    pub fn negated(&self) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().rev().map(|v| -v).collect(),
        }
    }

    pub fn status(&self, alpha: f64) -> Result<AlphaVerdict> {
        let f_nonneg = self.f(alpha)?;
        let f_nonpos = self.f_negated(alpha)?;
        let tol = self.tolerance();
        let status = if self.eigenvalues.iter().all(|v| v.abs() <= tol) {
            AlphaStatus::Zero
        } else if f_nonneg > tol {
            AlphaStatus::Positive
        } else if f_nonneg >= -tol {
            AlphaStatus::Nonnegative
        } else if f_nonpos > tol {
            AlphaStatus::Negative
        } else if f_nonpos >= -tol {
            AlphaStatus::Nonpositive
        } else {
            AlphaStatus::Indefinite
        };
        Ok(AlphaVerdict {
            alpha,
            status,
            f_nonneg,
            f_nonpos,
            tolerance: tol,
        })
    }

    /// Smallest `α ∈ [1, N]` with `f(eigs, α) >= 0`.
    ///
    /// `f` is piecewise linear with breakpoints at the integers and
    /// nondecreasing slopes, so the root is read off the first segment whose
    /// right end is nonnegative.
    pub fn threshold(&self) -> Threshold {
        let a = &self.eigenvalues;
        let tol = self.tolerance();
        if a.is_empty() {
            return Threshold::Never;
        }
        if a[0] >= -tol {
            return Threshold::At(1.0);
        }
        let mut partial = a[0];
        for k in 1..a.len() {
            let next = partial + a[k];
            if next >= -tol {
                return Threshold::At(k as f64 + (-partial) / a[k]);
            }
            partial = next;
        }
        Threshold::Never
    }
}

/// Spectrum of `R̊` for any curvature operator, via the frame-free reference basis.
pub fn spectrum(r: &CurvatureOperator) -> Result<Spectrum> {
    let basis = TracelessBasis::standard(r.dim())?;
    Ok(spectrum_in(r, &basis)?.0)
}

pub fn spectrum_in(r: &CurvatureOperator, basis: &TracelessBasis) -> Result<(Spectrum, SecondKindMatrix)> {
    let m = assemble(r, basis)?;
    Ok((Spectrum::from_unsorted(m.eigenvalues()), m))
}

pub fn alpha_status(r: &CurvatureOperator, alpha: f64) -> Result<AlphaVerdict> {
    spectrum(r)?.status(alpha)
}

pub fn alpha_threshold(r: &CurvatureOperator) -> Result<Threshold> {
    Ok(spectrum(r)?.threshold())
}

/// `(n+2)/(2n) · S`, the trace of `R̊`.
pub fn expected_trace(n: usize, scalar: f64) -> f64 {
    let n = n as f64;
    (n + 2.0) / (2.0 * n) * scalar
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n: usize,
    pub m: Option<usize>,
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub expected_trace: f64,
    pub scalar: f64,
    pub threshold_nonneg: Threshold,
    pub verdicts: Vec<AlphaVerdict>,
}

pub fn spectral_report(r: &CurvatureOperator, m: Option<usize>, alphas: &[f64]) -> Result<SpectralReport> {
    let basis = TracelessBasis::standard(r.dim())?;
    let (spec, matrix) = spectrum_in(r, &basis)?;
    let scalar = r.scalar_curvature();
    let verdicts = alphas.iter().map(|&a| spec.status(a)).collect::<Result<_>>()?;
    Ok(SpectralReport {
        n: r.dim(),
        m,
        trace: matrix.trace(),
        expected_trace: expected_trace(r.dim(), scalar),
        scalar,
        threshold_nonneg: spec.threshold(),
        eigenvalues: spec.eigenvalues,
        verdicts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub alpha: f64,
    pub trials: usize,
    /// Smallest weighted diagonal sum over the sampled bases.
    pub min: f64,
    /// `f(eigs, α)`, the value at an eigenbasis.
    pub f_eigs: f64,
}

/// The weighted diagonal sum for the basis `Q` (columns) in the reference frame of `m`.
fn weighted_diag(m: &DMatrix<f64>, q: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    let mq = m * q;
    let diag: Vec<f64> = (0..q.ncols()).map(|j| q.column(j).dot(&mq.column(j))).collect();
    f_partial(&diag, alpha)
}

/// Minimum over `trials` random orthonormal bases of the α-weighted sum of
/// the (ascending) diagonal entries of `R̊`. With `include_eigenbasis`, the
/// eigenbasis itself is one of the candidates.
pub fn basis_probe(
    r: &CurvatureOperator,
    alpha: f64,
    trials: usize,
    seed: u64,
    include_eigenbasis: bool,
) -> Result<ProbeResult> {
    if trials == 0 {
        return Err(Error::Constraint("trials must be >= 1".into()));
    }
    let matrix = assemble(r, &TracelessBasis::standard(r.dim())?)?;
    probe_matrix(matrix.matrix(), alpha, trials, seed, include_eigenbasis)
}

pub fn probe_matrix(
    m: &DMatrix<f64>,
    alpha: f64,
    trials: usize,
    seed: u64,
    include_eigenbasis: bool,
) -> Result<ProbeResult> {
    let n = m.nrows();
    let f_eigs = f_sorted(&sorted_eigenvalues(m.clone()), alpha)?;
    let sampled = (0..trials)
        .into_par_iter()
        .map(|t| {
            let q = rng::random_orthogonal(&mut rng::stream(seed, t as u64), n);
            weighted_diag(m, &q, alpha)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut min = sampled.into_iter().fold(f64::INFINITY, f64::min);
    if include_eigenbasis {
        let eig = m.clone().symmetric_eigen();
        min = min.min(weighted_diag(m, &eig.eigenvectors, alpha)?);
    }
    Ok(ProbeResult {
        alpha,
        trials,
        min,
        f_eigs,
    })
}

pub type Q = Ratio<i64>;

/// Exact threshold constants for complex dimension `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdConstants {
    pub m: i64,
    pub alpha: Q,
    pub beta: Q,
    pub gamma: Q,
    /// `β_{m+1}` written in terms of `m`.
    pub beta_tilde: Q,
    /// `γ_{m+1}` written in terms of `m`.
    pub gamma_tilde: Q,
    pub three_halves: Q,
    /// `N(2m) = (2m-1)(2m+2)/2`.
    pub n_traceless: i64,
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn alpha_m(m: i64) -> Q {
    q(3 * m * m * m - m + 2, 2 * m)
}

pub fn beta_m(m: i64) -> Q {
    q(3 * m * m * m + 2 * m * m - 3 * m - 2, 2 * m)
}

pub fn gamma_m(m: i64) -> Q {
    q(3 * m * m + 2 * m - 1, 2)
}

pub fn beta_tilde(m: i64) -> Q {
    q(m * (m + 2) * (3 * m + 5), 2 * (m + 1))
}

pub fn gamma_tilde(m: i64) -> Q {
    q(3 * m * m + 8 * m + 4, 2)
}

pub fn threshold_constants(m: usize) -> Result<ThresholdConstants> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    let m = m as i64;
    Ok(ThresholdConstants {
        m,
        alpha: alpha_m(m),
        beta: beta_m(m),
        gamma: gamma_m(m),
        beta_tilde: beta_tilde(m),
        gamma_tilde: gamma_tilde(m),
        three_halves: q(3 * (m * m - 1), 2),
        n_traceless: (2 * m - 1) * (2 * m + 2) / 2,
    })
}

/// An exact rational identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalIdentity {
    pub name: &'static str,
    pub lhs: Q,
    pub rhs: Q,
}

impl RationalIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The additive decompositions of the constants that the proofs split into
/// eigenvalue counts, plus the re-indexing of the tilde constants.
pub fn decomposition_identities(m: usize) -> Result<Vec<RationalIdentity>> {
    let c = threshold_constants(m)?;
    let m = c.m;
    let int = |v: i64| q(v, 1);
    let mm1 = int(m * m - 1);
    Ok(vec![
        RationalIdentity {
            name: "alpha_m = (m²-1) + 2 + (m-1) + (m-2)(m²-1)/(2m)",
            lhs: c.alpha,
            rhs: mm1 + int(2) + int(m - 1) + q((m - 2) * (m * m - 1), 2 * m),
        },
        RationalIdentity {
            name: "alpha_m = (m²-1) + 2 + (m-1)²(m+2)/(2m)",
            lhs: c.alpha,
            rhs: mm1 + int(2) + q((m - 1) * (m - 1) * (m + 2), 2 * m),
        },
        RationalIdentity {
            name: "beta~_m = (m²-1) + 4m + 1 + m(m²+m+2)/(2(m+1))",
            lhs: c.beta_tilde,
            rhs: mm1 + int(4 * m + 1) + q(m * (m * m + m + 2), 2 * (m + 1)),
        },
        RationalIdentity {
            name: "gamma~_m = (m²-1) + 4m + 3 + m²/2",
            lhs: c.gamma_tilde,
            rhs: mm1 + int(4 * m + 3) + q(m * m, 2),
        },
        RationalIdentity {
            name: "beta~_m = beta_{m+1}",
            lhs: c.beta_tilde,
            rhs: beta_m(m + 1),
        },
        RationalIdentity {
            name: "gamma~_m = gamma_{m+1}",
            lhs: c.gamma_tilde,
            rhs: gamma_m(m + 1),
        },
    ])
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}
