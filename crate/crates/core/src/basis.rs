//! Labelled orthonormal bases of the traceless symmetric two-tensors.
//!
//! Every element is built from [`sym_product`] and scalar arithmetic, so the
//! closed-form diagonal values checked here are tested against an independent
//! construction rather than against themselves.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahler::{KahlerOperator, UnitaryFrame};
use crate::report::VerificationReport;
use crate::tensor::{basis_vector, sym_product, CurvatureOperator, SpaceDim, SymTwoTensor};

const FRAME_TOL: f64 = 1e-10;

/// Indices are 1-based, as they appear in printed reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisLabel {
    PhiPlus(usize, usize),
    PsiPlus(usize, usize),
    Theta(usize),
    PhiMinus(usize, usize),
    PsiMinus(usize, usize),
    Eta(usize),
    Tau(usize),
    H(usize),
    Zeta,
    /// Elements of the frame-free reference basis used for odd `n`.
    Offdiag(usize, usize),
    Diag(usize),
}

impl BasisLabel {
    /// Checks the index ranges for complex dimension `m` (of `V_1` for τ/h/ζ).
    pub fn validate(&self, m: usize) -> Result<()> {
        let ok = match *self {
            BasisLabel::PhiPlus(i, j)
            | BasisLabel::PsiPlus(i, j)
            | BasisLabel::PhiMinus(i, j)
            | BasisLabel::PsiMinus(i, j) => 1 <= i && i < j && j <= m,
            BasisLabel::Theta(i) => (1..=2 * m).contains(&i),
            BasisLabel::Eta(k) => k >= 1 && k < m,
            BasisLabel::Tau(i) => i == 1 || i == 2,
            BasisLabel::H(i) => (1..=4 * m).contains(&i),
            BasisLabel::Zeta => true,
            BasisLabel::Offdiag(i, j) => 1 <= i && i < j,
            BasisLabel::Diag(k) => k >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Index(format!("label {self} out of range for m = {m}")))
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::PhiPlus(i, j) => write!(f, "φ+({i},{j})"),
            BasisLabel::PsiPlus(i, j) => write!(f, "ψ+({i},{j})"),
            BasisLabel::Theta(i) => write!(f, "θ({i})"),
            BasisLabel::PhiMinus(i, j) => write!(f, "φ-({i},{j})"),
            BasisLabel::PsiMinus(i, j) => write!(f, "ψ-({i},{j})"),
            BasisLabel::Eta(k) => write!(f, "η({k})"),
            BasisLabel::Tau(i) => write!(f, "τ({i})"),
            BasisLabel::H(i) => write!(f, "h({i})"),
            BasisLabel::Zeta => write!(f, "ζ"),
            BasisLabel::Offdiag(i, j) => write!(f, "o({i},{j})"),
            BasisLabel::Diag(k) => write!(f, "d({k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Partition {
    EPlus,
    EMinus,
    ProductExtra,
    Reference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub label: BasisLabel,
    pub partition: Partition,
    pub tensor: SymTwoTensor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracelessBasis {
    n: usize,
    elements: Vec<BasisElement>,
}

impl TracelessBasis {
    /// Wraps elements after checking shape, tracelessness and orthonormality.
    pub fn new(n: usize, elements: Vec<BasisElement>) -> Result<Self> {
        if let Some(e) = elements.iter().find(|e| e.tensor.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: e.tensor.dim(),
            });
        }
        if let Some(e) = elements.iter().find(|e| e.tensor.trace().abs() > 1e-12) {
            return Err(Error::InvalidBasis(format!("{} is not traceless", e.label)));
        }
        let basis = Self { n, elements };
        let err = basis.orthonormality_error();
        if err > 1e-12 {
            return Err(Error::InvalidBasis(format!(
                "elements are not orthonormal (Gram error {err:e})"
            )));
        }
        Ok(basis)
    }

    /// Frame-free basis valid for every `n >= 2`: `e_i⊙e_j/√2` for `i < j`
    /// followed by the normalized diagonal tensors
    /// `(Σ_{i<k} e_i⊙e_i - k e_k⊙e_k) / (2√(k(k+1)))`.
    pub fn standard(n: usize) -> Result<Self> {
        SpaceDim::new(n)?;
        let e: Vec<_> = (0..n).map(|i| basis_vector(n, i)).collect();
        let mut elements = Vec::with_capacity(SpaceDim::new(n)?.traceless_dim());
        for i in 0..n {
            for j in i + 1..n {
                elements.push(BasisElement {
                    label: BasisLabel::Offdiag(i + 1, j + 1),
                    partition: Partition::Reference,
                    tensor: &sym_product(&e[i], &e[j])? * std::f64::consts::FRAC_1_SQRT_2,
                });
            }
        }
        for k in 1..n {
            let kf = k as f64;
            let mut t = &sym_product(&e[k], &e[k])? * (-kf);
            for v in &e[..k] {
                t = &t + &sym_product(v, v)?;
            }
            let norm = 2.0 * (kf * (kf + 1.0)).sqrt();
            elements.push(BasisElement {
                label: BasisLabel::Diag(k),
                partition: Partition::Reference,
                tensor: &t * (1.0 / norm),
            });
        }
        Self::new(n, elements)
    }

    /// `E⁺ ∪ E⁻` built from a unitary frame.
    pub fn kahler(frame: &UnitaryFrame) -> Result<Self> {
        let mut elements = build_e_plus(frame)?;
        elements.extend(build_e_minus(frame)?);
        Self::new(2 * frame.m(), elements)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn tensors(&self) -> impl Iterator<Item = &SymTwoTensor> {
        self.elements.iter().map(|e| &e.tensor)
    }

    pub fn partition(&self, p: Partition) -> impl Iterator<Item = &BasisElement> {
        self.elements.iter().filter(move |e| e.partition == p)
    }

    pub fn position(&self, label: BasisLabel) -> Option<usize> {
        self.elements.iter().position(|e| e.label == label)
    }

    /// `true` when the basis spans all of `S²₀(V)`.
    pub fn is_complete(&self) -> bool {
        SpaceDim::new(self.n).is_ok_and(|d| d.traceless_dim() == self.len())
    }

    /// Columns are the flattened elements.
    pub fn as_columns(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.tensors().map(SymTwoTensor::to_vector).collect();
        if cols.is_empty() {
            return DMatrix::zeros(self.n * self.n, 0);
        }
        DMatrix::from_columns(&cols)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let c = self.as_columns();
        c.tr_mul(&c)
    }

    pub fn orthonormality_error(&self) -> f64 {
        let k = self.len();
        if k == 0 {
            return 0.0;
        }
        (self.gram() - DMatrix::identity(k, k)).amax()
    }

    /// Orthogonal projector onto the span of one partition, acting on flattened matrices.
    pub fn projector(&self, p: Partition) -> DMatrix<f64> {
        let mut proj = DMatrix::zeros(self.n * self.n, self.n * self.n);
        for e in self.partition(p) {
            let v = e.tensor.to_vector();
            proj += &v * v.transpose();
        }
        proj
    }
}

fn check_frame(frame: &UnitaryFrame) -> Result<()> {
    let err = frame.orthonormality_error();
    if err > FRAME_TOL {
        return Err(Error::InvalidFrame(format!("Gram error {err:e}")));
    }
    Ok(())
}

/// A complex frame given as `(e_i, Je_i)` pairs; index `i` here is 0-based.
struct Pairs<'a> {
    e: Vec<&'a DVector<f64>>,
    je: Vec<&'a DVector<f64>>,
}

impl<'a> Pairs<'a> {
    fn of(frame: &'a UnitaryFrame, skip: usize) -> Self {
        let m = frame.m();
        Self {
            e: (skip..m).map(|i| frame.e(i)).collect(),
            je: (skip..m).map(|i| frame.je(i)).collect(),
        }
    }

    fn m(&self) -> usize {
        self.e.len()
    }
}

fn half(a: SymTwoTensor, b: SymTwoTensor, sign: f64) -> SymTwoTensor {
    &(&a + &(&b * sign)) * 0.5
}

fn e_plus(p: &Pairs<'_>) -> Result<Vec<BasisElement>> {
    let m = p.m();
    let mut out = Vec::with_capacity(m * (m + 1));
    let el = |label, tensor| BasisElement {
        label,
        partition: Partition::EPlus,
        tensor,
    };
    for i in 0..m {
        for j in i + 1..m {
            let t = half(sym_product(p.e[i], p.e[j])?, sym_product(p.je[i], p.je[j])?, -1.0);
            out.push(el(BasisLabel::PhiPlus(i + 1, j + 1), t));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let t = half(sym_product(p.e[i], p.je[j])?, sym_product(p.je[i], p.e[j])?, 1.0);
            out.push(el(BasisLabel::PsiPlus(i + 1, j + 1), t));
        }
    }
    let c1 = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    for i in 0..m {
        let t = &(&sym_product(p.e[i], p.e[i])? - &sym_product(p.je[i], p.je[i])?) * c1;
        out.push(el(BasisLabel::Theta(i + 1), t));
    }
    for i in 0..m {
        let t = &sym_product(p.e[i], p.je[i])? * std::f64::consts::FRAC_1_SQRT_2;
        out.push(el(BasisLabel::Theta(m + i + 1), t));
    }
    Ok(out)
}

fn e_minus(p: &Pairs<'_>) -> Result<Vec<BasisElement>> {
    let m = p.m();
    let mut out = Vec::with_capacity((m * m).saturating_sub(1));
    let el = |label, tensor| BasisElement {
        label,
        partition: Partition::EMinus,
        tensor,
    };
    for i in 0..m {
        for j in i + 1..m {
            let t = half(sym_product(p.e[i], p.e[j])?, sym_product(p.je[i], p.je[j])?, 1.0);
            out.push(el(BasisLabel::PhiMinus(i + 1, j + 1), t));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let t = half(sym_product(p.e[i], p.je[j])?, sym_product(p.je[i], p.e[j])?, -1.0);
            out.push(el(BasisLabel::PsiMinus(i + 1, j + 1), t));
        }
    }
    let diag = |i: usize| -> Result<SymTwoTensor> {
        Ok(&sym_product(p.e[i], p.e[i])? + &sym_product(p.je[i], p.je[i])?)
    };
    for k in 1..m {
        let kf = k as f64;
        let c = 1.0 / (8.0 * kf * (kf + 1.0)).sqrt();
        let mut t = &diag(k)? * (kf * c);
        for i in 0..k {
            t = &t - &(&diag(i)? * c);
        }
        out.push(el(BasisLabel::Eta(k), t));
    }
    Ok(out)
}

/// The `m(m+1)` elements `φ⁺_ij`, `ψ⁺_ij` (`i < j`) and `θ_1..θ_2m`.
pub fn build_e_plus(frame: &UnitaryFrame) -> Result<Vec<BasisElement>> {
    check_frame(frame)?;
    e_plus(&Pairs::of(frame, 0))
}

/// The `m² - 1` elements `φ⁻_ij`, `ψ⁻_ij` (`i < j`) and `η_1..η_{m-1}`.
pub fn build_e_minus(frame: &UnitaryFrame) -> Result<Vec<BasisElement>> {
    check_frame(frame)?;
    e_minus(&Pairs::of(frame, 0))
}

/// Basis adapted to `V = V_0 ⊕ V_1` where `V_0 = span{e_0, Je_0}` is the first
/// pair of `frame` and `V_1` (complex dimension `m`) carries the rest.
pub fn build_product_basis(frame: &UnitaryFrame) -> Result<TracelessBasis> {
    check_frame(frame)?;
    if frame.m() < 2 {
        return Err(Error::InvalidFrame(
            "a split V_0 ⊕ V_1 needs complex dimension at least 2".into(),
        ));
    }
    let m = frame.m() - 1;
    let v1 = Pairs::of(frame, 1);
    let (e0, je0) = (frame.e(0), frame.je(0));
    let mut elements = e_plus(&v1)?;
    elements.extend(e_minus(&v1)?);

    let extra = |label, tensor| BasisElement {
        label,
        partition: Partition::ProductExtra,
        tensor,
    };
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let tau1 = &(&sym_product(e0, e0)? - &sym_product(je0, je0)?) * (r2 / 2.0);
    elements.push(extra(BasisLabel::Tau(1), tau1));
    elements.push(extra(BasisLabel::Tau(2), &sym_product(e0, je0)? * r2));

    let mut k = 1;
    for first in [e0, je0] {
        for second in [&v1.e, &v1.je] {
            for v in second.iter() {
                elements.push(extra(BasisLabel::H(k), &sym_product(first, v)? * r2));
                k += 1;
            }
        }
    }

    let mf = m as f64;
    let mut z = &(&sym_product(e0, e0)? + &sym_product(je0, je0)?) * mf;
    for i in 0..m {
        z = &z - &(&sym_product(v1.e[i], v1.e[i])? + &sym_product(v1.je[i], v1.je[i])?);
    }
    let zeta = &z * (1.0 / (8.0 * mf * (mf + 1.0)).sqrt());
    elements.push(extra(BasisLabel::Zeta, zeta));

    TracelessBasis::new(2 * frame.m(), elements)
}

/// `R̊(φ, φ)` for every element, in basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagValues {
    pub values: Vec<(BasisLabel, Partition, f64)>,
}

impl DiagValues {
    pub fn get(&self, label: BasisLabel) -> Option<f64> {
        self.values.iter().find(|(l, _, _)| *l == label).map(|v| v.2)
    }

    pub fn sum(&self, p: Partition) -> f64 {
        self.values.iter().filter(|v| v.1 == p).map(|v| v.2).sum()
    }

    pub fn sum_where(&self, pred: impl Fn(&BasisLabel) -> bool) -> f64 {
        self.values.iter().filter(|v| pred(&v.0)).map(|v| v.2).sum()
    }

    pub fn collect_where(&self, pred: impl Fn(&BasisLabel) -> bool) -> Vec<f64> {
        self.values.iter().filter(|v| pred(&v.0)).map(|v| v.2).collect()
    }
}

pub fn diag_values(r: &CurvatureOperator, basis: &TracelessBasis) -> Result<DiagValues> {
    if r.dim() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            got: r.dim(),
        });
    }
    let values = basis
        .elements()
        .iter()
        .map(|e| Ok((e.label, e.partition, r.ring(&e.tensor, &e.tensor)?)))
        .collect::<Result<_>>()?;
    Ok(DiagValues { values })
}

/// Closed-form diagonal values of `E⁺ ∪ E⁻` and the two partition sums,
/// evaluated in `frame`. Tolerances are relative to `1 + max|R|`.
pub fn closed_form_report(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let m = k.m();
    if frame.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: frame.m(),
        });
    }
    let basis = TracelessBasis::kahler(frame)?;
    let d = diag_values(k.base(), &basis)?;
    let r = k.base();
    let t = tol * k.scale();
    let mut rep = VerificationReport::new("closed_form_diagonals");
    for (label, _, value) in &d.values {
        let expected = match *label {
            BasisLabel::PhiPlus(i, j) | BasisLabel::PsiPlus(i, j) => {
                2.0 * k.bisectional(frame.e(i - 1), frame.e(j - 1))
            }
            BasisLabel::Theta(i) => {
                let i = if i > m { i - m } else { i };
                k.bisectional(frame.e(i - 1), frame.e(i - 1))
            }
            BasisLabel::PhiMinus(i, j) => {
                let (x, jy) = (frame.e(i - 1), frame.je(j - 1));
                -2.0 * r.eval(x, jy, x, jy)
            }
            BasisLabel::PsiMinus(i, j) => {
                let (x, y) = (frame.e(i - 1), frame.e(j - 1));
                -2.0 * r.eval(x, y, x, y)
            }
            _ => continue,
        };
        rep.equal(format!("diag {label}"), *value, expected, t);
    }
    let s = k.scalar();
    let mf = m as f64;
    rep.equal("sum E+ = S", d.sum(Partition::EPlus), s, t);
    rep.equal("sum E- = -(m-1)/(2m) S", d.sum(Partition::EMinus), -(mf - 1.0) / (2.0 * mf) * s, t);
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumIdentity {
    pub lhs: f64,
    pub rhs: f64,
}

impl SumIdentity {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// `Σ_k R̊(η_k,η_k)` against `-((m-1)/m) Σ_i HSC(e_i) + (2/m) Σ_{i<j} R(e_i,Je_i,e_j,Je_j)`.
pub fn eta_sum_decomposition(k: &KahlerOperator, frame: &UnitaryFrame) -> Result<SumIdentity> {
    let m = k.m();
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    if frame.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: frame.m(),
        });
    }
    let eta = build_e_minus(frame)?;
    let mut lhs = 0.0;
    for e in eta.iter().filter(|e| matches!(e.label, BasisLabel::Eta(_))) {
        lhs += k.base().ring(&e.tensor, &e.tensor)?;
    }
    let mf = m as f64;
    let mut hsc = 0.0;
    let mut cross = 0.0;
    for i in 0..m {
        hsc += k.bisectional(frame.e(i), frame.e(i));
        for j in i + 1..m {
            cross += k.bisectional(frame.e(i), frame.e(j));
        }
    }
    let rhs = -(mf - 1.0) / mf * hsc + 2.0 / mf * cross;
    Ok(SumIdentity { lhs, rhs })
}

/// `R̊(e_i⊙e_i + Je_i⊙Je_i, e_j⊙e_j + Je_j⊙Je_j)` against `-8 R(e_i,Je_i,e_j,Je_j)`,
/// with 1-based `i`, `j` in the standard frame.
pub fn iijiji_identity(k: &KahlerOperator, i: usize, j: usize) -> Result<SumIdentity> {
    iijiji_identity_in(k, &UnitaryFrame::standard(k.m())?, i, j)
}

pub fn iijiji_identity_in(k: &KahlerOperator, frame: &UnitaryFrame, i: usize, j: usize) -> Result<SumIdentity> {
    let m = k.m();
    for idx in [i, j] {
        if idx == 0 || idx > m {
            return Err(Error::Index(format!("index {idx} outside 1..={m}")));
        }
    }
    let t = |a: usize| -> Result<SymTwoTensor> {
        let (e, je) = (frame.e(a - 1), frame.je(a - 1));
        Ok(&sym_product(e, e)? + &sym_product(je, je)?)
    };
    let lhs = k.base().ring(&t(i)?, &t(j)?)?;
    let rhs = -8.0 * k.bisectional(frame.e(i - 1), frame.e(j - 1));
    Ok(SumIdentity { lhs, rhs })
}
