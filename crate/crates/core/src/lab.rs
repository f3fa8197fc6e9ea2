//! Numerical verification of the identity chains behind the threshold
//! constants, and property suites for the implications they yield.

use rayon::prelude::*;

use crate::basis::{build_product_basis, diag_values, BasisLabel, DiagValues, Partition, TracelessBasis};
use crate::error::{Error, Result};
use crate::kahler::{functional_extremes, Functional, KahlerOperator, UnitaryFrame};
use crate::models::{const_hsc, cp_times_cp1, random_algebraic, random_kahler, sphere};
use crate::report::VerificationReport;
use crate::rng;
use crate::spectral::{alpha_m, beta_m, expected_trace, f_partial, gamma_m, spectrum, to_f64, AlphaStatus, Spectrum};
use crate::tensor::CurvatureOperator;

/// Default relative tolerance of identity chains.
pub const CHAIN_TOL: f64 = 1e-9;
/// Default number of samples per sampled functional.
pub const SAMPLES: usize = 2000;

fn need_m(k: &KahlerOperator, frame: &UnitaryFrame, min: usize) -> Result<usize> {
    let m = k.m();
    if m < min {
        return Err(Error::InvalidDimension(m));
    }
    if frame.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: frame.m(),
        });
    }
    Ok(m)
}

fn kahler_diags(k: &KahlerOperator, frame: &UnitaryFrame) -> Result<DiagValues> {
    diag_values(k.base(), &TracelessBasis::kahler(frame)?)
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// `E⁻` sum, mean of `E⁺`, the average bound at `(m²-1)/2` and the cancellation.
pub fn identity_chain_flat(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let m = need_m(k, frame, 2)?;
    let mf = m as f64;
    let d = kahler_diags(k, frame)?;
    let s = k.scalar();
    let t = tol * k.scale();
    let mut rep = VerificationReport::new("chain_flat");
    let e_minus = d.sum(Partition::EMinus);
    rep.equal("(a) sum E- = -(m-1)/(2m) S", e_minus, -(mf - 1.0) / (2.0 * mf) * s, t);
    let a: Vec<f64> = d.values.iter().filter(|v| v.1 == Partition::EPlus).map(|v| v.2).collect();
    let a_bar = mean(&a);
    rep.equal("(b) mean of E+ = S/(m(m+1))", a_bar, s / (mf * (mf + 1.0)), t);
    let x = (mf * mf - 1.0) / 2.0;
    rep.at_most("(c) f(A,(m²-1)/2) <= (m-1)/(2m) S", f_partial(&a, x)?, (mf - 1.0) / (2.0 * mf) * s, t);
    rep.equal("(d) sum E- + (m²-1)/2 · mean = 0", e_minus + x * a_bar, 0.0, t);
    Ok(rep)
}

/// Exact form of the orthogonal-bisectional estimate, with averages in place of f-bounds.
pub fn identity_chain_ob(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let m = need_m(k, frame, 2)?;
    let mf = m as f64;
    let d = kahler_diags(k, frame)?;
    let s = k.scalar();
    let t = tol * k.scale();
    let mut rep = VerificationReport::new("chain_ob");
    let e_minus = d.sum(Partition::EMinus);
    let phi12 = d.get(BasisLabel::PhiPlus(1, 2)).expect("m >= 2");
    let psi12 = d.get(BasisLabel::PsiPlus(1, 2)).expect("m >= 2");
    let a_bar = mean(&d.collect_where(|l| matches!(l, BasisLabel::Theta(i) if *i <= m)));
    let rest = d.collect_where(|l| match *l {
        BasisLabel::PhiPlus(i, j) | BasisLabel::PsiPlus(i, j) => (i, j) != (1, 2),
        _ => false,
    });
    let b_bar = mean(&rest);
    rep.equal("sum E- = -(m-1)/(2m) S", e_minus, -(mf - 1.0) / (2.0 * mf) * s, t);
    let lhs = e_minus + phi12 + psi12 + (mf - 1.0) * a_bar + (mf - 2.0) * (mf * mf - 1.0) / (2.0 * mf) * b_bar;
    let rhs = 2.0 * (mf + 1.0) / mf * k.bisectional(frame.e(0), frame.e(1));
    rep.equal("chain = 2(m+1)/m R(e1,Je1,e2,Je2)", lhs, rhs, t);
    Ok(rep)
}

/// Exact form of the holomorphic-sectional estimate.
pub fn identity_chain_h(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let m = need_m(k, frame, 2)?;
    let mf = m as f64;
    let d = kahler_diags(k, frame)?;
    let s = k.scalar();
    let t = tol * k.scale();
    let mut rep = VerificationReport::new("chain_h");
    let r11 = k.bisectional(frame.e(0), frame.e(0));
    let e_minus = d.sum(Partition::EMinus);
    let th1 = d.get(BasisLabel::Theta(1)).expect("θ1");
    let thm1 = d.get(BasisLabel::Theta(m + 1)).expect("θ(m+1)");
    let rest: Vec<f64> = d
        .values
        .iter()
        .filter(|v| v.1 == Partition::EPlus && !matches!(v.0, BasisLabel::Theta(i) if i == 1 || i == m + 1))
        .map(|v| v.2)
        .collect();
    let a_bar = mean(&rest);
    rep.equal(
        "mean of remaining E+ = (S - 2 HSC(e1))/((m-1)(m+2))",
        a_bar,
        (s - 2.0 * r11) / ((mf - 1.0) * (mf + 2.0)),
        t,
    );
    let lhs = e_minus + th1 + thm1 + (mf - 1.0) * (mf - 1.0) * (mf + 2.0) / (2.0 * mf) * a_bar;
    rep.equal("chain = (m+1)/m HSC(e1)", lhs, (mf + 1.0) / mf * r11, t);
    Ok(rep)
}

/// Quantities of the split `V_0 ⊕ V_1` shared by the last two chains.
struct Split {
    m: usize,
    d: DiagValues,
    r00: f64,
    ric00: f64,
    /// `Σ_{i,j ≥ 1} R(e_i,Je_i,e_j,Je_j)`.
    sigma: f64,
    e_minus: f64,
    h_sum: f64,
    zeta: f64,
    tau: (f64, f64),
}

fn split(k: &KahlerOperator, frame: &UnitaryFrame) -> Result<Split> {
    let total = need_m(k, frame, 2)?;
    let m = total - 1;
    let basis = build_product_basis(frame)?;
    let d = diag_values(k.base(), &basis)?;
    let e0 = frame.e(0);
    let mut sigma = 0.0;
    for i in 1..total {
        for j in 1..total {
            sigma += k.bisectional(frame.e(i), frame.e(j));
        }
    }
    Ok(Split {
        m,
        r00: k.bisectional(e0, e0),
        ric00: k.ricci_form(e0),
        sigma,
        e_minus: d.sum(Partition::EMinus),
        h_sum: d.sum_where(|l| matches!(l, BasisLabel::H(_))),
        zeta: d.get(BasisLabel::Zeta).expect("ζ"),
        tau: (
            d.get(BasisLabel::Tau(1)).expect("τ1"),
            d.get(BasisLabel::Tau(2)).expect("τ2"),
        ),
        d,
    })
}

fn split_closed_forms(sp: &Split, rep: &mut VerificationReport, t: f64) {
    let mf = sp.m as f64;
    let ric_perp = sp.ric00 - sp.r00;
    rep.equal("τ1 = R(e0,Je0,e0,Je0)", sp.tau.0, sp.r00, t);
    rep.equal("τ2 = R(e0,Je0,e0,Je0)", sp.tau.1, sp.r00, t);
    rep.equal("sum h = 2 Ric⊥(e0,e0)", sp.h_sum, 2.0 * ric_perp, t);
    let zeta = -mf / (mf + 1.0) * sp.r00 + 2.0 / (mf + 1.0) * ric_perp - sp.sigma / (mf * (mf + 1.0));
    rep.equal("ζ three-term formula", sp.zeta, zeta, t);
    rep.equal("sum E-(V1) = -(m-1)/m Σ", sp.e_minus, -(mf - 1.0) / mf * sp.sigma, t);
}

/// The orthogonal-Ricci chain on complex dimension `m+1`, with `e_0 = frame.e(0)`.
pub fn identity_chain_ric_perp(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let sp = split(k, frame)?;
    let t = tol * k.scale();
    let mf = sp.m as f64;
    let mut rep = VerificationReport::new("chain_ric_perp");
    split_closed_forms(&sp, &mut rep, t);
    let a: Vec<f64> = sp
        .d
        .values
        .iter()
        .filter(|v| v.1 == Partition::EPlus || matches!(v.0, BasisLabel::Tau(_)))
        .map(|v| v.2)
        .collect();
    rep.flag("|A| = m²+m+2", a.len() == sp.m * sp.m + sp.m + 2);
    let a_bar = mean(&a);
    let count = mf * mf + mf + 2.0;
    rep.equal("mean(A) = 2(Σ + R00)/(m²+m+2)", a_bar, 2.0 * (sp.sigma + sp.r00) / count, t);
    let x = mf * count / (2.0 * (mf + 1.0));
    let lhs = sp.e_minus + sp.h_sum + sp.zeta + x * a_bar;
    let rhs = 2.0 * (mf + 2.0) / (mf + 1.0) * (sp.ric00 - sp.r00);
    rep.equal("chain = 2(m+2)/(m+1) Ric⊥(e0,e0)", lhs, rhs, t);
    Ok(rep)
}

/// The mixed-curvature chain on complex dimension `m+1`, with `e_0 = frame.e(0)`.
pub fn identity_chain_mixed(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let sp = split(k, frame)?;
    let t = tol * k.scale();
    let mf = sp.m as f64;
    let mut rep = VerificationReport::new("chain_mixed");
    split_closed_forms(&sp, &mut rep, t);
    let a = sp.d.collect_where(|l| {
        matches!(
            l,
            BasisLabel::PhiPlus(..) | BasisLabel::PsiPlus(..) | BasisLabel::Theta(_)
        )
    });
    let a_bar = mean(&a);
    rep.equal("mean E+(V1) = 2Σ/(m(m+1))", a_bar, 2.0 * sp.sigma / (mf * (mf + 1.0)), t);
    let lhs = sp.e_minus + sp.h_sum + sp.zeta + sp.tau.0 + sp.tau.1 + mf * mf / 2.0 * a_bar;
    let rhs = (mf + 2.0) / (mf + 1.0) * (2.0 * sp.ric00 - sp.r00);
    rep.equal("chain = (m+2)/(m+1) (2Ric(e0,e0) - R00)", lhs, rhs, t);
    Ok(rep)
}

/// Every chain that applies to the complex dimension of `k`.
pub fn identity_chains(k: &KahlerOperator, frame: &UnitaryFrame, tol: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("chains");
    if k.m() >= 2 {
        rep.extend(identity_chain_flat(k, frame, tol)?);
        rep.extend(identity_chain_ob(k, frame, tol)?);
        rep.extend(identity_chain_h(k, frame, tol)?);
        rep.extend(identity_chain_ric_perp(k, frame, tol)?);
        rep.extend(identity_chain_mixed(k, frame, tol)?);
    }
    Ok(rep)
}

/// Which implication is exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// `(3/2)(m²-1)`-nonnegative forces constant holomorphic sectional curvature.
    Constancy = 1,
    /// `α_m`-nonnegative forces nonnegative orthogonal bisectional and holomorphic sectional curvature.
    OrthBisec = 2,
    /// `β_m`-nonnegative forces nonnegative orthogonal Ricci curvature.
    RicPerp = 3,
    /// `γ_m`-nonnegative forces nonnegative `2Ric - HSC`.
    Mixed = 4,
}

impl TryFrom<u8> for Part {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Part::Constancy),
            2 => Ok(Part::OrthBisec),
            3 => Ok(Part::RicPerp),
            4 => Ok(Part::Mixed),
            _ => Err(Error::OutOfRange {
                value: v as f64,
                lo: 1.0,
                hi: 4.0,
            }),
        }
    }
}

impl Part {
    /// The α at which the hypothesis is imposed.
    pub fn constant(self, m: usize) -> f64 {
        let mi = m as i64;
        match self {
            Part::Constancy => 1.5 * (m * m - 1) as f64,
            Part::OrthBisec => to_f64(alpha_m(mi)),
            Part::RicPerp => to_f64(beta_m(mi)),
            Part::Mixed => to_f64(gamma_m(mi)),
        }
    }
}

/// 64 geometric points on `[1e-3, 1e3]`.
pub fn shift_grid() -> Vec<f64> {
    (0..64).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 63.0)).collect()
}

/// Sample variance of the holomorphic sectional curvature over random unit vectors.
pub fn hsc_variance(k: &KahlerOperator, samples: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed, u64::MAX);
    let vals: Vec<f64> = (0..samples)
        .map(|_| {
            let x = rng::unit_vector(&mut r, k.n());
            k.bisectional(&x, &x)
        })
        .collect();
    let mu = mean(&vals);
    vals.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / vals.len().max(1) as f64
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
}

impl SuiteOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            samples: SAMPLES,
            seed,
        }
    }
}

/// Smallest grid shift `t` with `R + t·CP^m(4)` α-nonnegative.
fn shifted(r: &KahlerOperator, cp: &KahlerOperator, alpha: f64) -> Result<Option<(f64, KahlerOperator, Spectrum)>> {
    for t in shift_grid() {
        let rt = KahlerOperator::new(r.base().lin_comb(1.0, cp.base(), t))?;
        let spec = spectrum(rt.base())?;
        if spec.status(alpha)?.status.is_nonnegative() {
            return Ok(Some((t, rt, spec)));
        }
    }
    Ok(None)
}

pub fn implication_suite(part: Part, m: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    implication_suite_with(part, m, SuiteOptions::new(trials, seed))
}

pub fn implication_suite_with(part: Part, m: usize, opts: SuiteOptions) -> Result<VerificationReport> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    if opts.trials == 0 || opts.samples == 0 {
        return Err(Error::Constraint("trials and samples must be >= 1".into()));
    }
    let alpha = part.constant(m);
    let cp = const_hsc(m, 4.0)?;
    let per_trial = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let sub = rng::derive(opts.seed, trial as u64);
            let mut rep = VerificationReport::new(format!("trial{trial}"));
            match part {
                Part::Constancy => constancy_trial(&mut rep, m, alpha, sub, opts.samples)?,
                _ => {
                    let r = random_kahler(m, sub)?;
                    match shifted(&r, &cp, alpha)? {
                        None => {
                            rep.flag("hypothesis reachable on the shift grid", false);
                        }
                        Some((t, rt, spec)) => {
                            let verdict = spec.status(alpha)?;
                            rep.at_least(format!("hypothesis f(eigs,{alpha:.4}) >= 0 at t={t:.4e}"), verdict.f_nonneg, 0.0, verdict.tolerance);
                            conclusion(&mut rep, part, &rt, opts.samples, sub)?;
                        }
                    }
                }
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = VerificationReport::new(format!("implication_part{}", part as u8));
    rep.seeds.push(opts.seed);
    for r in per_trial {
        rep.extend(r);
    }
    rep.trials = opts.trials;
    if part == Part::RicPerp {
        boundary_ric_perp(&mut rep, m, opts)?;
    }
    Ok(rep)
}

fn conclusion(rep: &mut VerificationReport, part: Part, k: &KahlerOperator, samples: usize, seed: u64) -> Result<()> {
    let t = 1e-6 * k.scale();
    let fs: &[Functional] = match part {
        Part::OrthBisec => &[Functional::OrthBisec, Functional::Hsc],
        Part::RicPerp => &[Functional::RicPerp],
        Part::Mixed => &[Functional::MIXED_2_MINUS_1],
        Part::Constancy => &[],
    };
    for f in fs {
        let e = functional_extremes(k, *f, samples, seed)?;
        rep.at_least(format!("min {} >= 0", f.name()), e.min, 0.0, t);
    }
    Ok(())
}

/// Hypothesis-satisfying inputs for constancy are the nonnegative multiples
/// of `CP^m`; random tensors provide the contrapositive.
fn constancy_trial(rep: &mut VerificationReport, m: usize, alpha: f64, seed: u64, samples: usize) -> Result<()> {
    let c = 8.0 * rand::Rng::random::<f64>(&mut rng::stream(seed, 0));
    let k = const_hsc(m, c)?;
    let spec = spectrum(k.base())?;
    let v = spec.status(alpha)?;
    rep.flag(format!("c={c:.4}: hypothesis holds"), v.status.is_nonnegative());
    let var = hsc_variance(&k, samples, seed);
    rep.at_most("HSC variance", var, 0.0, 1e-6 * (1.0 + k.scalar().abs()));
    rep.at_least("S >= 0", k.scalar(), 0.0, 1e-9);

    let r = random_kahler(m, seed)?;
    let var = hsc_variance(&r, samples, seed);
    rep.flag("random tensor has nonconstant HSC", var > 1e-6 * (1.0 + r.scalar().abs()));
    let f = spectrum(r.base())?.f(alpha)?;
    rep.below("contrapositive f(eigs,(3/2)(m²-1)) < -1e-8", f, -1e-8);
    Ok(())
}

/// `CP^{m-1}(4) × CP^1(4)` sits exactly at the `β_m` threshold and has a
/// vanishing orthogonal Ricci direction along the `CP^1` factor.
fn boundary_ric_perp(rep: &mut VerificationReport, m: usize, opts: SuiteOptions) -> Result<()> {
    let k = cp_times_cp1(m, 1.0)?;
    let beta = Part::RicPerp.constant(m);
    let v = spectrum(k.base())?.status(beta)?;
    rep.flag("boundary: product is β_m-nonnegative", v.status.is_nonnegative());
    let e = functional_extremes(&k, Functional::RicPerp, opts.samples, opts.seed)?;
    rep.at_least("boundary: sampled min Ric⊥ >= -1e-6", e.min, 0.0, 1e-6);
    rep.at_most("boundary: sampled min Ric⊥ <= 1e-3", e.min, 1e-3, 0.0);
    let x = crate::tensor::basis_vector(k.n(), 0);
    rep.equal("boundary: Ric⊥ vanishes along CP^1", k.ric_perp(&x)?, 0.0, 1e-12);
    Ok(())
}

/// No multiple of `CP^m` is α-positive or α-negative below `(3/2)(m²-1)`,
/// and generic tensors are indefinite there.
pub fn sign_window_suite(m: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    let top = Part::Constancy.constant(m);
    let grid: Vec<f64> = (0..10).map(|i| 1.0 + (top - 1.0) * i as f64 / 9.0).collect();
    let mut rep = VerificationReport::new("sign_window");
    rep.seeds.push(seed);
    rep.trials = trials;
    for c in [-4.0, 0.0, 4.0] {
        let k = const_hsc(m, c)?;
        let spec = spectrum(k.base())?;
        let neg = spectrum(&-k.base())?;
        for &a in &grid {
            let s = spec.status(a)?.status;
            if c == 0.0 {
                rep.flag(format!("flat: zero at α={a:.3}"), s == AlphaStatus::Zero);
            } else {
                rep.flag(format!("c={c}: not positive/negative at α={a:.3} ({s})"), !matches!(s, AlphaStatus::Positive | AlphaStatus::Negative));
            }
            rep.flag(format!("c={c}: status(-R) = -status(R) at α={a:.3}"), neg.status(a)?.status == s.negated());
        }
    }
    let randoms = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = random_kahler(m, rng::derive(seed, t as u64))?;
            let spec = spectrum(r.base())?;
            let ok = grid
                .iter()
                .map(|&a| spec.status(a).map(|v| v.status == AlphaStatus::Indefinite))
                .collect::<Result<Vec<bool>>>()?;
            Ok(ok.into_iter().all(|b| b))
        })
        .collect::<Result<Vec<bool>>>()?;
    for (t, ok) in randoms.into_iter().enumerate() {
        rep.flag(format!("random {t}: indefinite on the grid"), ok);
    }
    Ok(rep)
}

/// Scalar-curvature sign statements in spectral form: `f(eigs, N)` is the trace,
/// so `N`-nonnegativity is `S >= 0`; and a nonflat tensor with `S = 0` has
/// `f(eigs, α) < 0` for every `α < N`.
pub fn scalar_sign_suite(n: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("scalar_sign_n{n}"));
    rep.seeds.push(seed);
    rep.trials = trials;
    let reference = sphere(n, 1.0)?;
    let s_ref = reference.scalar_curvature();
    let results = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<VerificationReport> {
            let mut rep = VerificationReport::new(format!("trial{t}"));
            let r = random_algebraic(n, rng::derive(seed, t as u64))?;
            let big_n = (n - 1) * (n + 2) / 2;
            for (label, x) in [("+", 1.0), ("-", -1.0)] {
                // Shift so that the scalar curvature has a prescribed sign.
                let target = x * (0.5 + t as f64);
                let shift = (target - r.scalar_curvature()) / s_ref;
                let rs: CurvatureOperator = r.lin_comb(1.0, &reference, shift);
                let spec = spectrum(&rs)?;
                let s = rs.scalar_curvature();
                let v = spec.status(big_n as f64)?;
                rep.equal(format!("S{label}: f(eigs,N) = (n+2)/(2n) S"), v.f_nonneg, expected_trace(n, s), 1e-9 * rs.scale());
                rep.flag(format!("S{label}: N-nonnegative iff S >= 0"), v.status.is_nonnegative() == (s >= 0.0));
            }
            let shift = -r.scalar_curvature() / s_ref;
            let r0 = r.lin_comb(1.0, &reference, shift);
            let spec = spectrum(&r0)?;
            let tol = spec.tolerance();
            for i in 0..20 {
                let a = 1.0 + (big_n as f64 - 2.0) * i as f64 / 19.0;
                rep.below(format!("S=0: f(eigs,{a:.3}) < 0"), spec.f(a)?, -tol);
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    for r in results {
        rep.extend(r);
    }
    Ok(rep)
}

/// The random counterpart used by `scalar_sign_suite` for Kähler inputs.
pub fn scalar_sign_suite_kahler(m: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("scalar_sign_kahler_m{m}"));
    rep.seeds.push(seed);
    rep.trials = trials;
    let cp = const_hsc(m, 4.0)?;
    let s_ref = cp.scalar();
    let n = 2 * m;
    let big_n = (n - 1) * (n + 2) / 2;
    for t in 0..trials {
        let r = random_kahler(m, rng::derive(seed, t as u64))?;
        let r0 = r.base().lin_comb(1.0, cp.base(), -r.scalar() / s_ref);
        let spec = spectrum(&r0)?;
        let tol = spec.tolerance();
        for i in 0..20 {
            let a = 1.0 + (big_n as f64 - 2.0) * i as f64 / 19.0;
            rep.below(format!("trial{t} S=0: f(eigs,{a:.3}) < 0"), spec.f(a)?, -tol);
        }
        let spec = spectrum(r.base())?;
        let v = spec.status(big_n as f64)?;
        rep.flag(format!("trial{t}: N-nonnegative iff S >= 0"), v.status.is_nonnegative() == (r.scalar() >= 0.0));
    }
    Ok(rep)
}
