//! Complex structures, Kähler curvature tensors and the curvature
//! functionals defined on them.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::CurvatureOperator;

/// Residual above which `kahler_check` refuses an operator (relative to `1 + max|R|`).
pub const KAHLER_TOL: f64 = 1e-8;

const UNIT_TOL: f64 = 1e-10;

/// The standard complex structure on `R^{2m}`: `J e_i = e_{m+i}`, `J e_{m+i} = -e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    m: usize,
    matrix: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let n = 2 * m;
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..m {
            matrix[(m + i, i)] = 1.0;
            matrix[(i, m + i)] = -1.0;
        }
        Ok(Self { m, matrix })
    }

    pub fn for_dim(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        Self::new(n / 2)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        2 * self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `J v`, computed by permutation and negation only, so it is exact.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        let mut out = DVector::zeros(2 * m);
        for i in 0..m {
            out[i] = -v[m + i];
            out[m + i] = v[i];
        }
        out
    }

    /// `J e_c = sign · e_{target}`.
    fn basis_image(&self, c: usize) -> (usize, f64) {
        if c < self.m {
            (c + self.m, 1.0)
        } else {
            (c - self.m, -1.0)
        }
    }
}

/// An ordered orthonormal frame `{f_1..f_m, Jf_1..Jf_m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryFrame {
    j: ComplexStructure,
    vectors: Vec<DVector<f64>>,
}

impl UnitaryFrame {
    pub fn standard(m: usize) -> Result<Self> {
        let j = ComplexStructure::new(m)?;
        let vectors = (0..2 * m).map(|i| crate::tensor::basis_vector(2 * m, i)).collect();
        Ok(Self { j, vectors })
    }

    /// Completes `f_1..f_m` with their `J`-images and checks orthonormality.
    pub fn from_vectors(first: Vec<DVector<f64>>) -> Result<Self> {
        let m = first.len();
        let j = ComplexStructure::new(m)?;
        if let Some(v) = first.iter().find(|v| v.len() != 2 * m) {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                got: v.len(),
            });
        }
        let images: Vec<_> = first.iter().map(|v| j.apply(v)).collect();
        let vectors: Vec<_> = first.into_iter().chain(images).collect();
        let frame = Self { j, vectors };
        let err = frame.orthonormality_error();
        if err > 1e-10 {
            return Err(Error::InvalidFrame(format!(
                "frame is not orthonormal (Gram error {err:e})"
            )));
        }
        Ok(frame)
    }

    /// Random frame from Gram–Schmidt against all earlier `f_k` and `J f_k`.
    pub fn random(m: usize, seed: u64) -> Result<Self> {
        Self::random_with(m, &mut rng::stream(seed, 0))
    }

    pub fn random_with<R: rand::Rng + ?Sized>(m: usize, r: &mut R) -> Result<Self> {
        let j = ComplexStructure::new(m)?;
        let n = 2 * m;
        let mut first: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut images: Vec<DVector<f64>> = Vec::with_capacity(m);
        while first.len() < m {
            let mut v = rng::gaussian_vector(r, n);
            for _ in 0..2 {
                for u in first.iter().chain(&images) {
                    let c = u.dot(&v);
                    v.axpy(-c, u, 1.0);
                }
            }
            let norm = v.norm();
            if norm < 1e-6 {
                continue;
            }
            v /= norm;
            images.push(j.apply(&v));
            first.push(v);
        }
        let vectors = first.into_iter().chain(images).collect();
        Ok(Self { j, vectors })
    }

    pub fn m(&self) -> usize {
        self.j.m
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// `f_i`, 0-based.
    pub fn e(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i]
    }

    /// `J f_i`, 0-based.
    pub fn je(&self, i: usize) -> &DVector<f64> {
        &self.vectors[self.j.m + i]
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.vectors.len();
        DMatrix::from_fn(k, k, |a, b| self.vectors[a].dot(&self.vectors[b]))
    }

    pub fn orthonormality_error(&self) -> f64 {
        let k = self.vectors.len();
        (self.gram() - DMatrix::identity(k, k)).amax()
    }
}

/// `random_unitary_frame(m, seed)`.
pub fn random_unitary_frame(m: usize, seed: u64) -> Result<UnitaryFrame> {
    UnitaryFrame::random(m, seed)
}

/// A curvature tensor verified to be Kähler for the adapted `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerOperator {
    base: CurvatureOperator,
    j: ComplexStructure,
    residual: f64,
    ricci: DMatrix<f64>,
}

/// `max |R(e_a,e_b,e_c,e_d) - R(e_a,e_b,Je_c,Je_d)|`.
pub fn kahler_residual(r: &CurvatureOperator, j: &ComplexStructure) -> Result<f64> {
    if r.dim() != j.n() {
        return Err(Error::DimensionMismatch {
            expected: j.n(),
            got: r.dim(),
        });
    }
    let n = r.dim();
    let mut worst = 0.0_f64;
    for c in 0..n {
        let (jc, sc) = j.basis_image(c);
        for d in 0..n {
            let (jd, sd) = j.basis_image(d);
            for a in 0..n {
                for b in 0..n {
                    let diff = r.get(a, b, c, d) - sc * sd * r.get(a, b, jc, jd);
                    worst = worst.max(diff.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Wraps `r` as a Kähler operator, or reports the residual that prevents it.
pub fn kahler_check(r: &CurvatureOperator, j: &ComplexStructure) -> Result<KahlerOperator> {
    if r.dim() % 2 == 1 {
        return Err(Error::OddDimension(r.dim()));
    }
    let residual = kahler_residual(r, j)?;
    let tolerance = KAHLER_TOL * r.scale();
    if residual > tolerance {
        return Err(Error::NotKahler {
            residual,
            tolerance,
        });
    }
    let ricci = kahler_ricci(r, j);
    Ok(KahlerOperator {
        base: r.clone(),
        j: j.clone(),
        residual,
        ricci,
    })
}

/// `Ric(X,Y) = Σ_i R(X, JY, e_i, Je_i)`.
fn kahler_ricci(r: &CurvatureOperator, j: &ComplexStructure) -> DMatrix<f64> {
    let n = r.dim();
    let m = j.m();
    let ric = DMatrix::from_fn(n, n, |a, b| {
        let (jb, sb) = j.basis_image(b);
        (0..m).map(|i| sb * r.get(a, jb, i, m + i)).sum()
    });
    (&ric + ric.transpose()) * 0.5
}

impl KahlerOperator {
    /// `kahler_check` against the adapted complex structure of `r`'s dimension.
    pub fn new(r: CurvatureOperator) -> Result<Self> {
        let j = ComplexStructure::for_dim(r.dim())?;
        kahler_check(&r, &j)
    }

    pub fn base(&self) -> &CurvatureOperator {
        &self.base
    }

    pub fn into_base(self) -> CurvatureOperator {
        self.base
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn m(&self) -> usize {
        self.j.m()
    }

    pub fn n(&self) -> usize {
        self.j.n()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn scale(&self) -> f64 {
        self.base.scale()
    }

    /// Ricci tensor from the Kähler trace formula.
    pub fn ricci(&self) -> &DMatrix<f64> {
        &self.ricci
    }

    pub fn scalar(&self) -> f64 {
        self.ricci.trace()
    }

    /// `R(X, JX, Y, JY)` with no constraints on `X`, `Y`.
    pub fn bisectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.base.eval(x, &self.j.apply(x), y, &self.j.apply(y))
    }

    /// Holomorphic sectional curvature `R(X, JX, X, JX)` of a unit vector.
    pub fn hsc(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        check_unit(x, "X")?;
        Ok(self.bisectional(x, x))
    }

    /// Orthogonal bisectional curvature; needs `|X| = |Y| = 1`, `g(X,Y) = g(X,JY) = 0`.
    pub fn orth_bisec(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        self.check_len(y)?;
        check_unit(x, "X")?;
        check_unit(y, "Y")?;
        let gxy = x.dot(y);
        if gxy.abs() > UNIT_TOL {
            return Err(Error::Constraint(format!("g(X,Y) = {gxy:e} must vanish")));
        }
        let gxjy = x.dot(&self.j.apply(y));
        if gxjy.abs() > UNIT_TOL {
            return Err(Error::Constraint(format!("g(X,JY) = {gxjy:e} must vanish")));
        }
        Ok(self.bisectional(x, y))
    }

    pub fn ricci_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.ricci * x))
    }

    /// `Ric⊥(X,X) = Ric(X,X) - R(X,JX,X,JX)/|X|²`.
    pub fn ric_perp(&self, x: &DVector<f64>) -> Result<f64> {
        self.mixed_c(1.0, -1.0, x)
    }

    /// `a Ric(X,X) + b R(X,JX,X,JX)/|X|²`.
    pub fn mixed_c(&self, a: f64, b: f64, x: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        let norm2 = x.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::Constraint("X must be nonzero".into()));
        }
        Ok(a * self.ricci_form(x) + b * self.bisectional(x, x) / norm2)
    }

    /// `2 Σ_{i,j} R(f_i, Jf_i, f_j, Jf_j)` over a unitary frame.
    pub fn scalar_from_frame(&self, frame: &UnitaryFrame) -> f64 {
        let m = frame.m();
        let mut s = 0.0;
        for i in 0..m {
            for k in 0..m {
                s += self.bisectional(frame.e(i), frame.e(k));
            }
        }
        2.0 * s
    }

    /// Largest violation of the `J`-invariance relations
    /// `R(X,Y,Z,W) = R(JX,JY,Z,W) = R(X,Y,JZ,JW) = R(JX,JY,JZ,JW)` on basis vectors.
    pub fn j_invariance_residual(&self) -> f64 {
        let r = &self.base;
        let n = r.dim();
        let mut worst = 0.0_f64;
        for a in 0..n {
            let (ja, sa) = self.j.basis_image(a);
            for b in 0..n {
                let (jb, sb) = self.j.basis_image(b);
                for c in 0..n {
                    let (jc, sc) = self.j.basis_image(c);
                    for d in 0..n {
                        let (jd, sd) = self.j.basis_image(d);
                        let v = r.get(a, b, c, d);
                        let front = sa * sb * r.get(ja, jb, c, d);
                        let back = sc * sd * r.get(a, b, jc, jd);
                        let both = sa * sb * sc * sd * r.get(ja, jb, jc, jd);
                        worst = worst
                            .max((v - front).abs())
                            .max((v - back).abs())
                            .max((v - both).abs());
                    }
                }
            }
        }
        worst
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Value and Euclidean gradient of `R(X,JX,X,JX)`.
    fn hsc_with_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let jx = self.j.apply(x);
        let p = self.base.contract_last_pair(x, &jx);
        let py = &p * &jx;
        let ptx = p.tr_mul(x);
        let value = x.dot(&py);
        let grad = (py - self.j.apply(&ptx)) * 2.0;
        (value, grad)
    }

    /// Value of `R(X,JX,Y,JY)` and its gradients in `X` and `Y`.
    fn bisec_with_grad(&self, x: &DVector<f64>, y: &DVector<f64>) -> (f64, DVector<f64>, DVector<f64>) {
        let jx = self.j.apply(x);
        let jy = self.j.apply(y);
        let p = self.base.contract_last_pair(y, &jy);
        let pjx = &p * &jx;
        let value = x.dot(&pjx);
        let gx = pjx - self.j.apply(&p.tr_mul(x));
        let q = self.base.contract_last_pair(x, &jx);
        let qjy = &q * &jy;
        let gy = qjy - self.j.apply(&q.tr_mul(y));
        (value, gx, gy)
    }
}

fn check_unit(x: &DVector<f64>, name: &str) -> Result<()> {
    let norm = x.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Constraint(format!("|{name}| = {norm} is not 1")));
    }
    Ok(())
}

/// Curvature functionals that can be extremized over admissible inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Hsc,
    OrthBisec,
    RicPerp,
    /// `a Ric(X,X) + b R(X,JX,X,JX)` on unit `X`.
    Mixed { a: f64, b: f64 },
}

impl Functional {
    pub const MIXED_2_MINUS_1: Functional = Functional::Mixed { a: 2.0, b: -1.0 };

    pub fn name(&self) -> String {
        match self {
            Functional::Hsc => "hsc".into(),
            Functional::OrthBisec => "orth_bisec".into(),
            Functional::RicPerp => "ric_perp".into(),
            Functional::Mixed { a, b } => format!("mixed_c({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub functional: Functional,
    pub min: f64,
    pub max: f64,
    /// First input vector at which `min` was seen.
    pub argmin: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFunctionalReport {
    pub samples: usize,
    pub seed: u64,
    pub hsc: Extremes,
    /// Absent for complex dimension one, where no admissible pair exists.
    pub orth_bisec: Option<Extremes>,
    pub ric_perp: Extremes,
    pub mixed_2_minus_1: Extremes,
}

const DESCENT_STEPS: usize = 20;

fn step_size(iteration: usize) -> f64 {
    0.1 / (1.0 + iteration as f64)
}

fn tangent(g: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    g - x * g.dot(x)
}

/// Sampled min/max of a functional: `samples` random admissible starting
/// points, each refined by a fixed-schedule projected descent (and ascent).
/// The returned `min` is an upper bound on the true minimum.
pub fn functional_extremes(k: &KahlerOperator, functional: Functional, samples: usize, seed: u64) -> Result<Extremes> {
    if samples == 0 {
        return Err(Error::Constraint("samples must be >= 1".into()));
    }
    if functional == Functional::OrthBisec && k.m() < 2 {
        return Err(Error::Constraint(
            "orthogonal bisectional curvature needs complex dimension >= 2".into(),
        ));
    }
    let per_sample: Vec<(f64, Vec<f64>, f64)> = (0..samples)
        .into_par_iter()
        .map(|s| match functional {
            Functional::OrthBisec => pair_sample(k, seed, s as u64),
            _ => vector_sample(k, functional, seed, s as u64),
        })
        .collect();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut argmin = Vec::new();
    for (lo, arg, hi) in per_sample {
        if lo < min {
            min = lo;
            argmin = arg;
        }
        max = max.max(hi);
    }
    Ok(Extremes {
        functional,
        min,
        max,
        argmin,
    })
}

fn sphere_value_grad(k: &KahlerOperator, functional: Functional, x: &DVector<f64>) -> (f64, DVector<f64>) {
    let (h, gh) = k.hsc_with_grad(x);
    let ric_x = k.ricci() * x;
    let (a, b) = match functional {
        Functional::Hsc => return (h, gh),
        Functional::RicPerp => (1.0, -1.0),
        Functional::Mixed { a, b } => (a, b),
        Functional::OrthBisec => unreachable!("pairs are handled separately"),
    };
    (a * x.dot(&ric_x) + b * h, ric_x * (2.0 * a) + gh * b)
}

fn vector_sample(k: &KahlerOperator, functional: Functional, seed: u64, s: u64) -> (f64, Vec<f64>, f64) {
    let mut r = rng::stream(seed, s);
    let start = rng::unit_vector(&mut r, k.n());
    let (v0, _) = sphere_value_grad(k, functional, &start);
    let mut best_lo = (v0, start.clone());
    let mut best_hi = v0;
    for sign in [-1.0, 1.0] {
        let mut x = start.clone();
        for it in 0..DESCENT_STEPS {
            let (_, g) = sphere_value_grad(k, functional, &x);
            let g = tangent(&g, &x);
            x += g * (sign * step_size(it));
            x /= x.norm();
            let (v, _) = sphere_value_grad(k, functional, &x);
            if v < best_lo.0 {
                best_lo = (v, x.clone());
            }
            best_hi = best_hi.max(v);
        }
    }
    (best_lo.0, best_lo.1.as_slice().to_vec(), best_hi)
}

fn project_pair(k: &KahlerOperator, x: &mut DVector<f64>, y: &mut DVector<f64>) {
    *x /= x.norm();
    let jx = k.j.apply(x);
    for _ in 0..2 {
        let c = y.dot(x);
        y.axpy(-c, x, 1.0);
        let c = y.dot(&jx);
        y.axpy(-c, &jx, 1.0);
    }
    *y /= y.norm();
}

fn pair_sample(k: &KahlerOperator, seed: u64, s: u64) -> (f64, Vec<f64>, f64) {
    let frame = UnitaryFrame::random_with(k.m(), &mut rng::stream(seed, s))
        .expect("complex dimension checked by caller");
    let (x0, y0) = (frame.e(0).clone(), frame.e(1).clone());
    let (v0, _, _) = k.bisec_with_grad(&x0, &y0);
    let mut best_lo = (v0, x0.clone());
    let mut best_hi = v0;
    for sign in [-1.0, 1.0] {
        let (mut x, mut y) = (x0.clone(), y0.clone());
        for it in 0..DESCENT_STEPS {
            let (_, gx, gy) = k.bisec_with_grad(&x, &y);
            let step = sign * step_size(it);
            let gx = tangent(&gx, &x);
            let gy = tangent(&gy, &y);
            x += gx * step;
            y += gy * step;
            project_pair(k, &mut x, &mut y);
            let (v, _, _) = k.bisec_with_grad(&x, &y);
            if v < best_lo.0 {
                best_lo = (v, x.clone());
            }
            best_hi = best_hi.max(v);
        }
    }
    (best_lo.0, best_lo.1.as_slice().to_vec(), best_hi)
}

/// All four functionals at once.
pub fn curvature_report(k: &KahlerOperator, samples: usize, seed: u64) -> Result<CurvatureFunctionalReport> {
    let orth_bisec = if k.m() >= 2 {
        Some(functional_extremes(k, Functional::OrthBisec, samples, seed)?)
    } else {
        None
    };
    Ok(CurvatureFunctionalReport {
        samples,
        seed,
        hsc: functional_extremes(k, Functional::Hsc, samples, seed)?,
        orth_bisec,
        ric_perp: functional_extremes(k, Functional::RicPerp, samples, seed)?,
        mixed_2_minus_1: functional_extremes(k, Functional::MIXED_2_MINUS_1, samples, seed)?,
    })
}
