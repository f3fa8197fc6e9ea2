//! Euclidean primitives: symmetric two-tensors, algebraic curvature tensors
//! and the two bilinear forms induced on `S²(V)`.
//!
//! Index convention: `R(X,Y,X,Y)` is the (unnormalized) sectional curvature,
//! so the unit round sphere has `R_{ijij} = +1` for `i != j`. All tensor
//! indices are 0-based.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Convention tag carried by every serialized curvature tensor.
pub const CONVENTION: &str = "sectional-positive";

/// Relative tolerance for the first Bianchi identity.
pub const BIANCHI_TOL: f64 = 1e-10;

const TRACE_TOL: f64 = 1e-12;

/// Real dimension of the underlying inner-product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceDim(usize);

impl SpaceDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// `N = (n-1)(n+2)/2`, the dimension of the traceless symmetric two-tensors.
    pub fn traceless_dim(self) -> usize {
        (self.0 - 1) * (self.0 + 2) / 2
    }
}

/// Standard basis vector `e_i` of `R^n`.
pub fn basis_vector(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// A symmetric `n x n` matrix. Symmetry is exact: the stored matrix is the
/// symmetrization of whatever was passed in.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTwoTensor {
    entries: DMatrix<f64>,
    traceless: bool,
}

impl SymTwoTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
            traceless: true,
        }
    }

    /// Accepts a square matrix that is symmetric up to rounding.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = 1.0 + m.amax();
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Constraint(format!(
                "matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: DMatrix<f64>) -> Self {
        let entries = (&m + m.transpose()) * 0.5;
        let traceless = entries.trace().abs() <= TRACE_TOL * (1.0 + entries.amax());
        Self { entries, traceless }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Column-major flattening, used for projectors and Gram matrices.
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(self.entries.as_slice())
    }
}

impl Add for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn add(self, rhs: &SymTwoTensor) -> SymTwoTensor {
        SymTwoTensor::symmetrized(&self.entries + &rhs.entries)
    }
}

impl Sub for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn sub(self, rhs: &SymTwoTensor) -> SymTwoTensor {
        SymTwoTensor::symmetrized(&self.entries - &rhs.entries)
    }
}

impl Mul<f64> for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn mul(self, rhs: f64) -> SymTwoTensor {
        SymTwoTensor::symmetrized(&self.entries * rhs)
    }
}

/// `u ⊙ v = u ⊗ v + v ⊗ u`.
pub fn sym_product(u: &DVector<f64>, v: &DVector<f64>) -> Result<SymTwoTensor> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let m = u * v.transpose() + v * u.transpose();
    Ok(SymTwoTensor::symmetrized(m))
}

/// `<A, B> = tr(Aᵀ B)`.
pub fn inner_sym(a: &SymTwoTensor, b: &SymTwoTensor) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.entries.dot(&b.entries))
}

/// Ricci tensor and scalar curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct Scalars {
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// Dense rank-4 curvature array with write-through canonical storage: every
/// write fills the whole orbit under `R_{ijkl} = -R_{jikl} = -R_{ijlk} = R_{klij}`,
/// so those relations hold exactly for every stored tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperator {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureOperator {
    /// The flat (zero) tensor. `n = 1` is allowed so that a flat line can be
    /// used as a product factor.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n.pow(4)],
        }
    }

    /// Builds a tensor by evaluating `f` on canonical representatives
    /// `i < j`, `k < l`, `(i,j) <= (k,l)` and writing each value through its orbit.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut r = Self::zeros(n);
        for (i, j, k, l) in canonical_quadruples(n) {
            let v = f(i, j, k, l);
            if v != 0.0 {
                r.write_orbit(i, j, k, l, v);
            }
        }
        r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    /// Sets `R_{ijkl} = v` together with its symmetry orbit.
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) -> Result<()> {
        let n = self.n;
        if i >= n || j >= n || k >= n || l >= n {
            return Err(Error::Index(format!(
                "({i},{j},{k},{l}) out of range for n={n}"
            )));
        }
        if (i == j || k == l) && v != 0.0 {
            return Err(Error::Index(format!(
                "component ({i},{j},{k},{l}) is forced to zero by antisymmetry"
            )));
        }
        if i != j && k != l {
            self.write_orbit(i, j, k, l, v);
        }
        Ok(())
    }

    fn write_orbit(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        for (a, b, c, d, s) in [
            (i, j, k, l, v),
            (j, i, k, l, -v),
            (i, j, l, k, -v),
            (j, i, l, k, v),
            (k, l, i, j, v),
            (l, k, i, j, -v),
            (k, l, j, i, -v),
            (l, k, j, i, v),
        ] {
            let idx = self.idx(a, b, c, d);
            self.data[idx] = s;
        }
    }

    /// Adds `v` to one entry only, bypassing canonical storage. Test-only hook
    /// for checking that the residual diagnostics see injected defects.
    #[doc(hidden)]
    pub fn perturb_raw(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let idx = self.idx(i, j, k, l);
        self.data[idx] += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `1 + max|R|`, the scale used by every relative tolerance.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// Nonzero canonical entries in lexicographic order.
    pub fn canonical_entries(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        canonical_quadruples(self.n)
            .filter_map(|(i, j, k, l)| {
                let v = self.get(i, j, k, l);
                (v != 0.0).then_some((i, j, k, l, v))
            })
            .collect()
    }

    /// Max deviation from the antisymmetry and pair-symmetry relations.
    /// Zero for anything built through the public constructors.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        worst = worst
                            .max((v + self.get(j, i, k, l)).abs())
                            .max((v + self.get(i, j, l, k)).abs())
                            .max((v - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `max |R_{ijkl} + R_{jkil} + R_{kijl}|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Errors unless the tensor satisfies every algebraic curvature symmetry.
    pub fn validate(&self) -> Result<()> {
        let tol = BIANCHI_TOL * self.scale();
        let sym = self.symmetry_residual();
        if sym > tol {
            return Err(Error::Constraint(format!(
                "antisymmetry/pair-symmetry residual {sym:e}"
            )));
        }
        let residual = self.bianchi_residual();
        if residual > tol {
            return Err(Error::BianchiViolation {
                residual,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// `R(X, Y, Z, W) = Σ R_{ijkl} X_i Y_j Z_k W_l`.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let p = self.contract_last_pair(z, w);
        x.dot(&(p * y))
    }

    /// `P_{ab} = Σ_{kl} R_{abkl} Z_k W_l`. One pass over the array; values and
    /// gradients of every quartic functional are read off `P`.
    pub fn contract_last_pair(&self, z: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut zw = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                zw[k * n + l] = z[k] * w[l];
            }
        }
        let mut p = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let base = (a * n + b) * n * n;
                let row = &self.data[base..base + n * n];
                p[(a, b)] = row.iter().zip(&zw).map(|(r, s)| r * s).sum();
            }
        }
        p
    }

    /// `Ric(X,X) = Σ_k R(X, e_k, X, e_k)`; `S = tr Ric`.
    pub fn ricci_and_scalar(&self) -> Scalars {
        let n = self.n;
        let ricci = DMatrix::from_fn(n, n, |a, b| (0..n).map(|k| self.get(a, k, b, k)).sum());
        let ricci = (&ricci + ricci.transpose()) * 0.5;
        let scalar = ricci.trace();
        Scalars { ricci, scalar }
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.ricci_and_scalar().scalar
    }

    /// `R̄(φ)_{ij} = Σ_{kl} R_{iklj} φ_{kl}`.
    pub fn apply_second_kind(&self, phi: &SymTwoTensor) -> Result<SymTwoTensor> {
        self.check_dim(phi.dim())?;
        let n = self.n;
        let out = DMatrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += self.get(i, k, l, j) * phi.get(k, l);
                }
            }
            s
        });
        Ok(SymTwoTensor::symmetrized(out))
    }

    /// `R̊(φ, ψ) = Σ R_{ijkl} φ_{il} ψ_{jk}`.
    pub fn ring(&self, phi: &SymTwoTensor, psi: &SymTwoTensor) -> Result<f64> {
        self.check_dim(phi.dim())?;
        self.check_dim(psi.dim())?;
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let pjk = psi.get(j, k);
                    if pjk == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += self.get(i, j, k, l) * phi.get(i, l) * pjk;
                    }
                }
            }
        }
        Ok(s)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: n,
            });
        }
        Ok(())
    }

    /// Re-expresses the tensor on a larger space: index `a` here becomes
    /// `map[a]` there. Components touching unmapped indices vanish.
    pub fn embed(&self, map: &[usize], n_total: usize) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: map.len(),
            });
        }
        if map.iter().any(|&a| a >= n_total) {
            return Err(Error::Index(format!("embedding target exceeds n={n_total}")));
        }
        let mut out = Self::zeros(n_total);
        for (i, j, k, l, v) in self.canonical_entries() {
            out.write_orbit(map[i], map[j], map[k], map[l], v);
        }
        Ok(out)
    }

    /// `a·self + b·other`; panics on dimension mismatch.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in linear combination");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self { n: self.n, data }
    }
}

impl Add for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn add(self, rhs: &CurvatureOperator) -> CurvatureOperator {
        self.lin_comb(1.0, rhs, 1.0)
    }
}

impl Sub for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn sub(self, rhs: &CurvatureOperator) -> CurvatureOperator {
        self.lin_comb(1.0, rhs, -1.0)
    }
}

impl Mul<f64> for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn mul(self, rhs: f64) -> CurvatureOperator {
        CurvatureOperator {
            n: self.n,
            data: self.data.iter().map(|x| x * rhs).collect(),
        }
    }
}

impl Neg for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn neg(self) -> CurvatureOperator {
        self * -1.0
    }
}

/// `(i,j,k,l)` with `i < j`, `k < l`, `(i,j) <= (k,l)` lexicographically.
pub fn canonical_quadruples(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let p = pairs.len();
    (0..p).flat_map(move |a| {
        let pairs = pairs.clone();
        (a..p).map(move |b| (pairs[a].0, pairs[a].1, pairs[b].0, pairs[b].1))
    })
}

/// The four-frame probes `h1±`, `h2` on `{e_i, e_j, e_k, e_l}`.
#[derive(Clone, Debug)]
pub struct FourFrameProbes {
    pub h1_plus: SymTwoTensor,
    pub h1_minus: SymTwoTensor,
    pub h2: SymTwoTensor,
}

/// The two-frame probes `h3`, `h4` on `{e_i, e_j}`.
#[derive(Clone, Debug)]
pub struct TwoFrameProbes {
    pub h3: SymTwoTensor,
    pub h4: SymTwoTensor,
}

fn distinct(n: usize, idx: &[usize]) -> Result<()> {
    for (a, &i) in idx.iter().enumerate() {
        if i >= n {
            return Err(Error::Index(format!("frame index {i} out of range for n={n}")));
        }
        if idx[..a].contains(&i) {
            return Err(Error::Index(format!("repeated frame index {i}")));
        }
    }
    Ok(())
}

pub fn probe_four(n: usize, i: usize, j: usize, k: usize, l: usize) -> Result<FourFrameProbes> {
    distinct(n, &[i, j, k, l])?;
    let e = |a| basis_vector(n, a);
    let eij = sym_product(&e(i), &e(j))?;
    let ekl = sym_product(&e(k), &e(l))?;
    let h1_plus = &(&eij + &ekl) * 0.5;
    let h1_minus = &(&eij - &ekl) * 0.5;
    let d = |a| sym_product(&e(a), &e(a));
    let h2 = &(&(&(&d(i)? + &d(j)?) - &d(k)?) - &d(l)?) * 0.25;
    Ok(FourFrameProbes {
        h1_plus,
        h1_minus,
        h2,
    })
}

pub fn probe_two(n: usize, i: usize, j: usize) -> Result<TwoFrameProbes> {
    distinct(n, &[i, j])?;
    let e = |a| basis_vector(n, a);
    let h3 = &(&sym_product(&e(i), &e(i))? - &sym_product(&e(j), &e(j))?) * (1.0 / (2.0 * 2f64.sqrt()));
    let h4 = &sym_product(&e(i), &e(j))? * (1.0 / 2f64.sqrt());
    Ok(TwoFrameProbes { h3, h4 })
}
