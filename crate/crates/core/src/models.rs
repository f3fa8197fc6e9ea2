//! Concrete curvature operators: constant holomorphic sectional curvature,
//! round spheres, flat spaces, products, and random samples from the linear
//! spaces of algebraic (or Kähler algebraic) curvature tensors.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahler::{ComplexStructure, KahlerOperator};
use crate::rng;
use crate::spectral::{spectrum, Threshold};
use crate::tensor::CurvatureOperator;

/// `R = (c/4)[g(X,Z)g(Y,W) - g(X,W)g(Y,Z) + g(X,JZ)g(Y,JW) - g(X,JW)g(Y,JZ) + 2g(X,JY)g(Z,JW)]`,
/// so every unit vector has holomorphic sectional curvature `c`.
pub fn const_hsc(m: usize, c: f64) -> Result<KahlerOperator> {
    let j = ComplexStructure::new(m)?;
    let jm = j.matrix();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let r = CurvatureOperator::from_fn(2 * m, |x, y, z, w| {
        let v = delta(x, z) * delta(y, w) - delta(x, w) * delta(y, z)
            + jm[(x, z)] * jm[(y, w)]
            - jm[(x, w)] * jm[(y, z)]
            + 2.0 * jm[(x, y)] * jm[(z, w)];
        0.25 * c * v
    });
    KahlerOperator::new(r)
}

/// Constant sectional curvature `kappa` on `R^n`.
pub fn sphere(n: usize, kappa: f64) -> Result<CurvatureOperator> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(CurvatureOperator::from_fn(n, |i, j, k, l| {
        if i == k && j == l {
            kappa
        } else {
            0.0
        }
    }))
}

pub fn flat(n: usize) -> Result<CurvatureOperator> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(CurvatureOperator::zeros(n))
}

/// Places each factor on its own index set; the sets must partition `0..n`.
pub fn product(parts: &[(&CurvatureOperator, Vec<usize>)], n: usize) -> Result<CurvatureOperator> {
    let mut used = vec![false; n];
    let mut out = CurvatureOperator::zeros(n);
    for (r, map) in parts {
        for &a in map {
            if a >= n {
                return Err(Error::Index(format!("block index {a} outside 0..{n}")));
            }
            if used[a] {
                return Err(Error::InvalidModel(format!("blocks overlap at index {a}")));
            }
            used[a] = true;
        }
        out = &out + &r.embed(map, n)?;
    }
    if let Some(a) = used.iter().position(|u| !u) {
        return Err(Error::InvalidModel(format!("index {a} is not covered by any block")));
    }
    Ok(out)
}

/// Riemannian product with consecutive index blocks.
pub fn riemannian_product(factors: &[&CurvatureOperator]) -> Result<CurvatureOperator> {
    let n: usize = factors.iter().map(|r| r.dim()).sum();
    let mut offset = 0;
    let parts: Vec<_> = factors
        .iter()
        .map(|r| {
            let map = (offset..offset + r.dim()).collect();
            offset += r.dim();
            (*r, map)
        })
        .collect();
    product(&parts, n)
}

/// Kähler product in the adapted frame of the total space: a factor of
/// complex dimension `a` at complex offset `o` occupies real indices
/// `o..o+a` and `M+o..M+o+a`, where `M` is the total complex dimension.
pub fn kahler_product(factors: &[&KahlerOperator]) -> Result<KahlerOperator> {
    if factors.is_empty() {
        return Err(Error::InvalidModel("product needs at least one factor".into()));
    }
    let total: usize = factors.iter().map(|k| k.m()).sum();
    let mut offset = 0;
    let parts: Vec<_> = factors
        .iter()
        .map(|k| {
            let a = k.m();
            let map = (0..a)
                .map(|i| offset + i)
                .chain((0..a).map(|i| total + offset + i))
                .collect();
            offset += a;
            (k.base(), map)
        })
        .collect();
    KahlerOperator::new(product(&parts, 2 * total)?)
}

/// `CP^{m-1}` at holomorphic sectional curvature 4 times `CP^1` at `4t`.
/// The `CP^1` factor comes first, so `e_1` (and `e_0` of a split frame) lies in it.
pub fn cp_times_cp1(m: usize, t: f64) -> Result<KahlerOperator> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    kahler_product(&[&const_hsc(1, 4.0 * t)?, &const_hsc(m - 1, 4.0)?])
}

/// A flat complex line times `CP^m` at holomorphic sectional curvature 4.
/// The flat line comes first.
pub fn cp_times_flat(m: usize) -> Result<KahlerOperator> {
    kahler_product(&[&const_hsc(1, 0.0)?, &const_hsc(m, 4.0)?])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SubspaceKind {
    Algebraic,
    Kahler,
}

/// An orthonormal (in the full-tensor Frobenius norm) basis of a linear
/// space of curvature tensors, found as the numerical nullspace of the
/// Bianchi identity and, for the Kähler case, of `R(·,·,J·,J·) = R`.
#[derive(Debug)]
pub struct CurvatureSubspace {
    n: usize,
    kahler: bool,
    unknowns: usize,
    basis: Vec<CurvatureOperator>,
}

impl CurvatureSubspace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_kahler(&self) -> bool {
        self.kahler
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Rank of the constraint system.
    pub fn rank(&self) -> usize {
        self.unknowns - self.basis.len()
    }

    pub fn basis(&self) -> &[CurvatureOperator] {
        &self.basis
    }

    /// Gaussian combination of the basis; deterministic per seed.
    pub fn sample(&self, seed: u64) -> CurvatureOperator {
        let mut r = rng::stream(seed, 0);
        let coeffs = rng::gaussian_vector(&mut r, self.basis.len());
        let mut out = CurvatureOperator::zeros(self.n);
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            out = out.lin_comb(1.0, b, *c);
        }
        out
    }
}

/// Pair `(a,b)` with `a < b` to its position in lexicographic order.
fn pair_index(n: usize, a: usize, b: usize) -> usize {
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Unknown layout: one value per unordered pair of pairs `{P, Q}`, weighted so
/// that the Euclidean norm of the unknowns equals the Frobenius norm of the tensor.
struct Layout {
    n: usize,
    p: usize,
}

impl Layout {
    fn new(n: usize) -> Self {
        Self {
            n,
            p: n * (n - 1) / 2,
        }
    }

    fn unknowns(&self) -> usize {
        self.p * (self.p + 1) / 2
    }

    /// Row-major upper triangle (diagonal included) of the pair-by-pair matrix.
    fn slot(&self, p: usize, q: usize) -> (usize, f64) {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        let idx = p * self.p - p * p.saturating_sub(1) / 2 + (q - p);
        let weight = if p == q { 2.0 } else { 2.0 * std::f64::consts::SQRT_2 };
        (idx, weight)
    }

    /// Coefficient of `R_{abcd}` on the weighted unknowns, if not forced to zero.
    fn component(&self, a: usize, b: usize, c: usize, d: usize) -> Option<(usize, f64)> {
        if a == b || c == d {
            return None;
        }
        let (s1, a, b) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
        let (s2, c, d) = if c < d { (1.0, c, d) } else { (-1.0, d, c) };
        let (slot, w) = self.slot(pair_index(self.n, a, b), pair_index(self.n, c, d));
        Some((slot, s1 * s2 / w))
    }

    fn to_tensor(&self, y: &[f64]) -> CurvatureOperator {
        let n = self.n;
        CurvatureOperator::from_fn(n, |i, j, k, l| {
            self.component(i, j, k, l)
                .map(|(slot, coef)| coef * y[slot])
                .unwrap_or(0.0)
        })
    }
}

fn add_term(row: &mut [f64], term: Option<(usize, f64)>, sign: f64) {
    if let Some((slot, coef)) = term {
        row[slot] += sign * coef;
    }
}

fn build_subspace(n: usize, kind: SubspaceKind) -> Result<CurvatureSubspace> {
    let layout = Layout::new(n);
    let u = layout.unknowns();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in 0..n {
                    let mut row = vec![0.0; u];
                    add_term(&mut row, layout.component(i, j, k, l), 1.0);
                    add_term(&mut row, layout.component(j, k, i, l), 1.0);
                    add_term(&mut row, layout.component(k, i, j, l), 1.0);
                    rows.push(row);
                }
            }
        }
    }
    if kind == SubspaceKind::Kahler {
        let j = ComplexStructure::for_dim(n)?;
        let image = |c: usize| {
            let v = j.apply(&crate::tensor::basis_vector(n, c));
            let t = v.iamax();
            (t, v[t])
        };
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    for d in c + 1..n {
                        let ((jc, sc), (jd, sd)) = (image(c), image(d));
                        let mut row = vec![0.0; u];
                        add_term(&mut row, layout.component(a, b, jc, jd), sc * sd);
                        add_term(&mut row, layout.component(a, b, c, d), -1.0);
                        rows.push(row);
                    }
                }
            }
        }
    }
    // Pad so the SVD returns a full set of right singular vectors.
    while rows.len() < u {
        rows.push(vec![0.0; u]);
    }
    let a = DMatrix::from_fn(rows.len(), u, |r, c| rows[r][c]);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Constraint("SVD did not converge".into()))?;
    let smax = svd.singular_values.max();
    let cutoff = 1e-10 * smax.max(1.0);
    let basis = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(idx, _)| {
            let y: Vec<f64> = v_t.row(idx).iter().copied().collect();
            layout.to_tensor(&y)
        })
        .collect();
    Ok(CurvatureSubspace {
        n,
        kahler: kind == SubspaceKind::Kahler,
        unknowns: u,
        basis,
    })
}

type Cache = Mutex<HashMap<(usize, SubspaceKind), Arc<CurvatureSubspace>>>;

fn cached(n: usize, kind: SubspaceKind) -> Result<Arc<CurvatureSubspace>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache poisoned").get(&(n, kind)) {
        return Ok(Arc::clone(s));
    }
    // Built outside the lock; concurrent builders produce identical results
    // and the first insert wins.
    let built = Arc::new(build_subspace(n, kind)?);
    let mut guard = cache.lock().expect("cache poisoned");
    Ok(Arc::clone(guard.entry((n, kind)).or_insert(built)))
}

/// All Kähler algebraic curvature tensors on `C^m`; dimension `(m(m+1)/2)²`.
pub fn kahler_subspace(m: usize) -> Result<Arc<CurvatureSubspace>> {
    if m == 0 {
        return Err(Error::InvalidDimension(0));
    }
    cached(2 * m, SubspaceKind::Kahler)
}

/// All algebraic curvature tensors on `R^n`; dimension `n²(n²-1)/12`.
pub fn algebraic_subspace(n: usize) -> Result<Arc<CurvatureSubspace>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    cached(n, SubspaceKind::Algebraic)
}

pub fn random_kahler(m: usize, seed: u64) -> Result<KahlerOperator> {
    KahlerOperator::new(kahler_subspace(m)?.sample(seed))
}

/// A generic algebraic curvature tensor; almost surely not Kähler.
pub fn random_algebraic(n: usize, seed: u64) -> Result<CurvatureOperator> {
    Ok(algebraic_subspace(n)?.sample(seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub ratio: f64,
    pub threshold: Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductScan {
    pub m: usize,
    pub entries: Vec<ScanEntry>,
    /// Smallest finite threshold over the grid and the ratio attaining it.
    pub min_threshold: Option<f64>,
    pub argmin_ratio: Option<f64>,
}

/// α-thresholds of `CP^{m-1}(4) × CP^1(4t)` over a grid of ratios `t`.
pub fn scaled_product_scan(m: usize, ratios: &[f64]) -> Result<ProductScan> {
    if ratios.is_empty() {
        return Err(Error::Constraint("ratio grid is empty".into()));
    }
    if let Some(t) = ratios.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::OutOfRange {
            value: *t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let mut entries = Vec::with_capacity(ratios.len());
    let mut best: Option<(f64, f64)> = None;
    for &ratio in ratios {
        let k = cp_times_cp1(m, ratio)?;
        let threshold = spectrum(k.base())?.threshold();
        if let Threshold::At(x) = threshold {
            if best.is_none_or(|(b, _)| x < b) {
                best = Some((x, ratio));
            }
        }
        entries.push(ScanEntry { ratio, threshold });
    }
    Ok(ProductScan {
        m,
        entries,
        min_threshold: best.map(|b| b.0),
        argmin_ratio: best.map(|b| b.1),
    })
}

/// One factor of a product: `cp:m:c`, `sphere:n:k` or `flat:n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorSpec {
    Cp { m: usize, c: f64 },
    Sphere { n: usize, k: f64 },
    Flat { n: usize },
}

impl FactorSpec {
    pub fn real_dim(&self) -> usize {
        match *self {
            FactorSpec::Cp { m, .. } => 2 * m,
            FactorSpec::Sphere { n, .. } | FactorSpec::Flat { n } => n,
        }
    }
}

impl FromStr for FactorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Format(format!("bad factor {s:?}; expected cp:m:c, sphere:n:k or flat:n"));
        let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let real = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        match parts.as_slice() {
            ["cp", m, c] => Ok(FactorSpec::Cp { m: int(m)?, c: real(c)? }),
            ["sphere", n, k] => Ok(FactorSpec::Sphere { n: int(n)?, k: real(k)? }),
            ["flat", n] => Ok(FactorSpec::Flat { n: int(n)? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorSpec::Cp { m, c } => write!(f, "cp:{m}:{c}"),
            FactorSpec::Sphere { n, k } => write!(f, "sphere:{n}:{k}"),
            FactorSpec::Flat { n } => write!(f, "flat:{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    ConstHsc { m: usize, c: f64 },
    Sphere { n: usize, k: f64 },
    Flat { n: usize },
    Product { factors: Vec<FactorSpec> },
    RandomKahler { m: usize, seed: u64 },
}

/// A built model together with its Kähler structure when it has one.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub operator: CurvatureOperator,
    pub m: Option<usize>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        let kahler = |k: KahlerOperator| Model {
            m: Some(k.m()),
            operator: k.into_base(),
        };
        match self {
            ModelSpec::ConstHsc { m, c } => Ok(kahler(const_hsc(*m, *c)?)),
            ModelSpec::RandomKahler { m, seed } => Ok(kahler(random_kahler(*m, *seed)?)),
            ModelSpec::Sphere { n, k } => Ok(riemannian(sphere(*n, *k)?)),
            ModelSpec::Flat { n } => Ok(riemannian(flat(*n)?)),
            ModelSpec::Product { factors } => build_product(factors),
        }
    }
}

fn riemannian(operator: CurvatureOperator) -> Model {
    let m = if operator.dim() % 2 == 0 {
        KahlerOperator::new(operator.clone()).ok().map(|k| k.m())
    } else {
        None
    };
    Model { operator, m }
}

/// All-Kähler factor lists are laid out in the adapted frame of the total
/// space; anything else uses consecutive real blocks. Flat factors of even
/// dimension count as Kähler.
fn build_product(factors: &[FactorSpec]) -> Result<Model> {
    if factors.is_empty() {
        return Err(Error::InvalidModel("product needs at least one factor".into()));
    }
    let all_kahler = factors.iter().all(|f| match f {
        FactorSpec::Cp { .. } => true,
        FactorSpec::Flat { n } => n % 2 == 0,
        FactorSpec::Sphere { .. } => false,
    });
    if all_kahler {
        let ks = factors
            .iter()
            .map(|f| match *f {
                FactorSpec::Cp { m, c } => const_hsc(m, c),
                FactorSpec::Flat { n } => const_hsc(n / 2, 0.0),
                FactorSpec::Sphere { .. } => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&KahlerOperator> = ks.iter().collect();
        let k = kahler_product(&refs)?;
        return Ok(Model {
            m: Some(k.m()),
            operator: k.into_base(),
        });
    }
    let ops = factors
        .iter()
        .map(|f| match *f {
            FactorSpec::Cp { m, c } => const_hsc(m, c).map(KahlerOperator::into_base),
            FactorSpec::Sphere { n, k } => sphere(n, k),
            FactorSpec::Flat { n } => flat(n),
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&CurvatureOperator> = ops.iter().collect();
    Ok(riemannian(riemannian_product(&refs)?))
}

/// Unit vector along real index `i`, convenient for probing product factors.
pub fn axis(n: usize, i: usize) -> DVector<f64> {
    crate::tensor::basis_vector(n, i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_lexicographic() {
        let n = 5;
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                assert_eq!(pair_index(n, a, b), k);
                k += 1;
            }
        }
    }

    #[test]
    fn layout_slots_are_a_bijection() {
        let l = Layout::new(4);
        let mut seen = vec![false; l.unknowns()];
        for p in 0..l.p {
            for q in p..l.p {
                let (s, _) = l.slot(p, q);
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn const_hsc_zero_is_flat() {
        assert!(const_hsc(3, 0.0).unwrap().base().is_zero());
    }

    #[test]
    fn sphere_components() {
        let s = sphere(3, 2.0).unwrap();
        assert_eq!(s.get(0, 1, 0, 1), 2.0);
        assert_eq!(s.get(0, 1, 1, 0), -2.0);
        assert_eq!(s.get(0, 1, 0, 2), 0.0);
        assert!(sphere(1, 1.0).is_err());
    }

    #[test]
    fn product_rejects_bad_blocks() {
        let s = sphere(2, 1.0).unwrap();
        assert!(product(&[(&s, vec![0, 1]), (&s, vec![1, 2])], 4).is_err());
        assert!(product(&[(&s, vec![0, 1])], 3).is_err());
        assert!(product(&[(&s, vec![0, 5])], 3).is_err());
    }

    #[test]
    fn small_subspace_dimensions() {
        assert_eq!(algebraic_subspace(2).unwrap().dimension(), 1);
        assert_eq!(algebraic_subspace(3).unwrap().dimension(), 6);
        assert_eq!(kahler_subspace(1).unwrap().dimension(), 1);
    }

    #[test]
    fn factor_grammar() {
        assert_eq!("cp:2:4".parse::<FactorSpec>().unwrap(), FactorSpec::Cp { m: 2, c: 4.0 });
        assert_eq!("sphere:2:1".parse::<FactorSpec>().unwrap(), FactorSpec::Sphere { n: 2, k: 1.0 });
        assert_eq!("flat:1".parse::<FactorSpec>().unwrap(), FactorSpec::Flat { n: 1 });
        assert_eq!("cp:1:-4".parse::<FactorSpec>().unwrap(), FactorSpec::Cp { m: 1, c: -4.0 });
        for bad in ["cp:2", "torus:2", "flat:x", "cp:1:nan", ""] {
            assert!(bad.parse::<FactorSpec>().is_err(), "{bad}");
        }
        assert_eq!(FactorSpec::Cp { m: 2, c: 4.0 }.to_string(), "cp:2:4");
    }

    #[test]
    fn mixed_products_use_real_blocks() {
        let spec = ModelSpec::Product {
            factors: vec![FactorSpec::Sphere { n: 2, k: 1.0 }, FactorSpec::Flat { n: 1 }],
        };
        let model = spec.build().unwrap();
        assert_eq!(model.operator.dim(), 3);
        assert_eq!(model.m, None);
        assert_eq!(model.operator.get(0, 1, 0, 1), 1.0);
    }
}
