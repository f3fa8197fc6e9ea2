use anyhow::{ensure, Result};
use secondkind_core::basis::{closed_form_report, eta_sum_decomposition, iijiji_identity_in};
use secondkind_core::kahler::random_unitary_frame;
use secondkind_core::lab::{self, Part, SuiteOptions};
use secondkind_core::models::{const_hsc, cp_times_cp1, flat, random_kahler, riemannian_product, scaled_product_scan, sphere};
use secondkind_core::rng;
use secondkind_core::spectral::{assemble, decomposition_identities, expected_trace, spectrum};
use secondkind_core::{CurvatureOperator, Threshold, TracelessBasis, VerificationReport};

/// Knobs shared by all suites.
#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

const FRAME_STREAM: u64 = 0x6672_616d_6573;

pub fn identities(m: usize, p: Params) -> Result<VerificationReport> {
    ensure!(m >= 2, "identity suites need m >= 2, got {m}");
    let mut rep = VerificationReport::new(format!("identities(m={m})"));
    rep.seeds.push(p.seed);
    rep.trials = p.trials;
    for t in 0..p.trials as u64 {
        let k = random_kahler(m, rng::derive(p.seed, t))?;
        let frame = random_unitary_frame(m, rng::derive(p.seed ^ FRAME_STREAM, t))?;
        let tol = p.tol * k.scale();
        let mut one = lab::identity_chains(&k, &frame, p.tol)?;
        one.suite = format!("trial{t}");
        rep.extend(one);
        let mut closed = closed_form_report(&k, &frame, p.tol)?;
        closed.suite = format!("trial{t}/closed_forms");
        rep.extend(closed);
        for a in 1..=m {
            for b in 1..=m {
                let id = iijiji_identity_in(&k, &frame, a, b)?;
                rep.equal(format!("trial{t}/iijiji({a},{b})"), id.lhs, id.rhs, tol);
            }
        }
        let eta = eta_sum_decomposition(&k, &frame)?;
        rep.equal(format!("trial{t}/eta_sum"), eta.lhs, eta.rhs, tol);
        trace_record(&mut rep, &format!("trial{t}/trace"), k.base(), p.tol)?;
    }
    for id in decomposition_identities(m)? {
        rep.flag(format!("exact/{}", id.name), id.holds());
    }
    Ok(rep)
}

pub fn props(m: usize, p: Params) -> Result<VerificationReport> {
    ensure!(m >= 2, "implication suites need m >= 2, got {m}");
    let mut rep = VerificationReport::new(format!("props(m={m})"));
    let opts = SuiteOptions {
        trials: p.trials,
        samples: p.samples,
        seed: p.seed,
    };
    for part in [Part::Constancy, Part::OrthBisec, Part::RicPerp, Part::Mixed] {
        rep.extend(lab::implication_suite_with(part, m, opts)?);
    }
    rep.extend(lab::sign_window_suite(m, p.trials, p.seed)?);
    rep.extend(lab::scalar_sign_suite_kahler(m, p.trials, p.seed)?);
    Ok(rep)
}

pub fn models(ms: &[usize], p: Params) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("models");
    for &m in ms {
        ensure!(m >= 1, "complex dimension must be positive");
        let mm1 = (m * m - 1) as f64;
        let cp = const_hsc(m, 4.0)?.into_base();
        let mut want = vec![-2.0; m * m - 1];
        want.extend(vec![4.0; m * (m + 1)]);
        golden(&mut rep, &format!("CP^{m}(4)"), &cp, &want, (m >= 2).then_some(1.5 * mm1), p.tol)?;
        let ch = const_hsc(m, -4.0)?.into_base();
        let mut want = vec![-4.0; m * (m + 1)];
        want.extend(vec![2.0; m * m - 1]);
        golden(&mut rep, &format!("CH^{m}(-4)"), &ch, &want, None, p.tol)?;
    }
    let s2r = riemannian_product(&[&sphere(2, 1.0)?, &flat(1)?])?;
    golden(&mut rep, "S^2xR", &s2r, &[-1.0 / 3.0, 0.0, 0.0, 1.0, 1.0], Some(10.0 / 3.0), p.tol)?;
    let cp1cp1 = cp_times_cp1(2, 1.0)?.into_base();
    let mut want = vec![-4.0];
    want.extend([0.0; 4]);
    want.extend([4.0; 4]);
    golden(&mut rep, "CP^1xCP^1", &cp1cp1, &want, Some(6.0), p.tol)?;
    if ms.contains(&3) {
        let ratios: Vec<f64> = (-8..=8).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
        let scan = scaled_product_scan(3, &ratios)?;
        rep.equal("scan(m=3)/min", scan.min_threshold.unwrap_or(f64::NAN), 44.0 / 3.0, p.tol);
        rep.equal("scan(m=3)/argmin_ratio", scan.argmin_ratio.unwrap_or(f64::NAN), 1.0, 0.0);
    }
    Ok(rep)
}

fn golden(
    rep: &mut VerificationReport,
    name: &str,
    r: &CurvatureOperator,
    want: &[f64],
    threshold: Option<f64>,
    tol: f64,
) -> Result<()> {
    let s = spectrum(r)?;
    rep.flag(format!("{name}/len"), s.len() == want.len());
    for (i, (g, w)) in s.eigenvalues().iter().zip(want).enumerate() {
        rep.equal(format!("{name}/eig[{i}]"), *g, *w, tol * (1.0 + w.abs()));
    }
    if let Some(th) = threshold {
        let got = match s.threshold() {
            Threshold::At(x) => x,
            Threshold::Never => f64::NAN,
        };
        rep.equal(format!("{name}/threshold"), got, th, tol * (1.0 + th));
    }
    trace_record(rep, &format!("{name}/trace"), r, tol)
}

fn trace_record(rep: &mut VerificationReport, name: &str, r: &CurvatureOperator, tol: f64) -> Result<()> {
    let m = assemble(r, &TracelessBasis::standard(r.dim())?)?;
    let want = expected_trace(r.dim(), r.scalar_curvature());
    rep.equal(name, m.trace(), want, tol * r.scale());
    Ok(())
}
