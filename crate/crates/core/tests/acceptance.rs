//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use secondkind_core::basis::{closed_form_report, eta_sum_decomposition, iijiji_identity_in, Partition, TracelessBasis};
use secondkind_core::kahler::{functional_extremes, random_unitary_frame, Functional, KahlerOperator, UnitaryFrame};
use secondkind_core::lab::{self, Part, SuiteOptions, CHAIN_TOL};
use secondkind_core::models::{self, const_hsc, cp_times_cp1, cp_times_flat, flat, random_kahler, riemannian_product, sphere};
use secondkind_core::rng;
use secondkind_core::spectral::{self, basis_probe, decomposition_identities, expected_trace, f_partial, spectrum, Threshold};
use secondkind_core::tensor::{basis_vector, CurvatureOperator};

/// Collects failures and the largest deviation seen.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    worst: f64,
    checks: usize,
}

impl Tally {
    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let dev = (got - want).abs();
        self.checks += 1;
        self.worst = self.worst.max(dev);
        if !(dev <= tol) {
            self.failures.push(format!("{what}: got {got}, want {want} (tol {tol:e})"));
        }
    }

    fn ok(&mut self, what: &str, cond: bool) {
        self.checks += 1;
        if !cond {
            self.failures.push(what.to_string());
        }
    }

    fn report(&mut self, rep: &secondkind_core::VerificationReport) {
        self.checks += rep.records.len();
        self.worst = self.worst.max(rep.max_residual());
        for r in rep.failures() {
            self.failures.push(format!("{}/{}: lhs {} rhs {} residual {:e}", rep.suite, r.name, r.lhs, r.rhs, r.residual));
        }
    }

    fn error<E: std::fmt::Display>(&mut self, what: &str, e: E) {
        self.failures.push(format!("{what}: error {e}"));
    }
}

fn threshold_value(r: &CurvatureOperator) -> f64 {
    match spectrum(r).expect("spectrum").threshold() {
        Threshold::At(x) => x,
        Threshold::Never => f64::NAN,
    }
}

fn spectrum_matches(t: &mut Tally, name: &str, r: &CurvatureOperator, want: &[f64]) {
    let s = spectrum(r).expect("spectrum");
    t.ok(&format!("{name}: spectrum length"), s.len() == want.len());
    for (g, w) in s.eigenvalues().iter().zip(want) {
        t.close(&format!("{name}: eigenvalue"), *g, *w, 1e-9);
    }
}

fn repeat(v: f64, k: usize) -> Vec<f64> {
    vec![v; k]
}

/// Every concrete model, with its complex dimension when Kähler.
fn zoo() -> Vec<(String, CurvatureOperator, Option<usize>)> {
    let mut out = Vec::new();
    for m in 1..=4 {
        for c in [4.0, -4.0] {
            out.push((format!("CP^{m}({c})"), const_hsc(m, c).unwrap().into_base(), Some(m)));
        }
    }
    out.push(("flat R^4".into(), flat(4).unwrap(), Some(2)));
    out.push(("flat R^3".into(), flat(3).unwrap(), None));
    for n in [2, 3, 4] {
        out.push((format!("S^{n}(1)"), sphere(n, 1.0).unwrap(), None));
    }
    out.push((
        "S^2 x R".into(),
        riemannian_product(&[&sphere(2, 1.0).unwrap(), &flat(1).unwrap()]).unwrap(),
        None,
    ));
    out.push(("CP^1 x CP^1".into(), cp_times_cp1(2, 1.0).unwrap().into_base(), Some(2)));
    out.push(("CP^2 x CP^1".into(), cp_times_cp1(3, 1.0).unwrap().into_base(), Some(3)));
    for m in 1..=2 {
        out.push((format!("C x CP^{m}"), cp_times_flat(m).unwrap().into_base(), Some(m + 1)));
    }
    out
}

fn randoms(m: usize, count: u64, base: u64) -> Vec<KahlerOperator> {
    (0..count).map(|s| random_kahler(m, rng::derive(base, s)).unwrap()).collect()
}

fn c01() -> Tally {
    let mut t = Tally::default();
    for m in 2..=4 {
        let r = const_hsc(m, 4.0).unwrap();
        let mut want = repeat(-2.0, m * m - 1);
        want.extend(repeat(4.0, m * (m + 1)));
        spectrum_matches(&mut t, &format!("CP^{m}"), r.base(), &want);
        t.close(&format!("CP^{m} threshold"), threshold_value(r.base()), 1.5 * (m * m - 1) as f64, 1e-9);
    }
    t
}

fn c02() -> Tally {
    let mut t = Tally::default();
    let r = riemannian_product(&[&sphere(2, 1.0).unwrap(), &flat(1).unwrap()]).unwrap();
    spectrum_matches(&mut t, "S^2 x R", &r, &[-1.0 / 3.0, 0.0, 0.0, 1.0, 1.0]);
    t.close("S^2 x R threshold", threshold_value(&r), 10.0 / 3.0, 1e-9);
    t
}

fn c03() -> Tally {
    let mut t = Tally::default();
    let r = cp_times_cp1(2, 1.0).unwrap();
    let mut want = vec![-4.0];
    want.extend(repeat(0.0, 4));
    want.extend(repeat(4.0, 4));
    spectrum_matches(&mut t, "CP^1 x CP^1", r.base(), &want);
    let th = threshold_value(r.base());
    t.close("CP^1 x CP^1 threshold", th, 6.0, 1e-9);
    t.close("alpha_2", spectral::to_f64(spectral::alpha_m(2)), th, 1e-9);
    t.close("beta_2", spectral::to_f64(spectral::beta_m(2)), th, 1e-9);
    t
}

fn trace_check(t: &mut Tally, name: &str, r: &CurvatureOperator) {
    let basis = TracelessBasis::standard(r.dim()).unwrap();
    let m = spectral::assemble(r, &basis).unwrap();
    let want = expected_trace(r.dim(), r.scalar_curvature());
    t.close(&format!("{name}: trace"), m.trace(), want, 1e-9 * r.scale());
    let s = spectrum(r).unwrap();
    t.close(&format!("{name}: eigenvalue sum"), s.sum(), m.trace(), 1e-9 * r.scale());
}

fn c04() -> Tally {
    let mut t = Tally::default();
    for m in [2, 3] {
        for (i, k) in randoms(m, 50, 40 + m as u64).iter().enumerate() {
            trace_check(&mut t, &format!("random m={m} #{i}"), k.base());
            // Kähler assembly in the E± basis agrees with the reference basis.
            let kb = TracelessBasis::kahler(&UnitaryFrame::standard(m).unwrap()).unwrap();
            let tr = spectral::assemble(k.base(), &kb).unwrap().trace();
            t.close("E± basis trace", tr, expected_trace(2 * m, k.scalar()), 1e-9 * k.scale());
        }
    }
    for (name, r, _) in zoo() {
        trace_check(&mut t, &name, &r);
    }
    t
}

fn c05() -> Tally {
    let mut t = Tally::default();
    for m in [2usize, 3] {
        let mf = m as f64;
        for (i, k) in randoms(m, 50, 50 + m as u64).iter().enumerate() {
            for f in 0..5 {
                let frame = random_unitary_frame(m, rng::derive(i as u64, f)).unwrap();
                let basis = TracelessBasis::kahler(&frame).unwrap();
                t.ok("|E+| = m(m+1)", basis.partition(Partition::EPlus).count() == m * (m + 1));
                t.ok("|E-| = m²-1", basis.partition(Partition::EMinus).count() == m * m - 1);
                t.close("Gram = I", basis.orthonormality_error(), 0.0, 1e-12);
                let d = secondkind_core::basis::diag_values(k.base(), &basis).unwrap();
                let s = k.scalar();
                t.close("sum E+ = S", d.sum(Partition::EPlus), s, 1e-9);
                t.close("sum E- = -(m-1)/(2m) S", d.sum(Partition::EMinus), -(mf - 1.0) / (2.0 * mf) * s, 1e-9);
            }
        }
    }
    t
}

fn c06() -> Tally {
    let mut t = Tally::default();
    for m in [2usize, 3] {
        for (i, k) in randoms(m, 50, 60 + m as u64).iter().enumerate() {
            let frame = random_unitary_frame(m, 600 + i as u64).unwrap();
            t.report(&closed_form_report(k, &frame, 1e-10).unwrap());
            let tol = 1e-10 * k.scale();
            for a in 1..=m {
                for b in 1..=m {
                    let id = iijiji_identity_in(k, &frame, a, b).unwrap();
                    t.close("iiJiJi identity", id.lhs, id.rhs, tol);
                }
            }
            let eta = eta_sum_decomposition(k, &frame).unwrap();
            t.close("η-sum decomposition", eta.lhs, eta.rhs, tol);
        }
    }
    t
}

fn c07() -> Tally {
    use rand::Rng;
    let mut t = Tally::default();
    let mut r = rng::stream(7, 0);
    for trial in 0..1000 {
        let len = r.random_range(2..=30usize);
        let a: Vec<f64> = (0..len).map(|_| r.random_range(-5.0..5.0)).collect();
        let mean = a.iter().sum::<f64>() / len as f64;
        let scale = 1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale * len as f64;
        for g in 0..20 {
            let x = 1.0 + (len as f64 - 1.0) * g as f64 / 19.0;
            let f = f_partial(&a, x).unwrap();
            t.ok(&format!("trial {trial}: f(A,{x}) <= x·mean"), f <= x * mean + tol);
        }
        let c = r.random_range(-3.0..3.0);
        let constant = vec![c; len];
        let perturbed: Vec<f64> = (0..len).map(|i| c + if i == 0 { 1e-3 } else { 0.0 } + 1e-3 * r.random::<f64>()).collect();
        let pmean = perturbed.iter().sum::<f64>() / len as f64;
        for g in 0..20 {
            let x = 1.0 + (len as f64 - 1.0) * g as f64 / 20.0;
            let f = f_partial(&constant, x).unwrap();
            t.close("equality for constant multisets", f, x * c, 1e-12 * (1.0 + c.abs()) * len as f64);
            let fp = f_partial(&perturbed, x).unwrap();
            t.ok(&format!("trial {trial}: strict after perturbation at x={x}"), fp < x * pmean - 1e-12);
        }
    }
    t
}

fn c08() -> Tally {
    let mut t = Tally::default();
    let alphas = [2.0, 4.5, spectral::to_f64(spectral::alpha_m(2))];
    let mut inputs: Vec<(String, CurvatureOperator)> = zoo().into_iter().map(|(n, r, _)| (n, r)).collect();
    for (i, k) in randoms(2, 20, 80).into_iter().enumerate() {
        inputs.push((format!("random #{i}"), k.into_base()));
    }
    for (idx, (name, r)) in inputs.iter().enumerate() {
        let big_n = spectrum(r).unwrap().len() as f64;
        for &a in alphas.iter().chain(std::iter::once(&big_n)) {
            if a > big_n {
                continue;
            }
            let p = basis_probe(r, a, 500, 1000 + idx as u64, false).unwrap();
            t.ok(&format!("{name} α={a}: probe {} undercuts f {}", p.min, p.f_eigs), p.min >= p.f_eigs - 1e-9);
            t.worst = t.worst.max((p.f_eigs - p.min).max(0.0));
            let with_eig = basis_probe(r, a, 1, 1, true).unwrap();
            t.close(&format!("{name} α={a}: eigenbasis attains f"), with_eig.min.min(p.f_eigs), p.f_eigs, 1e-9);
        }
    }
    t
}

fn c09() -> Tally {
    let mut t = Tally::default();
    for (name, r, m) in zoo() {
        let Some(m) = m else { continue };
        if m < 2 {
            continue;
        }
        let k = KahlerOperator::new(r).unwrap();
        let mut frames = vec![UnitaryFrame::standard(m).unwrap()];
        frames.extend((0..5).map(|s| random_unitary_frame(m, 900 + s).unwrap()));
        for f in &frames {
            match lab::identity_chains(&k, f, CHAIN_TOL) {
                Ok(rep) => t.report(&rep),
                Err(e) => t.error(&name, e),
            }
        }
    }
    for m in [2, 3] {
        for (i, k) in randoms(m, 50, 90 + m as u64).iter().enumerate() {
            let f = random_unitary_frame(m, 9000 + i as u64).unwrap();
            t.report(&lab::identity_chains(k, &f, CHAIN_TOL).unwrap());
        }
    }
    for m in 2..=12 {
        for id in decomposition_identities(m).unwrap() {
            t.ok(&format!("m={m}: {}", id.name), id.holds());
        }
    }
    t
}

fn c10() -> Tally {
    let mut t = Tally::default();
    for m in [2usize, 3] {
        let alpha = 1.5 * (m * m - 1) as f64;
        for (i, k) in randoms(m, 50, 100 + m as u64).iter().enumerate() {
            let var = lab::hsc_variance(k, 500, i as u64);
            t.ok(&format!("m={m} #{i}: HSC nonconstant"), var > 1e-6);
            let f = spectrum(k.base()).unwrap().f(alpha).unwrap();
            t.ok(&format!("m={m} #{i}: f(eigs,(3/2)(m²-1)) = {f} < -1e-8"), f < -1e-8);
        }
        for part in [Part::Constancy, Part::OrthBisec, Part::RicPerp, Part::Mixed] {
            let opts = SuiteOptions::new(20, 1000 + m as u64);
            match lab::implication_suite_with(part, m, opts) {
                Ok(rep) => t.report(&rep),
                Err(e) => t.error(&format!("part {part:?}"), e),
            }
        }
    }
    t
}

fn c11() -> Tally {
    let mut t = Tally::default();
    for m in [2, 3] {
        let k = cp_times_cp1(m, 1.0).unwrap();
        let e = functional_extremes(&k, Functional::RicPerp, 2000, 11).unwrap();
        t.close(&format!("CP^{} x CP^1: sampled min Ric⊥", m - 1), e.min, 0.0, 1e-6);
        let x = basis_vector(k.n(), 0);
        t.close("Ric⊥ along the CP^1 factor", k.ric_perp(&x).unwrap(), 0.0, 1e-12);
        // The minimizing direction found by sampling lies in the CP^1 factor.
        let argmin = nalgebra::DVector::from_vec(e.argmin.clone());
        let along = argmin[0].powi(2) + argmin[m].powi(2);
        t.close("sampled argmin lies in the CP^1 factor", along, 1.0, 1e-3);
    }
    let ratios: Vec<f64> = (-8..=8).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
    let scan = models::scaled_product_scan(3, &ratios).unwrap();
    let min = scan.min_threshold.unwrap_or(f64::NAN);
    t.close("m=3 scan minimum = 44/3", min, 44.0 / 3.0, 1e-6);
    let ratio = scan.argmin_ratio.unwrap_or(f64::NAN);
    t.ok(&format!("attaining ratio reported ({ratio})"), ratio.is_finite());
    t.close("attained at ratio 1", ratio, 1.0, 1e-12);
    t
}

fn c12() -> Tally {
    let mut t = Tally::default();
    for n in [3, 4, 5] {
        t.report(&lab::scalar_sign_suite(n, 20, 120 + n as u64).unwrap());
    }
    for m in [2, 3] {
        t.report(&lab::scalar_sign_suite_kahler(m, 20, 130 + m as u64).unwrap());
    }
    t
}

fn c13() -> Tally {
    let mut t = Tally::default();
    for m in [2usize, 3, 4] {
        let s = models::kahler_subspace(m).unwrap();
        let want = (m * (m + 1) / 2).pow(2);
        t.ok(&format!("m={m}: dimension {} = {want}", s.dimension()), s.dimension() == want);
        let j = secondkind_core::ComplexStructure::new(m).unwrap();
        let samples: Vec<CurvatureOperator> = (0..10).map(|seed| s.sample(seed)).collect();
        for r in s.basis().iter().chain(&samples) {
            t.close("Bianchi residual", r.bianchi_residual(), 0.0, 1e-10 * r.scale());
            let res = secondkind_core::kahler::kahler_residual(r, &j).unwrap();
            t.close("Kähler residual", res, 0.0, 1e-10 * r.scale());
        }
    }
    t
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Tally); 13] = [
        ("CP^m spectrum {-2, 4} and threshold (3/2)(m²-1), m = 2,3,4", c01),
        ("S² x R spectrum {-1/3,0,0,1,1} and threshold 10/3", c02),
        ("CP¹ x CP¹ spectrum {-4,0⁴,4⁴} and threshold 6", c03),
        ("trace of R̊ = (n+2)/(2n) S on random and model tensors", c04),
        ("E± orthonormal, dimensions, diagonal sums S and -(m-1)/(2m) S", c05),
        ("closed-form diagonals, iiJiJi identity, η-sum decomposition", c06),
        ("partial-sum average inequality, equality and strictness", c07),
        ("random-basis probe never undercuts f(eigs, α)", c08),
        ("identity chains and exact constant decompositions", c09),
        ("implication suites: contrapositive and parts (2)-(4)", c10),
        ("boundary cases: vanishing Ric⊥ and the 44/3 product threshold", c11),
        ("scalar-curvature sign statements in spectral form", c12),
        ("Kähler nullspace dimension and residuals", c13),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let t = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if t.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "[{status}] criterion {:02}: {name} ({} checks, max deviation {:.1e}, {secs:.1}s)",
            i + 1,
            t.checks,
            t.worst
        );
        if !t.failures.is_empty() {
            failed += 1;
            for f in t.failures.iter().take(10) {
                println!("         {f}");
            }
            if t.failures.len() > 10 {
                println!("         ... {} more", t.failures.len() - 10);
            }
        }
    }
    println!("acceptance: {} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
