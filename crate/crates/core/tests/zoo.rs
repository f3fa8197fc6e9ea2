use approx::assert_abs_diff_eq;
use secondkind_core::kahler::{random_unitary_frame, KahlerOperator};
use secondkind_core::models::*;
use secondkind_core::spectral::{spectrum, Threshold};
use secondkind_core::tensor::basis_vector;

fn assert_spectrum(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(want) {
        assert_abs_diff_eq!(*g, *w, epsilon = 1e-9);
    }
}

fn threshold(k: &secondkind_core::tensor::CurvatureOperator) -> f64 {
    match spectrum(k).unwrap().threshold() {
        Threshold::At(x) => x,
        Threshold::Never => panic!("no threshold"),
    }
}

#[test]
fn cp2_spectrum_and_threshold() {
    let k = const_hsc(2, 4.0).unwrap();
    let s = spectrum(k.base()).unwrap();
    assert_spectrum(s.eigenvalues(), &[-2.0, -2.0, -2.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0]);
    assert_abs_diff_eq!(threshold(k.base()), 4.5, epsilon = 1e-9);
}

#[test]
fn ch2_spectrum_is_negated() {
    let k = const_hsc(2, -4.0).unwrap();
    let s = spectrum(k.base()).unwrap();
    assert_spectrum(s.eigenvalues(), &[-4.0, -4.0, -4.0, -4.0, -4.0, -4.0, 2.0, 2.0, 2.0]);
}

#[test]
fn sphere_times_line() {
    let r = riemannian_product(&[&sphere(2, 1.0).unwrap(), &flat(1).unwrap()]).unwrap();
    let s = spectrum(&r).unwrap();
    assert_spectrum(s.eigenvalues(), &[-1.0 / 3.0, 0.0, 0.0, 1.0, 1.0]);
    assert_abs_diff_eq!(threshold(&r), 10.0 / 3.0, epsilon = 1e-9);
}

#[test]
fn cp1_times_cp1() {
    let k = cp_times_cp1(2, 1.0).unwrap();
    let s = spectrum(k.base()).unwrap();
    assert_spectrum(s.eigenvalues(), &[-4.0, 0.0, 0.0, 0.0, 0.0, 4.0, 4.0, 4.0, 4.0]);
    assert_abs_diff_eq!(threshold(k.base()), 6.0, epsilon = 1e-9);
}

#[test]
fn cp2_times_cp1_threshold() {
    let k = cp_times_cp1(3, 1.0).unwrap();
    assert_abs_diff_eq!(threshold(k.base()), 44.0 / 3.0, epsilon = 1e-9);
}

#[test]
fn kahler_subspace_dimensions() {
    for (m, d) in [(1, 1), (2, 9), (3, 36)] {
        let s = kahler_subspace(m).unwrap();
        assert_eq!(s.dimension(), d, "m = {m}");
        for b in s.basis() {
            assert!(b.bianchi_residual() <= 1e-10);
            assert!(KahlerOperator::new(b.clone()).unwrap().residual() <= 1e-10);
        }
    }
    for n in [4, 5] {
        assert_eq!(algebraic_subspace(n).unwrap().dimension(), n * n * (n * n - 1) / 12);
    }
}

#[test]
fn random_kahler_is_deterministic() {
    let a = random_kahler(2, 7).unwrap();
    let b = random_kahler(2, 7).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, random_kahler(2, 8).unwrap());
    assert!(a.base().bianchi_residual() <= 1e-10);
}

#[test]
fn random_algebraic_is_not_kahler() {
    let r = random_algebraic(4, 3).unwrap();
    let err = KahlerOperator::new(r).unwrap_err();
    match err {
        secondkind_core::error::Error::NotKahler { residual, .. } => assert!(residual > 1e-3),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn cp_functionals() {
    for m in 1..4 {
        let k = const_hsc(m, 4.0).unwrap();
        let f = random_unitary_frame(m, 11).unwrap();
        for i in 0..m {
            assert_abs_diff_eq!(k.hsc(f.e(i)).unwrap(), 4.0, epsilon = 1e-10);
            let mf = m as f64;
            assert_abs_diff_eq!(k.ric_perp(f.e(i)).unwrap(), 2.0 * mf - 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(k.mixed_c(2.0, -1.0, f.e(i)).unwrap(), 4.0 * mf, epsilon = 1e-10);
            for j in i + 1..m {
                assert_abs_diff_eq!(k.orth_bisec(f.e(i), f.e(j)).unwrap(), 2.0, epsilon = 1e-10);
            }
        }
        assert_abs_diff_eq!(k.scalar(), 4.0 * (m * (m + 1)) as f64, epsilon = 1e-10);
        assert_abs_diff_eq!(k.base().scalar_curvature(), k.scalar(), epsilon = 1e-10);
    }
}

#[test]
fn product_factor_directions() {
    let k = cp_times_cp1(3, 1.0).unwrap();
    let n = k.n();
    // e_1 spans the CP^1 factor, e_2 lies in CP^2.
    let x = basis_vector(n, 0);
    let y = basis_vector(n, 1);
    assert_abs_diff_eq!(k.ric_perp(&x).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(k.orth_bisec(&x, &y).unwrap(), 0.0, epsilon = 1e-12);
    let f = cp_times_flat(2).unwrap();
    assert_abs_diff_eq!(f.ric_perp(&x).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(f.mixed_c(2.0, -1.0, &x).unwrap(), 0.0, epsilon = 1e-12);
}
