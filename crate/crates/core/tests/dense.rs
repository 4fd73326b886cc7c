mod common;

use common::*;
use diskeig_core::dense::{
    complex_eig, dense_solve, eigenvalues, orthonormalize, principal_angle_sines, svd, DenseMatrix,
};
use diskeig_core::{Error, C64};
use proptest::prelude::*;

/// Classical Gram-Schmidt with one full reorthogonalization pass.
fn cgs2(x: &DenseMatrix) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(x.rows(), 0);
    for j in 0..x.cols() {
        let mut v = x.col(j).to_vec();
        for _ in 0..2 {
            let h = q.adjoint_matvec(&v);
            let p = q.matvec(&h);
            v.iter_mut().zip(&p).for_each(|(a, b)| *a -= b);
        }
        let n = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|e| *e /= n);
        q.push_col(&v);
    }
    q
}

/// Characteristic polynomial coefficients, highest degree first, by the
/// Faddeev-LeVerrier recursion.
fn faddeev_leverrier(a: &DenseMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut m = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&m);
        for i in 0..n {
            next.col_mut(i)[i] += coeffs[k - 1];
        }
        m = next;
        let am = a.matmul(&m);
        let tr: C64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

fn horner(p: &[C64], z: C64) -> (C64, C64) {
    let (mut v, mut d) = (c(0.0, 0.0), c(0.0, 0.0));
    for &cf in p {
        d = d * z + v;
        v = v * z + cf;
    }
    (v, d)
}

/// Simultaneous polynomial root finding (Aberth-Ehrlich).
fn aberth_roots(p: &[C64]) -> Vec<C64> {
    let n = p.len() - 1;
    let bound = 1.0 + p[1..].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64)).collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (v, d) = horner(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

#[test]
fn orthonormalize_identity_and_rank_one() {
    let q = orthonormalize(&DenseMatrix::identity(3)).unwrap();
    assert_eq!(q.cols(), 3);
    for j in 0..3 {
        assert!((q[(j, j)].norm() - 1.0).abs() < 1e-15);
    }
    let v = random_vec(6, 1);
    let nv = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.iter().map(|e| e / nv).collect();
    let x = DenseMatrix::from_columns(6, &[v.clone(), v.iter().map(|e| e * 2.0).collect()]);
    let q = orthonormalize(&x).unwrap();
    assert_eq!(q.cols(), 1);
    let p = q.matvec(&q.adjoint_matvec(&v));
    assert!(p.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() <= 1e-12);
}

#[test]
fn orthonormalize_matches_gram_schmidt_oracle() {
    let x = random(20, 5, 2);
    let q = orthonormalize(&x).unwrap();
    assert_eq!(q.cols(), 5);
    assert!(identity_defect(&q) <= 1e-13);
    let resid = x.sub(&q.matmul(&q.adjoint_mul(&x))).norm_fro();
    assert!(resid <= 1e-12 * x.norm_fro());
    let oracle = cgs2(&x);
    assert!(max(&principal_angle_sines(&q, &oracle)) <= 1e-12);
}

#[test]
fn orthonormalize_rejects_zero_input() {
    assert_eq!(orthonormalize(&DenseMatrix::zeros(4, 3)), Err(Error::AllZeroInput));
}

#[test]
fn svd_trivial_cases() {
    let s = svd(&DenseMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 0.0)]), false).unwrap();
    assert!((s.singular_values[0] - 3.0).abs() < 1e-15 && (s.singular_values[1] - 1.0).abs() < 1e-15);
    let z = svd(&DenseMatrix::zeros(4, 2), true).unwrap();
    assert_eq!(z.singular_values, vec![0.0, 0.0]);
}

#[test]
fn svd_matches_gram_eigenvalues() {
    let x = random(10, 10, 3);
    let s = svd(&x, true).unwrap();
    let mut lam: Vec<f64> = eigenvalues(&x.adjoint_mul(&x)).unwrap().iter().map(|l| l.re.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in s.singular_values.iter().zip(&lam) {
        assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }
    let u = s.left_vectors.unwrap();
    let v = s.right_vectors.unwrap();
    let sig: Vec<C64> = s.singular_values.iter().map(|&x| c(x, 0.0)).collect();
    let rec = u.matmul(&DenseMatrix::from_diag(&sig)).matmul(&v.adjoint());
    assert!(rec.sub(&x).norm_fro() <= 1e-12 * x.norm_fro());
}

#[test]
fn svd_of_wide_input() {
    let x = random(3, 7, 4);
    let s = svd(&x, true).unwrap();
    assert_eq!(s.singular_values.len(), 3);
    let sig: Vec<C64> = s.singular_values.iter().map(|&x| c(x, 0.0)).collect();
    let rec = s.left_vectors.unwrap().matmul(&DenseMatrix::from_diag(&sig)).matmul(&s.right_vectors.unwrap().adjoint());
    assert!(rec.sub(&x).norm_fro() <= 1e-12 * x.norm_fro());
}

#[test]
fn eig_trivial_spectra() {
    let d = eigenvalues(&DenseMatrix::from_diag(&[c(1.0, 2.0), c(-3.0, 0.0)])).unwrap();
    assert!(multiset_distance(&d, &[c(1.0, 2.0), c(-3.0, 0.0)]) < 1e-14);
    let rot = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => c(1.0, 0.0),
        (1, 0) => c(-1.0, 0.0),
        _ => c(0.0, 0.0),
    });
    assert!(multiset_distance(&eigenvalues(&rot).unwrap(), &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
}

#[test]
fn eig_matches_characteristic_polynomial_roots() {
    for seed in 0..5 {
        let a = random(12, 12, 10 + seed);
        let roots = aberth_roots(&faddeev_leverrier(&a));
        let ev = eigenvalues(&a).unwrap();
        assert!(multiset_distance(&ev, &roots) <= 1e-8, "seed {seed}");
    }
}

#[test]
fn eig_schur_form_and_vectors() {
    let a = random(15, 15, 20);
    let s = complex_eig(&a).unwrap();
    let t = &s.triangular_factor;
    for j in 0..15 {
        for i in j + 1..15 {
            assert!(t[(i, j)].norm() <= 1e-13 * a.norm_fro());
        }
    }
    assert!(identity_defect(&s.unitary_factor) <= 1e-12);
    let back = s.unitary_factor.matmul(t).matmul(&s.unitary_factor.adjoint());
    assert!(back.sub(&a).norm_fro() <= 1e-12 * a.norm_fro());
    let v = s.eigenvectors();
    for (k, &l) in s.eigenvalues.iter().enumerate() {
        let x = v.col(k);
        let ax = a.matvec(x);
        let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - l * q).norm_sqr()).sum::<f64>().sqrt();
        assert!(r <= 1e-10 * a.norm_fro());
    }
}

#[test]
fn dense_solve_cases() {
    let b = random(5, 3, 30);
    let x = dense_solve(&DenseMatrix::identity(5), &b).unwrap();
    assert_eq!(x, b);
    let x = dense_solve(&DenseMatrix::identity(4).scale(c(2.0, 0.0)), &DenseMatrix::identity(4)).unwrap();
    assert!(x.sub(&DenseMatrix::identity(4).scale(c(0.5, 0.0))).norm_fro() < 1e-16);
    let a = DenseMatrix::identity(8).scale(c(4.0, 0.0)).add(&random(8, 8, 31));
    let cond = diskeig_core::dense::cond2(&a).unwrap();
    let b = random(8, 2, 32);
    let x = dense_solve(&a, &b).unwrap();
    assert!(a.matmul(&x).sub(&b).norm_fro() <= 1e-11 * cond * b.norm_fro());
}

#[test]
fn dense_solve_reports_singular_pivot() {
    let mut a = DenseMatrix::identity(3);
    a.col_mut(1)[1] = c(0.0, 0.0);
    assert!(matches!(dense_solve(&a, &DenseMatrix::identity(3)), Err(Error::SingularMatrix { pivot: 1 })));
}

fn unitary(n: usize, seed: u64) -> DenseMatrix {
    orthonormalize(&random(n, n, seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orthonormalize_is_idempotent_on_spans(seed in 0u64..1000, rows in 4usize..20, cols in 1usize..6) {
        let x = random(rows, cols.min(rows), seed);
        let q1 = orthonormalize(&x).unwrap();
        let q2 = orthonormalize(&q1).unwrap();
        prop_assert_eq!(q1.cols(), q2.cols());
        prop_assert!(max(&principal_angle_sines(&q1, &q2)) <= 1e-12);
    }

    #[test]
    fn singular_values_are_unitarily_invariant(seed in 0u64..1000, n in 2usize..10) {
        let x = random(n, n, seed);
        let y = unitary(n, seed + 1).matmul(&x).matmul(&unitary(n, seed + 2));
        let a = svd(&x, false).unwrap().singular_values;
        let b = svd(&y, false).unwrap().singular_values;
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() <= 1e-11 * a[0]);
        }
    }

    #[test]
    fn eigenvalues_are_similarity_invariant(seed in 0u64..1000, n in 2usize..10) {
        let a = random(n, n, seed);
        let p = DenseMatrix::identity(n).scale(c(3.0, 0.0)).add(&random(n, n, seed + 7));
        let pinv = dense_solve(&p, &DenseMatrix::identity(n)).unwrap();
        let b = p.matmul(&a).matmul(&pinv);
        let ea = eigenvalues(&a).unwrap();
        let eb = eigenvalues(&b).unwrap();
        prop_assert!(multiset_distance(&ea, &eb) <= 1e-8);
    }
}
