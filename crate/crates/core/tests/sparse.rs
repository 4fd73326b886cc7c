mod common;

use common::*;
use diskeig_core::dense::{eigenvalues, DenseMatrix};
use diskeig_core::sparse::{
    extract_blocks, parse_matrix_market, read_matrix_market, write_matrix_market, Permutation, SparseMatrix,
    SparsePencil,
};
use diskeig_core::synth::random_dense_sparse;
use diskeig_core::{Error, C64};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn random_perm(n: usize, seed: u64) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut rng(seed));
    Permutation::from_forward(v).unwrap()
}

#[test]
fn reads_coordinate_diagonal() {
    let a = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 2.0\n").unwrap();
    assert_eq!(a.to_dense(), DenseMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]));
}

#[test]
fn expands_symmetric_storage() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n% lower part\n3 3 4\n1 1 4\n2 1 -1\n3 2 -1\n3 3 4\n";
    let a = parse_matrix_market(text).unwrap().to_dense();
    assert_eq!(a, a.transpose());
    assert_eq!(a[(0, 1)], c(-1.0, 0.0));
    let h = parse_matrix_market("%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 0 3\n")
        .unwrap()
        .to_dense();
    assert_eq!(h[(0, 1)], c(0.0, -3.0));
    let s = parse_matrix_market("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 5\n").unwrap();
    assert_eq!(s.get(0, 1), c(-5.0, 0.0));
    let p = parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n").unwrap();
    assert_eq!((p.get(0, 2), p.get(1, 0), p.nnz()), (c(1.0, 0.0), c(1.0, 0.0), 2));
}

#[test]
fn sums_duplicates_and_reports_errors() {
    let a = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.5\n1 1 2.5\n").unwrap();
    assert_eq!(a.get(0, 0), c(4.0, 0.0));
    assert!(matches!(
        parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"),
        Err(Error::UnsupportedFormat(_))
    ));
    match parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_matrix_market("not a banner\n"), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn complex_file_round_trip() {
    let a = random_dense_sparse(9, 7, 0.4, 5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    write_matrix_market(&path, &a).unwrap();
    let b = read_matrix_market(&path).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spmv_cases() {
    let x = random_vec(6, 1);
    assert_eq!(SparseMatrix::identity(6).spmv(&x), x);
    assert!(SparseMatrix::zeros(6, 6).spmv(&x).iter().all(|e| *e == c(0.0, 0.0)));
    let a = random_dense_sparse(50, 50, 0.1, 2);
    let x = random_vec(50, 3);
    let y = a.spmv(&x);
    let z = a.to_dense().matvec(&x);
    let err: f64 = y.iter().zip(&z).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let nz: f64 = z.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    assert!(err <= 1e-13 * nz);
}

#[test]
fn permute_symmetric_cases() {
    let a = random_dense_sparse(8, 8, 0.3, 4);
    assert_eq!(a.permute_symmetric(&Permutation::identity(8)).unwrap(), a);
    let swap = Permutation::from_forward(vec![1, 0]).unwrap();
    let d = SparseMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
    assert_eq!(d.permute_symmetric(&swap).unwrap(), SparseMatrix::from_diag(&[c(2.0, 0.0), c(1.0, 0.0)]));
    let p = random_perm(8, 5);
    let b = a.permute_symmetric(&p).unwrap();
    for j in 0..8 {
        for i in 0..8 {
            assert_eq!(b.get(p.apply(i), p.apply(j)), a.get(i, j));
        }
    }
}

#[test]
fn permutation_preserves_spectrum() {
    let a = random_dense_sparse(30, 30, 0.2, 6);
    let b = a.permute_symmetric(&random_perm(30, 7)).unwrap();
    let ea = eigenvalues(&a.to_dense()).unwrap();
    let eb = eigenvalues(&b.to_dense()).unwrap();
    assert!(multiset_distance(&ea, &eb) <= 1e-9);
}

#[test]
fn block_extraction_cases() {
    let bd = SparseMatrix::from_triplets(4, 4, &[(0, 0, c(1.0, 0.0)), (1, 1, c(2.0, 0.0)), (2, 3, c(3.0, 0.0)), (3, 2, c(1.0, 1.0))])
        .unwrap();
    let blocks = extract_blocks(&SparsePencil::standard(bd).unwrap(), 2).unwrap();
    assert!(blocks.f.is_zero() && blocks.e.is_zero());
    let pencil = SparsePencil::new(random_dense_sparse(6, 6, 0.5, 8), random_dense_sparse(6, 6, 0.5, 9)).unwrap();
    let blocks = extract_blocks(&pencil, 5).unwrap();
    assert_eq!((blocks.c.rows(), blocks.c.cols(), blocks.d(), blocks.s()), (1, 1, 5, 1));
    assert_eq!((blocks.f.rows(), blocks.f.cols(), blocks.e.rows(), blocks.e.cols()), (5, 1, 1, 5));
}

#[test]
fn rejects_mismatched_pencil() {
    assert!(SparsePencil::new(SparseMatrix::identity(3), SparseMatrix::identity(4)).is_err());
    assert!(Permutation::from_forward(vec![0, 0, 1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blocks_reassemble_exactly(seed in 0u64..1000, n in 2usize..25, frac in 0.0f64..1.0) {
        let pencil = SparsePencil::new(random_dense_sparse(n, n, 0.3, seed), random_dense_sparse(n, n, 0.2, seed + 1)).unwrap();
        let d = ((n as f64) * frac) as usize;
        let blocks = extract_blocks(&pencil, d).unwrap();
        let back = blocks.reassemble().unwrap();
        prop_assert_eq!(back.a, pencil.a);
        prop_assert_eq!(back.m, pencil.m);
    }

    #[test]
    fn permutations_compose(seed in 0u64..1000, n in 1usize..20) {
        let a = random_dense_sparse(n, n, 0.3, seed);
        let p = random_perm(n, seed + 1);
        let q = random_perm(n, seed + 2);
        let twice = a.permute_symmetric(&p).unwrap().permute_symmetric(&q).unwrap();
        prop_assert_eq!(twice, a.permute_symmetric(&p.then(&q)).unwrap());
    }

    #[test]
    fn csc_invariants_hold_after_assembly(seed in 0u64..1000, n in 1usize..15) {
        let mut r = rng(seed);
        let trip: Vec<(usize, usize, C64)> = (0..3 * n)
            .map(|_| {
                use rand::Rng;
                (r.random_range(0..n), r.random_range(0..n), c(r.random_range(-1.0..1.0), 0.0))
            })
            .collect();
        let a = SparseMatrix::from_triplets(n, n, &trip).unwrap();
        for j in 0..n {
            let rows = &a.rowidx()[a.colptr()[j]..a.colptr()[j + 1]];
            prop_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        }
        let mut dense = DenseMatrix::zeros(n, n);
        for &(i, j, v) in &trip {
            dense.col_mut(j)[i] += v;
        }
        prop_assert!(a.to_dense().sub(&dense).norm_fro() <= 1e-14);
    }
}
