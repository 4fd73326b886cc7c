mod common;

use common::*;
use diskeig_core::dense::eigenvalues;
use diskeig_core::partition::{build_adjacency, interior_interface_order, partition, Graph, PartitionedPencil};
use diskeig_core::sparse::{read_matrix_market, SparseMatrix, SparsePencil};
use diskeig_core::synth::random_dense_sparse;
use diskeig_core::Error;
use proptest::prelude::*;

fn path(n: usize) -> Graph {
    Graph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

fn grid(nx: usize, ny: usize) -> Graph {
    let mut e = vec![];
    for y in 0..ny {
        for x in 0..nx {
            let v = y * nx + x;
            if x + 1 < nx {
                e.push((v, v + 1));
            }
            if y + 1 < ny {
                e.push((v, v + nx));
            }
        }
    }
    Graph::from_edges(nx * ny, &e)
}

fn cliques(k: usize, size: usize) -> Graph {
    let mut e = vec![];
    for b in 0..k {
        for i in 0..size {
            for j in 0..i {
                e.push((b * size + i, b * size + j));
            }
        }
    }
    Graph::from_edges(k * size, &e)
}

fn cache_dir() -> std::path::PathBuf {
    match std::env::var_os("DISKEIG_CACHE_DIR") {
        Some(p) => p.into(),
        None => std::path::PathBuf::from(std::env::var_os("HOME").unwrap_or_default()).join(".cache/diskeig"),
    }
}

#[test]
fn adjacency_cases() {
    let eye = SparsePencil::standard(SparseMatrix::identity(5)).unwrap();
    assert_eq!(build_adjacency(&eye).edge_count(), 0);
    let upper = SparseMatrix::from_triplets(4, 4, &[(0, 1, c(1.0, 0.0)), (1, 2, c(1.0, 0.0)), (2, 3, c(1.0, 0.0))]).unwrap();
    assert_eq!(build_adjacency(&SparsePencil::standard(upper).unwrap()), path(4));
}

#[test]
fn adjacency_matches_dense_pattern() {
    let a = random_dense_sparse(25, 25, 0.08, 1);
    let m = random_dense_sparse(25, 25, 0.04, 2);
    let g = build_adjacency(&SparsePencil::new(a.clone(), m.clone()).unwrap());
    let (ad, md) = (a.to_dense(), m.to_dense());
    for i in 0..25 {
        for j in 0..25 {
            let want = i != j && [ad[(i, j)], ad[(j, i)], md[(i, j)], md[(j, i)]].iter().any(|v| v.norm() > 0.0);
            assert_eq!(g.neighbors(i).contains(&j), want, "({i}, {j})");
        }
    }
}

#[test]
fn path_split_is_optimal() {
    let g = path(8);
    let labels = partition(&g, 2).unwrap();
    assert_eq!(g.edge_cut(&labels), 1);
    let sizes = [1, 2].map(|l| labels.iter().filter(|&&x| x == l).count());
    assert_eq!(sizes, [4, 4]);
}

#[test]
fn components_become_parts() {
    let g = cliques(2, 5);
    let labels = partition(&g, 2).unwrap();
    assert_eq!(g.edge_cut(&labels), 0);
    let r = interior_interface_order(&g, &labels).unwrap();
    assert_eq!((r.d, r.s), (10, 0));
}

#[test]
fn all_interface_grid() {
    let g = grid(2, 2);
    let labels = partition(&g, 2).unwrap();
    let r = interior_interface_order(&g, &labels).unwrap();
    assert_eq!((r.d, r.s), (0, 4));
    let pencil = SparsePencil::standard(SparseMatrix::from_triplets(4, 4, &[(0, 1, c(1.0, 0.0)), (0, 2, c(1.0, 0.0)), (1, 3, c(1.0, 0.0)), (2, 3, c(1.0, 0.0)), (0, 0, c(1.0, 0.0))]).unwrap()).unwrap();
    let pp = PartitionedPencil::build(&pencil, 2).unwrap();
    assert_eq!((pp.d(), pp.blocks.b.rows(), pp.b_blocks.len()), (0, 0, 0));
}

#[test]
fn parameter_errors() {
    assert!(matches!(partition(&path(3), 4), Err(Error::TooManyParts { parts: 4, vertices: 3 })));
    assert!(matches!(partition(&path(3), 1), Err(Error::InvalidParts(1))));
    assert!(interior_interface_order(&path(3), &[1, 0, 2]).is_err());
}

#[test]
fn grid_parts_are_balanced() {
    let g = grid(30, 20);
    for p in [2, 3, 4, 8] {
        let labels = partition(&g, p).unwrap();
        let target = 600.0 / p as f64;
        for l in 1..=p {
            let size = labels.iter().filter(|&&x| x == l).count() as f64;
            assert!((size - target).abs() <= 0.25 * target, "p={p} part {l}: {size}");
        }
    }
}

#[test]
fn reordering_preserves_spectrum() {
    let a = random_dense_sparse(80, 80, 0.03, 3);
    let tri = SparseMatrix::from_triplets(80, 80, &(1..80).map(|i| (i, i - 1, c(1.0, 0.0))).collect::<Vec<_>>()).unwrap();
    let a = SparseMatrix::lincomb(c(1.0, 0.0), &a, c(1.0, 0.0), &tri);
    let pencil = SparsePencil::standard(a.clone()).unwrap();
    let pp = PartitionedPencil::build(&pencil, 4).unwrap();
    let e1 = eigenvalues(&a.to_dense()).unwrap();
    let e2 = eigenvalues(&pp.pencil.a.to_dense()).unwrap();
    assert!(multiset_distance(&e1, &e2) <= 1e-9);
    let x = random_vec(80, 4);
    assert_eq!(pp.to_original(&pp.to_reordered(&x)), x);
}

#[test]
fn wang1_interface_size() {
    let path = cache_dir().join("wang1.mtx");
    if !path.exists() {
        eprintln!("SKIP wang1_interface_size: {} not cached", path.display());
        return;
    }
    let a = read_matrix_market(&path).unwrap();
    let pp = PartitionedPencil::build(&SparsePencil::standard(a).unwrap(), 8).unwrap();
    assert!((300..=900).contains(&pp.s()), "s = {}", pp.s());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interior_block_is_block_diagonal(seed in 0u64..1000, n in 8usize..60, p in 2usize..6) {
        let a = random_dense_sparse(n, n, 3.0 / n as f64, seed);
        let pencil = SparsePencil::standard(a).unwrap();
        let pp = PartitionedPencil::build(&pencil, p).unwrap();
        let r = &pp.partition;
        prop_assert_eq!(r.d + r.s, n);
        prop_assert_eq!(r.interior_sizes.iter().sum::<usize>(), r.d);
        prop_assert_eq!(r.interface_sizes.iter().sum::<usize>(), r.s);
        prop_assert!(r.part_labels.iter().all(|&l| (1..=p).contains(&l)));
        // block id of every interior row in the new numbering
        let mut owner = vec![usize::MAX; r.d];
        for (k, range) in pp.block_ranges.iter().enumerate() {
            for i in range.clone() {
                owner[i] = k;
            }
        }
        let b = &pp.blocks.b;
        for j in 0..b.cols() {
            for (i, _) in b.col_iter(j) {
                prop_assert_eq!(owner[i], owner[j]);
            }
        }
        // interface vertices are exactly those with a foreign neighbour
        let g = build_adjacency(&pencil);
        let newpos = r.permutation.forward();
        for v in 0..n {
            let foreign = g.neighbors(v).iter().any(|&w| r.part_labels[w] != r.part_labels[v]);
            prop_assert_eq!(foreign, newpos[v] >= r.d);
        }
    }

    #[test]
    fn every_part_nonempty(seed in 0u64..1000, n in 4usize..50, p in 2usize..5) {
        let g = Graph::from_edges(n, &(0..2 * n).map(|k| ((k * 7 + seed as usize) % n, (k * 13 + 1) % n)).collect::<Vec<_>>());
        let labels = partition(&g, p.min(n)).unwrap();
        for l in 1..=p.min(n) {
            prop_assert!(labels.contains(&l));
        }
    }
}
