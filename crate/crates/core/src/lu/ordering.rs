use std::collections::BTreeSet;

use crate::sparse::SparseMatrix;

/// A fill-reducing column order, `order[k]` = original column eliminated at step `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnOrdering {
    pub order: Vec<usize>,
}

impl ColumnOrdering {
    pub fn natural(n: usize) -> Self {
        ColumnOrdering { order: (0..n).collect() }
    }

    /// Minimum degree on the pattern of `A + A^T`. Only the pattern matters,
    /// so one ordering serves every shift `A - zeta M` of a pencil.
    pub fn minimum_degree(a: &SparseMatrix) -> Self {
        let n = a.rows();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for j in 0..a.cols() {
            for (i, _) in a.col_iter(j) {
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        let mut eliminated = vec![false; n];
        let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
        let mut order = Vec::with_capacity(n);
        while let Some((_, v)) = queue.pop_first() {
            eliminated[v] = true;
            order.push(v);
            let nbrs = std::mem::take(&mut adj[v]);
            // neighbours of v become a clique
            for &u in &nbrs {
                queue.remove(&(adj[u].len(), u));
                let merged = merge_excluding(&adj[u], &nbrs, u, v);
                adj[u] = merged;
                queue.insert((adj[u].len(), u));
            }
        }
        debug_assert!(eliminated.iter().all(|&e| e));
        ColumnOrdering { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sorted union of `a` and `b`, without `u` and `v`.
fn merge_excluding(a: &[usize], b: &[usize], u: usize, v: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            let x = a[i];
            if j < b.len() && b[j] == x {
                j += 1;
            }
            i += 1;
            x
        } else {
            let x = b[j];
            j += 1;
            x
        };
        if x != u && x != v {
            out.push(x);
        }
    }
    out
}
