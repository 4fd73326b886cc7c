//! Graph partitioning and the interior-before-interface reordering.

use std::collections::VecDeque;
use std::ops::Range;

use crate::sparse::{extract_blocks, PencilBlocks, Permutation, SparseMatrix, SparsePencil};
use crate::{Error, Result, C64};

/// Undirected graph as sorted adjacency lists, no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        Graph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    /// Number of edges whose endpoints carry different labels.
    pub fn edge_cut(&self, labels: &[usize]) -> usize {
        let mut cut = 0;
        for (u, l) in self.adj.iter().enumerate() {
            cut += l.iter().filter(|&&v| v > u && labels[v] != labels[u]).count();
        }
        cut
    }
}

/// Pattern graph of `|A| + |A^T| + |M| + |M^T|` (entries with nonzero value).
pub fn build_adjacency(pencil: &SparsePencil) -> Graph {
    let mut edges = Vec::with_capacity(pencil.a.nnz() + pencil.m.nnz());
    for mat in [&pencil.a, &pencil.m] {
        for j in 0..mat.cols() {
            for (i, v) in mat.col_iter(j) {
                if i != j && v != C64::new(0.0, 0.0) {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::from_edges(pencil.n, &edges)
}

/// BFS levels from `root` restricted to vertices with `active[v]`.
fn bfs_levels(g: &Graph, root: usize, active: &[bool], seen: &mut [u32], stamp: u32) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![root]];
    seen[root] = stamp;
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &v in g.neighbors(u) {
                if active[v] && seen[v] != stamp {
                    seen[v] = stamp;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// George–Liu pseudo-peripheral vertex of the component of `start`.
fn pseudo_peripheral(g: &Graph, start: usize, active: &[bool], seen: &mut [u32], stamp: &mut u32) -> usize {
    let mut root = start;
    *stamp += 1;
    let mut levels = bfs_levels(g, root, active, seen, *stamp);
    loop {
        let last = levels.last().unwrap();
        let cand = *last
            .iter()
            .min_by_key(|&&v| (g.neighbors(v).iter().filter(|&&w| active[w]).count(), v))
            .unwrap();
        *stamp += 1;
        let cl = bfs_levels(g, cand, active, seen, *stamp);
        if cl.len() > levels.len() {
            root = cand;
            levels = cl;
        } else {
            return root;
        }
    }
}

struct Bisector<'a> {
    g: &'a Graph,
    seen: Vec<u32>,
    stamp: u32,
    active: Vec<bool>,
}

impl Bisector<'_> {
    /// Grows a set of `target` vertices from `verts` by BFS from
    /// pseudo-peripheral vertices, restarting on disconnected remainders.
    fn grow(&mut self, verts: &[usize], target: usize) -> Vec<bool> {
        for &v in verts {
            self.active[v] = true;
        }
        let mut taken = vec![false; self.g.len()];
        let mut count = 0;
        let mut cursor = 0;
        while count < target {
            while taken[verts[cursor]] {
                cursor += 1;
            }
            let start = pseudo_peripheral(self.g, verts[cursor], &self.active, &mut self.seen, &mut self.stamp);
            let mut q = VecDeque::from([start]);
            taken[start] = true;
            count += 1;
            while count < target {
                let Some(u) = q.pop_front() else { break };
                for &v in self.g.neighbors(u) {
                    if self.active[v] && !taken[v] {
                        taken[v] = true;
                        count += 1;
                        q.push_back(v);
                        if count == target {
                            break;
                        }
                    }
                }
            }
            // keep later restarts out of the region already grown
            for &v in verts {
                if taken[v] {
                    self.active[v] = false;
                }
            }
        }
        for &v in verts {
            self.active[v] = false;
        }
        taken
    }

    fn split(&mut self, verts: Vec<usize>, k: usize, first: usize, labels: &mut [usize]) {
        if k == 1 {
            for v in verts {
                labels[v] = first;
            }
            return;
        }
        let k1 = k / 2;
        let target = verts.len() * k1 / k;
        let taken = self.grow(&verts, target);
        let (a, b): (Vec<usize>, Vec<usize>) = verts.into_iter().partition(|&v| taken[v]);
        self.split(a, k1, first, labels);
        self.split(b, k - k1, first + k1, labels);
    }
}

/// Recursive BFS bisection into `p` parts; labels are `1..=p`.
pub fn partition(g: &Graph, p: usize) -> Result<Vec<usize>> {
    let n = g.len();
    if p < 2 {
        return Err(Error::InvalidParts(p));
    }
    if p > n {
        return Err(Error::TooManyParts { parts: p, vertices: n });
    }
    let mut labels = vec![0; n];
    let mut b = Bisector { g, seen: vec![0; n], stamp: 0, active: vec![false; n] };
    b.split((0..n).collect(), p, 1, &mut labels);
    Ok(labels)
}

/// Interior/interface split of a labelled graph.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionResult {
    /// Old index to new index; interiors of parts `1..=p` first, then interfaces.
    pub permutation: Permutation,
    pub part_labels: Vec<usize>,
    pub interior_sizes: Vec<usize>,
    pub interface_sizes: Vec<usize>,
    pub d: usize,
    pub s: usize,
    pub edge_cut: usize,
}

impl PartitionResult {
    pub fn parts(&self) -> usize {
        self.interior_sizes.len()
    }
}

/// Orders interior vertices of each part before all interface vertices.
pub fn interior_interface_order(g: &Graph, labels: &[usize]) -> Result<PartitionResult> {
    let n = g.len();
    if labels.len() != n {
        return Err(Error::InvalidLabels(format!("{} labels for {n} vertices", labels.len())));
    }
    let p = labels.iter().copied().max().unwrap_or(0);
    if labels.iter().any(|&l| l == 0) {
        return Err(Error::InvalidLabels("labels must be in 1..=p".into()));
    }
    let interface: Vec<bool> =
        (0..n).map(|v| g.neighbors(v).iter().any(|&w| labels[w] != labels[v])).collect();
    let mut interior_sizes = vec![0; p];
    let mut interface_sizes = vec![0; p];
    let mut inner: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut outer: Vec<Vec<usize>> = vec![Vec::new(); p];
    for v in 0..n {
        let l = labels[v] - 1;
        if interface[v] {
            interface_sizes[l] += 1;
            outer[l].push(v);
        } else {
            interior_sizes[l] += 1;
            inner[l].push(v);
        }
    }
    let order: Vec<usize> = inner.into_iter().flatten().chain(outer.into_iter().flatten()).collect();
    let d = interior_sizes.iter().sum();
    Ok(PartitionResult {
        permutation: Permutation::from_order(order)?,
        part_labels: labels.to_vec(),
        interior_sizes,
        interface_sizes,
        d,
        s: n - d,
        edge_cut: g.edge_cut(labels),
    })
}

/// A reordered pencil with its 2×2 block split and the block-diagonal
/// structure of the interior block.
#[derive(Clone, Debug)]
pub struct PartitionedPencil {
    /// The pencil after the symmetric reordering.
    pub pencil: SparsePencil,
    pub partition: PartitionResult,
    pub blocks: PencilBlocks,
    /// Row/column ranges of the diagonal sub-blocks of `B`.
    pub block_ranges: Vec<Range<usize>>,
    pub b_blocks: Vec<SparseMatrix>,
    pub mb_blocks: Vec<SparseMatrix>,
}

impl PartitionedPencil {
    /// Partitions the adjacency graph into `p` parts and reorders.
    pub fn build(pencil: &SparsePencil, p: usize) -> Result<Self> {
        let g = build_adjacency(pencil);
        let labels = partition(&g, p)?;
        let result = interior_interface_order(&g, &labels)?;
        Self::from_partition(pencil, result)
    }

    pub fn from_partition(pencil: &SparsePencil, partition: PartitionResult) -> Result<Self> {
        let reordered = pencil.permute_symmetric(&partition.permutation)?;
        let mut ranges = Vec::with_capacity(partition.parts());
        let mut off = 0;
        for &di in &partition.interior_sizes {
            ranges.push(off..off + di);
            off += di;
        }
        Self::assemble(reordered, partition, ranges)
    }

    /// A single interior block of size `d` without reordering: the first `d`
    /// unknowns are interior, the rest interface.
    pub fn from_split(pencil: &SparsePencil, d: usize) -> Result<Self> {
        let n = pencil.n;
        if d > n {
            return Err(Error::DimensionMismatch(format!("interior count {d} exceeds dimension {n}")));
        }
        let labels: Vec<usize> = (0..n).map(|v| if v < d { 1 } else { 2 }).collect();
        let g = build_adjacency(pencil);
        let partition = PartitionResult {
            permutation: Permutation::identity(n),
            edge_cut: g.edge_cut(&labels),
            part_labels: labels,
            interior_sizes: vec![d],
            interface_sizes: vec![n - d],
            d,
            s: n - d,
        };
        let ranges = if d > 0 { vec![0..d] } else { vec![] };
        Self::assemble(pencil.clone(), partition, ranges)
    }

    fn assemble(pencil: SparsePencil, partition: PartitionResult, ranges: Vec<Range<usize>>) -> Result<Self> {
        let blocks = extract_blocks(&pencil, partition.d)?;
        let ranges: Vec<Range<usize>> = ranges.into_iter().filter(|r| !r.is_empty()).collect();
        let b_blocks = ranges.iter().map(|r| blocks.b.block(r.start, r.end, r.start, r.end)).collect();
        let mb_blocks = ranges.iter().map(|r| blocks.mb.block(r.start, r.end, r.start, r.end)).collect();
        Ok(PartitionedPencil { pencil, partition, blocks, block_ranges: ranges, b_blocks, mb_blocks })
    }

    pub fn d(&self) -> usize {
        self.partition.d
    }

    pub fn s(&self) -> usize {
        self.partition.s
    }

    pub fn n(&self) -> usize {
        self.pencil.n
    }

    /// Maps a vector in the reordered numbering back to the original one.
    pub fn to_original(&self, x: &[C64]) -> Vec<C64> {
        self.partition.permutation.unpermute_vec(x)
    }

    /// Maps a vector in the original numbering to the reordered one.
    pub fn to_reordered(&self, x: &[C64]) -> Vec<C64> {
        self.partition.permutation.permute_vec(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
    }

    #[test]
    fn path_split_is_contiguous() {
        let labels = partition(&path(8), 2).unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == labels[0]).count(), 4);
        assert_eq!(path(8).edge_cut(&labels), 1);
    }

    #[test]
    fn part_count_errors() {
        assert_eq!(partition(&path(3), 4), Err(Error::TooManyParts { parts: 4, vertices: 3 }));
        assert_eq!(partition(&path(3), 1), Err(Error::InvalidParts(1)));
    }

    #[test]
    fn every_part_nonempty() {
        let g = path(7);
        for p in 2..=7 {
            let labels = partition(&g, p).unwrap();
            for l in 1..=p {
                assert!(labels.contains(&l), "p={p} missing part {l}");
            }
        }
    }

    #[test]
    fn square_grid_all_interface() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]);
        let labels = partition(&g, 2).unwrap();
        let r = interior_interface_order(&g, &labels).unwrap();
        assert_eq!(r.d, 0);
        assert_eq!(r.s, 4);
    }
}
