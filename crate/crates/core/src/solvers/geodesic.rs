use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::geometry::Surface;
use crate::mapping::{compact_index, Prolongation};
use crate::mesh::Vertex;

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, u32);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Shortest edge-graph distances from `sources`, indexed by vertex id.
/// Unreachable and dead vertices get `+∞`.
pub fn dijkstra(surface: &Surface, sources: &[Vertex]) -> Vec<f64> {
    let m = surface.mesh();
    let mut d = vec![f64::INFINITY; m.vertex_capacity()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        d[s.idx()] = 0.0;
        heap.push(Item(0.0, s.0));
    }
    while let Some(Item(du, u)) = heap.pop() {
        let u = Vertex(u);
        if du > d[u.idx()] {
            continue;
        }
        for h in m.outgoing(u) {
            let v = m.tip(h);
            let dv = du + surface.length(h);
            if dv < d[v.idx()] {
                d[v.idx()] = dv;
                heap.push(Item(dv, v.0));
            }
        }
    }
    d
}

/// Dense all-pairs graph distances in compact vertex order, symmetrized.
pub fn all_pairs_dijkstra(surface: &Surface) -> Vec<Vec<f64>> {
    let (col, n) = compact_index(surface);
    let verts: Vec<Vertex> = surface.mesh().vertices().collect();
    let mut out = vec![vec![0.0; n]; n];
    for (a, &s) in verts.iter().enumerate() {
        let d = dijkstra(surface, &[s]);
        for &v in &verts {
            out[a][col[v.idx()] as usize] = d[v.idx()];
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let x = 0.5 * (out[a][b] + out[b][a]);
            out[a][b] = x;
            out[b][a] = x;
        }
    }
    out
}

/// Implicit fine distance matrix `P D̃ Pᵀ`.
#[derive(Clone, Debug)]
pub struct LowRankDistance {
    p: Prolongation,
    start: Vec<usize>,
    coarse: Vec<Vec<f64>>,
}

impl LowRankDistance {
    pub fn new(p: Prolongation, coarse: &Surface) -> Result<Self> {
        let d = all_pairs_dijkstra(coarse);
        Self::from_distances(p, d)
    }

    pub fn from_distances(p: Prolongation, coarse: Vec<Vec<f64>>) -> Result<Self> {
        if coarse.len() != p.cols {
            return Err(crate::Error::Dimension { expected: p.cols, got: coarse.len() });
        }
        let mut start = vec![0; p.rows + 1];
        for &(i, _, _) in &p.entries {
            start[i + 1] += 1;
        }
        for i in 0..p.rows {
            start[i + 1] += start[i];
        }
        Ok(LowRankDistance { p, start, coarse })
    }

    pub fn len(&self) -> usize {
        self.p.rows
    }

    pub fn is_empty(&self) -> bool {
        self.p.rows == 0
    }

    fn prow(&self, i: usize) -> &[(usize, usize, f64)] {
        &self.p.entries[self.start[i]..self.start[i + 1]]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let mut s = 0.0;
        for &(_, a, x) in self.prow(i) {
            for &(_, b, y) in self.prow(j) {
                s += x * y * self.coarse[a][b];
            }
        }
        s
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut t = vec![0.0; self.p.cols];
        for &(_, a, x) in self.prow(i) {
            for (b, tb) in t.iter_mut().enumerate() {
                *tb += x * self.coarse[a][b];
            }
        }
        (0..self.p.rows).map(|j| self.prow(j).iter().map(|&(_, b, y)| y * t[b]).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn grid_hops() {
        let (p, f) = shapes::grid(5, 2, 4.0, 1.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let d = dijkstra(&s, &[Vertex(0)]);
        for i in 0..5 {
            assert!((d[i] - i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_triangle_inequality() {
        let (p, f) = shapes::bumpy_sphere(5, 0.2, 3.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let d = dijkstra(&s, &[Vertex(3)]);
        assert_eq!(d[3], 0.0);
        for h in s.mesh().halfedges() {
            let (u, v) = (s.mesh().tail(h), s.mesh().tip(h));
            assert!(d[v.idx()] <= d[u.idx()] + s.length(h) + 1e-12);
        }
    }
}
