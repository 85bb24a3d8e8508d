//! Prolongation operators from coarse vertices to fine vertices, built from
//! tracked vertex positions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::math::{self, Vec2};
use crate::mesh::{Face, Vertex};
use crate::sparse::Csr;
use crate::tangent::TangentVec;

use super::track::Tracker;

/// Compact column index of every live vertex, in ascending vertex order.
pub fn compact_index(surface: &Surface) -> (Vec<u32>, usize) {
    let m = surface.mesh();
    let mut col = vec![u32::MAX; m.vertex_capacity()];
    let mut n = 0;
    for v in m.vertices() {
        col[v.idx()] = n as u32;
        n += 1;
    }
    (col, n)
}

/// Sparse `fine × coarse` interpolation matrix. Row `i` holds the
/// barycentric coordinates of fine vertex `i` on the coarse surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)`, grouped by row.
    pub entries: Vec<(usize, usize, f64)>,
}

fn push_merged<T: Copy + core::ops::AddAssign + PartialEq + Default>(row: &mut Vec<(usize, T)>, c: usize, x: T) {
    if x == T::default() {
        return;
    }
    match row.iter_mut().find(|e| e.0 == c) {
        Some(e) => e.1 += x,
        None => row.push((c, x)),
    }
}

impl Prolongation {
    pub fn new(coarse: &Surface, tracker: &Tracker) -> Self {
        let (col, cols) = compact_index(coarse);
        let m = coarse.mesh();
        let mut entries = Vec::new();
        let mut row = Vec::with_capacity(3);
        for (i, p) in tracker.points().iter().enumerate() {
            row.clear();
            for (k, v) in m.face_vertices(p.face).iter().enumerate() {
                push_merged(&mut row, col[v.idx()] as usize, p.bary[k]);
            }
            entries.extend(row.iter().map(|&(c, x)| (i, c, x)));
        }
        Prolongation { rows: tracker.points().len(), cols, entries }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: x.len() });
        }
        let mut y = vec![0.0; self.rows];
        for &(i, j, a) in &self.entries {
            y[i] += a * x[j];
        }
        Ok(y)
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::Dimension { expected: self.rows, got: y.len() });
        }
        let mut x = vec![0.0; self.cols];
        for &(i, j, a) in &self.entries {
            x[j] += a * y[i];
        }
        Ok(x)
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self.rows, self.cols, &self.entries)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(i, _, a) in &self.entries {
            s[i] += a;
        }
        s
    }
}

/// Complex `fine × coarse` operator for tangent vectors (or `power`-direction
/// fields). It acts on unnormalized coarse vectors and produces fine vectors
/// in the fine vertices' normalized coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorProlongation {
    pub rows: usize,
    pub cols: usize,
    pub power: u32,
    pub entries: Vec<(usize, usize, Complex64)>,
    /// Coarse angle scales per column, used by [`Self::apply`].
    pub scale: Vec<f64>,
    /// Rows with no usable reference neighbour, filled by averaging.
    pub fallback_rows: Vec<usize>,
}

fn unit(a: f64) -> Complex64 {
    Complex64::from_polar(1.0, a)
}

fn powi(z: Complex64, n: u32) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        r *= z;
    }
    r
}

fn point_in(layout: &[Vec2; 3], b: [f64; 3]) -> Vec2 {
    Vec2::new(
        b[0] * layout[0].x + b[1] * layout[1].x + b[2] * layout[2].x,
        b[0] * layout[0].y + b[1] * layout[1].y + b[2] * layout[2].y,
    )
}

impl VectorProlongation {
    /// `fine` is the surface the tracker was created on.
    pub fn new(fine: &Surface, coarse: &Surface, tracker: &Tracker, power: u32) -> Self {
        let (col, cols) = compact_index(coarse);
        let cm = coarse.mesh();
        let fm = fine.mesh();
        let points = tracker.points();
        let rows = points.len();
        let fine_ids: Vec<Vertex> = fm.vertices().collect();
        let mut row_of = vec![usize::MAX; fm.vertex_capacity()];
        for (r, v) in fine_ids.iter().enumerate() {
            row_of[v.idx()] = r;
        }
        let mut table: Vec<Option<Vec<(usize, Complex64)>>> = vec![None; rows];
        for (r, p) in points.iter().enumerate() {
            let i = fine_ids[r];
            let f = p.face;
            let hs = cm.face_halfedges(f);
            let layout = coarse.layout_face(f);
            let pi = point_in(&layout, p.bary);
            let Some(psi) = reference_rotation(fine, coarse, tracker, &row_of, i, f, &layout, pi) else {
                continue;
            };
            let b1 = PI - coarse.corner_angle(hs[1]);
            let beta = [0.0, b1, b1 + PI - coarse.corner_angle(hs[2])];
            let mut row = Vec::with_capacity(3);
            for k in 0..3 {
                let n = cm.tail(hs[k]);
                let z = unit(beta[k] - coarse.signpost(hs[k]) / coarse.angle_scale(n));
                push_merged(&mut row, col[n.idx()] as usize, powi(psi * z, power) * p.bary[k]);
            }
            table[r] = Some(row);
        }
        let mut fallback_rows = Vec::new();
        let known: Vec<bool> = table.iter().map(|t| t.is_some()).collect();
        for r in 0..rows {
            if known[r] {
                continue;
            }
            fallback_rows.push(r);
            let nbrs: Vec<usize> =
                fm.neighbors(fine_ids[r]).iter().map(|v| row_of[v.idx()]).filter(|&q| known[q]).collect();
            let mut row: Vec<(usize, Complex64)> = Vec::new();
            if nbrs.is_empty() {
                let p = points[r];
                for (k, v) in cm.face_vertices(p.face).iter().enumerate() {
                    push_merged(&mut row, col[v.idx()] as usize, Complex64::new(p.bary[k], 0.0));
                }
            } else {
                let w = 1.0 / nbrs.len() as f64;
                for q in nbrs {
                    for &(c, x) in table[q].as_ref().unwrap() {
                        push_merged(&mut row, c, x * w);
                    }
                }
            }
            table[r] = Some(row);
        }
        let mut entries = Vec::new();
        for (r, row) in table.into_iter().enumerate() {
            entries.extend(row.unwrap().into_iter().map(|(c, x)| (r, c, x)));
        }
        let mut scale = vec![1.0; cols];
        for v in cm.vertices() {
            scale[col[v.idx()] as usize] = coarse.angle_scale(v);
        }
        VectorProlongation { rows, cols, power, entries, scale, fallback_rows }
    }

    /// Applies the operator to coarse vectors given in normalized
    /// coordinates (already raised to `power` for direction fields).
    pub fn apply(&self, coarse: &[TangentVec]) -> Result<Vec<TangentVec>> {
        if coarse.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: coarse.len() });
        }
        let raw: Vec<Complex64> =
            coarse.iter().zip(&self.scale).map(|(u, s)| Complex64::from_polar(u.norm(), u.0.arg() / s)).collect();
        Ok(self.apply_raw(&raw)?.into_iter().map(TangentVec).collect())
    }

    /// Applies the operator to unnormalized coarse vectors.
    pub fn apply_raw(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: x.len() });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for &(i, j, a) in &self.entries {
            y[i] += a * x[j];
        }
        Ok(y)
    }
}

/// Faces reached from `f` across at most this many edges when looking for
/// the image of a neighbour.
const UNFOLD_DEPTH: usize = 4;

/// Coarse faces around `f` unfolded into its layout frame, breadth first.
fn unfold(coarse: &Surface, f: Face, layout: &[Vec2; 3]) -> Vec<(Face, [Vec2; 3], usize)> {
    let cm = coarse.mesh();
    let mut out = vec![(f, *layout, 0)];
    let mut k = 0;
    while k < out.len() {
        let (g, lg, depth) = out[k];
        k += 1;
        if depth == UNFOLD_DEPTH {
            continue;
        }
        for (e, h) in cm.face_halfedges(g).into_iter().enumerate() {
            let t = cm.twin(h);
            if cm.is_ghost(t) {
                continue;
            }
            let g2 = cm.face(t).unwrap();
            if out.iter().any(|o| o.0 == g2) {
                continue;
            }
            let hs = cm.face_halfedges(g2);
            let kt = (0..3).find(|&a| hs[a] == t).unwrap();
            let (p0, p1) = (lg[(e + 1) % 3], lg[e]);
            let apex = math::place_apex(p0, p1, coarse.length(cm.prev(t)), coarse.length(cm.next(t)));
            let mut l2 = [Vec2::ZERO; 3];
            l2[kt] = p0;
            l2[(kt + 1) % 3] = p1;
            l2[(kt + 2) % 3] = apex;
            out.push((g2, l2, depth + 1));
        }
    }
    out
}

/// Rotation from the triangle frame of `f` to the normalized frame of fine
/// vertex `i`. It is read off a fine neighbour whose direction from `i` is
/// known on the coarse surface, preferring neighbours found in `f` or at its
/// corners, then those reached by the fewest unfoldings, then the lowest id.
#[allow(clippy::too_many_arguments)]
fn reference_rotation(
    fine: &Surface,
    coarse: &Surface,
    tracker: &Tracker,
    row_of: &[usize],
    i: Vertex,
    f: Face,
    layout: &[Vec2; 3],
    pi: Vec2,
) -> Option<Complex64> {
    let fm = fine.mesh();
    let cm = coarse.mesh();
    let corners = cm.face_vertices(f);
    let eps = 1e-12 * (layout[1] - layout[0]).norm();
    let at = corners.iter().position(|&c| c == i).filter(|_| cm.vertex_alive(i));
    let towards = |d: Vec2| (d.norm() > eps).then(|| Complex64::new(d.x, d.y) / d.norm());
    let mut best: Option<(usize, Vertex, Complex64)> = None;
    let consider = |best: &mut Option<(usize, Vertex, Complex64)>, depth: usize, j: Vertex, d: Option<Complex64>| {
        if let Some(d) = d {
            if best.is_none_or(|b| (depth, j) < (b.0, b.1)) {
                *best = Some((depth, j, d));
            }
        }
    };
    for h in fm.outgoing(i) {
        let j = fm.tip(h);
        if j == i {
            continue;
        }
        let q = tracker.point(row_of[j.idx()]);
        if q.face == f {
            consider(&mut best, 0, j, towards(point_in(layout, q.bary) - pi));
        } else if let Some(k) = corners.iter().position(|&c| c == j) {
            consider(&mut best, 0, j, towards(layout[k] - pi));
        } else if let Some(k) = at {
            consider(&mut best, 0, j, around_corner(coarse, f, layout, k, j, q.face, q.bary));
        }
    }
    if best.is_none() {
        let faces = unfold(coarse, f, layout);
        for h in fm.outgoing(i) {
            let j = fm.tip(h);
            if j == i {
                continue;
            }
            let q = tracker.point(row_of[j.idx()]);
            if let Some((_, lg, depth)) = faces.iter().find(|o| o.0 == q.face) {
                consider(&mut best, *depth, j, towards(point_in(lg, q.bary) - pi));
            }
        }
    }
    let (_, j, what) = best?;
    let h = fm.outgoing(i).find(|&h| fm.tip(h) == j)?;
    Some(unit(fine.signpost(h)) / what)
}

/// Direction from corner `k` of `f` towards `j` (a coarse neighbour of that
/// corner, or a point in a face around it), in the layout frame of `f`.
fn around_corner(
    coarse: &Surface,
    f: Face,
    layout: &[Vec2; 3],
    k: usize,
    j: Vertex,
    g: Face,
    bary: [f64; 3],
) -> Option<Complex64> {
    let cm = coarse.mesh();
    let hk = cm.face_halfedges(f)[k];
    let c = cm.tail(hk);
    let s = coarse.angle_scale(c);
    let e = layout[(k + 1) % 3] - layout[k];
    let base = Complex64::new(e.x, e.y).arg() - coarse.signpost(hk) / s;
    if let Some(h) = cm.outgoing(c).find(|&h| cm.tip(h) == j && !cm.is_ghost(h)) {
        return Some(unit(base + coarse.signpost(h) / s));
    }
    let hs = cm.face_halfedges(g);
    let kg = (0..3).find(|&t| cm.tail(hs[t]) == c)?;
    let lg = coarse.layout_face(g);
    let d = point_in(&lg, bary) - lg[kg];
    if d.norm() <= 1e-12 * (lg[1] - lg[0]).norm() {
        return None;
    }
    let eg = lg[(kg + 1) % 3] - lg[kg];
    let delta = (Complex64::new(d.x, d.y) / Complex64::new(eg.x, eg.y)).arg();
    Some(unit(base + coarse.signpost(hs[kg]) / s + delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::Tracker;
    use crate::shapes;

    #[test]
    fn identity_without_removals() {
        let (p, f) = shapes::jittered_grid(5, 5, || 0.1, || false);
        let s = Surface::from_positions(&p, &f).unwrap();
        let t = Tracker::for_vertices(&s);
        let pr = Prolongation::new(&s, &t);
        assert_eq!(pr.entries.len(), 25);
        for &(i, j, a) in &pr.entries {
            assert_eq!((i, a), (j, 1.0));
        }
        let pv = VectorProlongation::new(&s, &s, &t, 1);
        assert!(pv.fallback_rows.is_empty());
        let field: Vec<TangentVec> = (0..25).map(|k| TangentVec::from_polar(1.0 + k as f64, 0.3 * k as f64)).collect();
        let out = pv.apply(&field).unwrap();
        for v in 0..25 {
            assert!((out[v].0 - field[v].0).norm() < 1e-12, "{v}");
        }
    }

    #[test]
    fn dimension_check() {
        let (p, f) = shapes::grid(3, 3, 1.0, 1.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let pr = Prolongation::new(&s, &Tracker::for_vertices(&s));
        assert!(pr.apply(&[0.0; 4]).is_err());
        assert_eq!(pr.apply(&[2.0; 9]).unwrap(), vec![2.0; 9]);
    }
}
