//! Removal of a single vertex: flatten, flip down to degree three (two on
//! the boundary), excise, and flip back to Delaunay.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flatten::FlattenOutcome;
use crate::geometry::Surface;
use crate::mapping::{LocalFace, TrackOp};
use crate::math::{self, Vec2, TAU};
use crate::mesh::{Face, Halfedge, Vertex};
use crate::metric::{transfer_weights, NeighborTransfer, TransferPlan};

/// Angle-sum deviation tolerated when excising a vertex.
pub const EXCISE_TOL: f64 = 1e-8;

/// Degree-reducing flips must keep both quad angles this far below π.
/// Below it, a degree-four star with two collinear spokes is excised by
/// merging the spokes instead.
pub const COLLINEAR_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalOutcome {
    pub flatten: FlattenOutcome,
    pub plan: TransferPlan,
    /// Flips made while reducing the degree.
    pub degree_flips: usize,
    pub delaunay_flips: usize,
}

impl Surface {
    /// `false` for dead vertices and for vertices on a face that repeats a
    /// vertex (which includes every vertex on a boundary self-edge).
    pub fn is_removable(&self, v: Vertex) -> bool {
        let m = &self.mesh;
        if !m.vertex_alive(v) {
            return false;
        }
        m.outgoing(v).filter(|&h| !m.is_ghost(h)).all(|h| {
            let [a, b, c] = m.face_vertices(m.face(h).unwrap());
            a != b && b != c && c != a
        })
    }

    /// Flips edges at `v` until it has degree three (two on the boundary).
    /// Self-edges go first, then the edge with the largest opposite angle
    /// sum. Returns the number of flips.
    pub fn reduce_degree(&mut self, v: Vertex) -> Result<usize> {
        let boundary = self.mesh.is_boundary_vertex(v);
        let target = if boundary { 2 } else { 3 };
        let mut flips = 0;
        let limit = 4 * self.mesh.degree(v) + 8;
        loop {
            let deg = self.mesh.degree(v);
            let wrong = Error::WrongDegree { vertex: v, degree: deg, expected: target };
            if deg <= target {
                return if deg == target { Ok(flips) } else { Err(wrong) };
            }
            if flips >= limit {
                return Err(wrong);
            }
            let h = match self.pick_reduction_flip(v, COLLINEAR_TOL) {
                Some(h) => h,
                None if !boundary && deg == 4 && self.collinear_spoke(v).is_some() => return Ok(flips),
                None => self.pick_reduction_flip(v, 0.0).ok_or(wrong)?,
            };
            self.flip_edge(h)?;
            flips += 1;
        }
    }

    /// Self-edges first, then the edge with the largest opposite angle sum,
    /// among edges whose flip margin exceeds `margin`.
    fn pick_reduction_flip(&self, v: Vertex, margin: f64) -> Option<Halfedge> {
        let m = &self.mesh;
        let mut best: Option<(f64, Halfedge)> = None;
        for h in m.outgoing(v) {
            if !self.flip_margin(h).is_some_and(|x| x > margin) {
                continue;
            }
            if m.tip(h) == v {
                return Some(h);
            }
            let s = self.opposite_angle_sum(h).unwrap();
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, h));
            }
        }
        best.map(|b| b.1)
    }

    /// For a degree-four interior vertex, an outgoing halfedge `h` such that
    /// `h` and the spoke two steps counter-clockwise are collinear.
    fn collinear_spoke(&self, v: Vertex) -> Option<Halfedge> {
        let m = &self.mesh;
        let hs: Vec<Halfedge> = m.outgoing(v).collect();
        if hs.len() != 4 || hs.iter().any(|&h| m.is_ghost(h)) {
            return None;
        }
        let mut best: Option<(f64, Halfedge)> = None;
        for k in 0..2 {
            let d = (self.corner_angle(hs[k]) + self.corner_angle(hs[k + 1]) - PI).abs();
            if d <= COLLINEAR_TOL && best.is_none_or(|(b, _)| d < b) {
                best = Some((d, hs[k]));
            }
        }
        best.map(|b| b.1)
    }

    /// Replaces the faces around a flat vertex of degree three (two on the
    /// boundary) by a single triangle, which is returned.
    pub fn excise_flat_vertex(&mut self, v: Vertex) -> Result<Face> {
        let m = &self.mesh;
        if !m.vertex_alive(v) {
            return Err(Error::DeadVertex(v));
        }
        let boundary = m.is_boundary_vertex(v);
        let (target, flat) = if boundary { (2, PI) } else { (3, TAU) };
        let deg = m.degree(v);
        let collinear = if !boundary && deg == 4 { self.collinear_spoke(v) } else { None };
        if deg != target && collinear.is_none() {
            return Err(Error::WrongDegree { vertex: v, degree: deg, expected: target });
        }
        if (self.angle_sum(v) - flat).abs() > EXCISE_TOL {
            return Err(Error::NotFlat(v));
        }
        if !self.is_removable(v) {
            return Err(Error::Blocked(v));
        }
        match collinear {
            Some(h) => self.excise_collinear(v, h),
            None if boundary => self.excise_boundary(v),
            None => self.excise_interior(v),
        }
    }

    fn excise_interior(&mut self, v: Vertex) -> Result<Face> {
        let m = &self.mesh;
        let o0 = m.halfedge(v);
        let o1 = m.twin(m.prev(o0));
        let o2 = m.twin(m.prev(o1));
        let (r0, r1, r2) = (m.next(o0), m.next(o1), m.next(o2));
        let (a, b, c) = (m.tip(o0), m.tip(o1), m.tip(o2));
        if a == b || b == c || c == a {
            return Err(Error::Blocked(v));
        }
        let (f0, f1, f2) = (m.face(o0).unwrap(), m.face(o1).unwrap(), m.face(o2).unwrap());

        if self.tracking() {
            let (lab, lbc, lca) = (self.length(r0), self.length(r1), self.length(r2));
            let pa = Vec2::ZERO;
            let pb = Vec2::new(lab, 0.0);
            let pc = math::place_apex(pa, pb, lca, lbc);
            let pv = math::place_apex(pa, pb, self.length(o0), self.length(o1));
            let index = |w: Vertex| -> u8 {
                if w == a {
                    0
                } else if w == b {
                    1
                } else if w == c {
                    2
                } else {
                    3
                }
            };
            let local = |f: Face| LocalFace { face: f, corners: m.face_vertices(f).map(index) };
            let old = [local(f0), local(f1), local(f2), LocalFace::NULL];
            self.emit(TrackOp::Retriangulate {
                points: [pa, pb, pc, pv, Vec2::ZERO],
                old,
                n_old: 3,
                new: [LocalFace { face: f0, corners: [0, 1, 2] }, LocalFace::NULL],
                n_new: 1,
            });
        }

        let m = &self.mesh;
        let spokes = [o0, o1, o2, m.twin(o0), m.twin(o1), m.twin(o2)];
        self.set_next(r0, r1);
        self.set_next(r1, r2);
        self.set_next(r2, r0);
        self.set_face(r1, Some(f0));
        self.set_face(r2, Some(f0));
        self.set_face_halfedge(f0, r0);
        for h in spokes {
            self.kill_halfedge(h);
        }
        self.kill_face(f1);
        self.kill_face(f2);
        self.kill_vertex(v);
        self.repair_vertex_reference(a, r0);
        self.repair_vertex_reference(b, r1);
        self.repair_vertex_reference(c, r2);
        self.refresh_face(f0);
        for w in [a, b, c] {
            self.refresh_vertex(w);
        }
        Ok(f0)
    }

    /// Degree four with spokes `o0` and `o2` collinear: the two spokes
    /// become one edge and the four faces become two.
    fn excise_collinear(&mut self, v: Vertex, o0: Halfedge) -> Result<Face> {
        let m = &self.mesh;
        let o1 = m.twin(m.prev(o0));
        let o2 = m.twin(m.prev(o1));
        let o3 = m.twin(m.prev(o2));
        let o = [o0, o1, o2, o3];
        let k = o.map(|h| m.tip(h));
        for a in 0..4 {
            if k[a] == v || k[a + 1..].contains(&k[a]) {
                return Err(Error::Blocked(v));
            }
        }
        let r = o.map(|h| m.next(h));
        let f = o.map(|h| m.face(h).unwrap());
        let t0 = m.twin(o0);
        let len = self.length(o0) + self.length(o2);

        if self.tracking() {
            let w0 = self.corner_angle(o0);
            let w2 = self.corner_angle(o2);
            let pv = Vec2::ZERO;
            let pk = [
                Vec2::new(self.length(o0), 0.0),
                Vec2::from_polar(self.length(o1), w0),
                Vec2::new(-self.length(o2), 0.0),
                Vec2::from_polar(self.length(o3), PI + w2),
            ];
            let index = |w: Vertex| -> u8 {
                if w == v {
                    0
                } else {
                    1 + k.iter().position(|&x| x == w).unwrap() as u8
                }
            };
            let local = |g: Face| LocalFace { face: g, corners: m.face_vertices(g).map(index) };
            self.emit(TrackOp::Retriangulate {
                points: [pv, pk[0], pk[1], pk[2], pk[3]],
                old: f.map(local),
                n_old: 4,
                new: [LocalFace { face: f[0], corners: [1, 2, 3] }, LocalFace { face: f[2], corners: [3, 4, 1] }],
                n_new: 2,
            });
        }

        let m = &self.mesh;
        let dead = [o1, m.twin(o1), o2, m.twin(o2), o3, m.twin(o3)];
        self.set_tail(o0, k[2]);
        self.set_next(r[0], r[1]);
        self.set_next(r[1], o0);
        self.set_next(o0, r[0]);
        self.set_face(r[1], Some(f[0]));
        self.set_face_halfedge(f[0], r[0]);
        self.set_next(r[2], r[3]);
        self.set_next(r[3], t0);
        self.set_next(t0, r[2]);
        self.set_face(r[3], Some(f[2]));
        self.set_face(t0, Some(f[2]));
        self.set_face_halfedge(f[2], r[2]);
        for h in dead {
            self.kill_halfedge(h);
        }
        self.kill_face(f[1]);
        self.kill_face(f[3]);
        self.kill_vertex(v);
        self.set_length(o0, len);
        for a in 0..4 {
            self.repair_vertex_reference(k[a], r[a]);
        }
        self.refresh_face(f[0]);
        self.refresh_face(f[2]);
        for w in k {
            self.refresh_vertex(w);
        }
        Ok(f[0])
    }

    fn excise_boundary(&mut self, v: Vertex) -> Result<Face> {
        let m = &self.mesh;
        let o0 = m.halfedge(v);
        let o1 = m.twin(m.prev(o0));
        let g = m.twin(m.prev(o1));
        debug_assert!(m.is_ghost(g) && m.is_ghost(m.twin(o0)));
        let gy = m.twin(o0);
        let (r0, r1, q) = (m.next(o0), m.next(o1), m.prev(o1));
        let (y, a, x) = (m.tip(o0), m.tip(o1), m.tail(q));
        if y == a || a == x || x == y {
            return Err(Error::Blocked(v));
        }
        let (f0, f1) = (m.face(o0).unwrap(), m.face(o1).unwrap());
        let (lyv, lvx) = (self.length(o0), self.length(q));

        if self.tracking() {
            let len = lyv + lvx;
            let py = Vec2::ZERO;
            let px = Vec2::new(len, 0.0);
            let pa = math::place_apex(px, py, self.length(r1), self.length(r0));
            let pv = Vec2::new(lyv, 0.0);
            let index = |w: Vertex| -> u8 {
                if w == v {
                    0
                } else if w == y {
                    1
                } else if w == a {
                    2
                } else {
                    3
                }
            };
            let local = |f: Face| LocalFace { face: f, corners: m.face_vertices(f).map(index) };
            let old = [local(f0), local(f1), LocalFace::NULL, LocalFace::NULL];
            self.emit(TrackOp::Retriangulate {
                points: [pv, py, pa, px, Vec2::ZERO],
                old,
                n_old: 2,
                new: [LocalFace { face: f0, corners: [1, 2, 3] }, LocalFace::NULL],
                n_new: 1,
            });
        }

        let m = &self.mesh;
        let into_y = m.twin(m.halfedge(y));
        let dead = [o0, gy, o1, m.twin(o1)];
        self.set_next(r0, r1);
        self.set_next(r1, q);
        self.set_next(q, r0);
        self.set_face(r1, Some(f0));
        self.set_face(q, Some(f0));
        self.set_face_halfedge(f0, r0);
        self.set_tail(g, y);
        self.set_next(into_y, g);
        for h in dead {
            self.kill_halfedge(h);
        }
        self.kill_face(f1);
        self.kill_vertex(v);
        self.set_length(q, lyv + lvx);
        self.repair_vertex_reference(a, r1);
        self.repair_vertex_reference(x, q);
        self.repair_vertex_reference(y, r0);
        self.refresh_face(f0);
        for w in [y, a, x] {
            self.refresh_vertex(w);
        }
        Ok(f0)
    }

    /// For each distinct neighbour of `v`: its transfer weight, the
    /// transport rotation and edge vector along the shortest connecting
    /// edge.
    pub fn transfer_plan(&self, v: Vertex, outcome: &FlattenOutcome) -> TransferPlan {
        let m = &self.mesh;
        let weights = transfer_weights(&outcome.deltas);
        let mut neighbors = Vec::with_capacity(weights.len());
        for (w, alpha) in weights {
            let mut best: Option<Halfedge> = None;
            for h in m.outgoing(v) {
                if m.tip(h) == w && best.is_none_or(|b| self.length(h) < self.length(b)) {
                    best = Some(h);
                }
            }
            let h = best.expect("neighbour without an edge");
            neighbors.push(NeighborTransfer {
                vertex: w,
                alpha,
                rot: self.transport_rotation(h),
                edge: self.edge_vector(m.twin(h)).0,
                len: self.length(h),
            });
        }
        TransferPlan { neighbors }
    }

    fn prepare(&mut self, v: Vertex) -> Result<(FlattenOutcome, TransferPlan, usize)> {
        if !self.is_removable(v) {
            return Err(Error::Blocked(v));
        }
        let mut flips = 0;
        if self.mesh.is_boundary_vertex(v) && self.mesh.degree(v) == 1 {
            let ring = self.mesh.next(self.mesh.halfedge(v));
            self.flip_edge(ring).map_err(|_| Error::Blocked(v))?;
            flips += 1;
        }
        let out = self.flatten_vertex(v)?;
        let plan = self.transfer_plan(v, &out);
        flips += self.reduce_degree(v)?;
        if !self.is_removable(v) {
            return Err(Error::Blocked(v));
        }
        let m = &self.mesh;
        let tips: Vec<Vertex> = m.outgoing(v).map(|h| m.tip(h)).collect();
        for (k, a) in tips.iter().enumerate() {
            if *a == v || tips[k + 1..].contains(a) {
                return Err(Error::Blocked(v));
            }
        }
        Ok((out, plan, flips))
    }

    /// Runs every stage of a removal up to (not including) the excision,
    /// then restores the surface exactly.
    pub fn evaluate_removal(&mut self, v: Vertex) -> Result<(FlattenOutcome, TransferPlan)> {
        let cp = self.checkpoint();
        let r = self.prepare(v);
        self.rollback(cp);
        r.map(|(o, p, _)| (o, p))
    }

    /// Removes `v`. On failure the surface is left exactly as it was.
    pub fn remove_vertex(&mut self, v: Vertex) -> Result<RemovalOutcome> {
        let cp = self.checkpoint();
        match self.remove_inner(v) {
            Ok(r) => {
                self.commit(cp);
                Ok(r)
            }
            Err(e) => {
                self.rollback(cp);
                Err(e)
            }
        }
    }

    fn remove_inner(&mut self, v: Vertex) -> Result<RemovalOutcome> {
        let (flatten, plan, degree_flips) = self.prepare(v)?;
        self.excise_flat_vertex(v)?;
        let mut seeds = Vec::new();
        for n in &plan.neighbors {
            seeds.extend(self.mesh.outgoing(n.vertex));
        }
        let delaunay_flips = self.flip_to_delaunay(seeds);
        Ok(RemovalOutcome { flatten, plan, degree_flips, delaunay_flips })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::DELAUNAY_TOL;
    use crate::shapes;

    #[test]
    fn degree_three_needs_no_flips() {
        let s3 = 3f64.sqrt();
        let p = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [-0.5, s3 / 2.0, 0.0], [-0.5, -s3 / 2.0, 0.0]];
        let mut s = Surface::from_positions(&p, &[[0, 1, 2], [0, 2, 3], [0, 3, 1]]).unwrap();
        assert_eq!(s.reduce_degree(Vertex(0)).unwrap(), 0);
        s.set_tracking(true);
        let f = s.excise_flat_vertex(Vertex(0)).unwrap();
        let l = s.face_lengths(f);
        for x in l {
            assert!((x - s3).abs() < 1e-12);
        }
        assert_eq!(s.mesh().num_vertices(), 3);
        assert_eq!(s.mesh().num_faces(), 1);
        s.audit().unwrap();
    }

    #[test]
    fn grid_vertex_collinear_star() {
        // two flips leave a cross of collinear spokes, excised directly
        let (p, f) = shapes::grid(5, 5, 1.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let v = Vertex(12);
        assert_eq!(s.mesh().degree(v), 6);
        assert_eq!(s.reduce_degree(v).unwrap(), 2);
        assert_eq!(s.mesh().degree(v), 4);
        let (nf, ne) = (s.mesh().num_faces(), s.mesh().num_edges());
        s.set_tracking(true);
        s.excise_flat_vertex(v).unwrap();
        assert_eq!(s.mesh().num_faces(), nf - 2);
        assert_eq!(s.mesh().num_edges(), ne - 3);
        assert!(s.gauss_bonnet_defect().abs() < 1e-12);
        assert!(s.mesh().edges().any(|h| [0.5, 2f64.sqrt() / 2.0].iter().any(|l| (s.length(h) - l).abs() < 1e-15)));
        s.audit().unwrap();
    }

    #[test]
    fn straight_boundary_midpoint() {
        let (p, f) = shapes::grid(3, 2, 2.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let v = Vertex(1);
        let (v0, e, fc) = (s.mesh().num_vertices(), s.mesh().num_edges(), s.mesh().num_faces());
        s.reduce_degree(v).unwrap();
        s.excise_flat_vertex(v).unwrap();
        assert_eq!(s.mesh().num_vertices(), v0 - 1);
        assert_eq!(s.mesh().num_edges(), e - 2);
        assert_eq!(s.mesh().num_faces(), fc - 1);
        let h = s.mesh().halfedges().find(|&h| {
            let m = s.mesh();
            !m.is_ghost(h) && m.tail(h) == Vertex(0) && m.tip(h) == Vertex(2)
                || !m.is_ghost(h) && m.tail(h) == Vertex(2) && m.tip(h) == Vertex(0)
        });
        assert!((s.length(h.unwrap()) - 2.0).abs() < 1e-15);
        s.audit().unwrap();
    }

    #[test]
    fn interior_counts_and_conservation() {
        let (p, f) = shapes::icosphere(3);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        s.make_delaunay();
        let (v0, e0, f0) = (s.mesh().num_vertices(), s.mesh().num_edges(), s.mesh().num_faces());
        let v = Vertex(40);
        let k = s.curvature(v);
        let nbrs = s.mesh().neighbors(v);
        let before: f64 = nbrs.iter().map(|&w| s.curvature(w)).sum();
        let out = s.remove_vertex(v).unwrap();
        assert_eq!(out.plan.neighbors.len(), nbrs.len());
        assert_eq!(s.mesh().num_vertices(), v0 - 1);
        assert_eq!(s.mesh().num_edges(), e0 - 3);
        assert_eq!(s.mesh().num_faces(), f0 - 2);
        let after: f64 = nbrs.iter().map(|&w| s.curvature(w)).sum();
        assert!((after - before - k).abs() < 1e-8);
        assert!(s.gauss_bonnet_defect().abs() < 1e-9);
        assert_eq!(s.delaunay_violations(DELAUNAY_TOL), 0);
        s.audit().unwrap();
    }

    #[test]
    fn pyramid_apex_removal_conserves_curvature() {
        let (p, f) = shapes::square_pyramid();
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let k = s.curvature(Vertex(0));
        let before: f64 = (1..5).map(|w| s.curvature(Vertex(w))).sum();
        s.remove_vertex(Vertex(0)).unwrap();
        let after: f64 = (1..5).map(|w| s.curvature(Vertex(w))).sum();
        assert!((after - before - k).abs() < 1e-8);
        s.audit().unwrap();
    }

    #[test]
    fn evaluation_leaves_state_bitwise() {
        let (p, f) = shapes::bumpy_sphere(4, 0.2, 5.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        s.make_delaunay();
        let geom = s.geometry().clone();
        let mesh = s.mesh().clone();
        for v in 0..40 {
            let _ = s.evaluate_removal(Vertex(v));
            assert_eq!(s.geometry(), &geom);
            assert_eq!(s.mesh(), &mesh);
        }
    }

    #[test]
    fn flat_grid_vertex_removal() {
        let (p, f) = shapes::grid(6, 6, 1.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let total = s.total_curvature();
        let out = s.remove_vertex(Vertex(14)).unwrap();
        for n in &out.plan.neighbors {
            assert_eq!(n.alpha, 1.0 / out.plan.neighbors.len() as f64);
        }
        assert!((s.total_curvature() - total).abs() < 1e-12);
        assert_eq!(s.delaunay_violations(DELAUNAY_TOL), 0);
        s.audit().unwrap();
    }

    #[test]
    fn ear_is_flipped_first() {
        // the corner of a grid split so that the corner has a single face
        let (p, f) = shapes::grid(3, 3, 1.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let ear = s.mesh().vertices().find(|&v| s.mesh().degree(v) == 1).unwrap();
        s.remove_vertex(ear).unwrap();
        assert!(s.gauss_bonnet_defect().abs() < 1e-9);
        s.audit().unwrap();
    }

    #[test]
    fn boundary_self_edge_is_blocked() {
        // a strip closed into a loop leaves boundary loops; shrink one to a
        // single vertex by removing the others
        let (p, f) = shapes::annulus(2, 3, 1.5, 2.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let mut removed = 0;
        for v in 0..3 {
            if s.remove_vertex(Vertex(v)).is_ok() {
                removed += 1;
            }
        }
        assert!(removed >= 1);
        s.audit().unwrap();
        assert!(s.gauss_bonnet_defect().abs() < 1e-9);
        for v in s.mesh().vertices() {
            if !s.is_removable(v) {
                assert!(matches!(s.clone().remove_vertex(v), Err(Error::Blocked(_))));
            }
        }
    }
}
