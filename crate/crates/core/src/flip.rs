//! Intrinsic edge flips and flipping to an intrinsic Delaunay triangulation.

use alloc::collections::VecDeque;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::mapping::{LocalFace, TrackOp};
use crate::math::{self, Vec2};
use crate::mesh::Halfedge;

/// Opposite angles may exceed `π` by this much before an edge is flipped.
pub const DELAUNAY_TOL: f64 = 1e-10;

impl Surface {
    /// An interior edge is flippable when both endpoints keep a corner and
    /// its two triangles form a strictly convex quadrilateral.
    pub fn is_flippable(&self, h: Halfedge) -> bool {
        self.flip_margin(h).is_some_and(|x| x > 0.0)
    }

    /// `π` minus the larger of the two quad angles at the endpoints of
    /// `h`, or `None` for edges that can never be flipped.
    pub(crate) fn flip_margin(&self, h: Halfedge) -> Option<f64> {
        let m = &self.mesh;
        let t = m.twin(h);
        if m.is_ghost(h) || m.is_ghost(t) {
            return None;
        }
        if m.face(h) == m.face(t) {
            return None;
        }
        let (i, j) = (m.tail(h), m.tail(t));
        if m.degree(i) < 2 || m.degree(j) < 2 {
            return None;
        }
        let at_i = self.corner_angle(h) + self.corner_angle(m.next(t));
        let at_j = self.corner_angle(m.next(h)) + self.corner_angle(t);
        Some(PI - at_i.max(at_j))
    }

    /// Flips the edge of `h`. Afterwards `h` runs between the two former
    /// opposite vertices and is returned.
    pub fn flip_edge(&mut self, h: Halfedge) -> Result<Halfedge> {
        if !self.is_flippable(h) {
            return Err(Error::Unflippable(h));
        }
        let [pi, pj, pk, pl] = self.layout_diamond(h)?;
        let len = (pk - pl).norm();
        let m = &self.mesh;
        let t = m.twin(h);
        let (h1, h2) = (m.next(h), m.prev(h));
        let (t1, t2) = (m.next(t), m.prev(t));
        let (f0, f1) = (m.face(h).unwrap(), m.face(t).unwrap());
        let (i, j) = (m.tail(h), m.tail(t));
        let (k, l) = (m.tail(h2), m.tail(t2));

        if self.tracking() {
            let index = |g: Halfedge| -> u8 {
                if g == h || g == t1 {
                    0
                } else if g == t || g == h1 {
                    1
                } else if g == h2 {
                    2
                } else {
                    3
                }
            };
            let old0 = LocalFace { face: f0, corners: m.face_halfedges(f0).map(index) };
            let old1 = LocalFace { face: f1, corners: m.face_halfedges(f1).map(index) };
            self.emit(TrackOp::Retriangulate {
                points: [pi, pj, pk, pl, Vec2::ZERO],
                old: [old0, old1, LocalFace::NULL, LocalFace::NULL],
                n_old: 2,
                new: [LocalFace { face: f0, corners: [3, 2, 0] }, LocalFace { face: f1, corners: [2, 3, 1] }],
                n_new: 2,
            });
        }

        self.set_next(h2, t1);
        self.set_next(t1, h);
        self.set_next(h, h2);
        self.set_next(t2, h1);
        self.set_next(h1, t);
        self.set_next(t, t2);
        self.set_face(t1, Some(f0));
        self.set_face(h1, Some(f1));
        self.set_tail(h, l);
        self.set_tail(t, k);
        self.set_face_halfedge(f0, h);
        self.set_face_halfedge(f1, t);
        if self.mesh.halfedge(i) == h {
            self.repair_vertex_reference(i, t1);
        }
        if self.mesh.halfedge(j) == t {
            self.repair_vertex_reference(j, h1);
        }
        self.set_length(h, len);
        self.refresh_face(f0);
        self.refresh_face(f1);
        self.refresh_vertex(i);
        if j != i {
            self.refresh_vertex(j);
        }
        if k != i && k != j {
            self.refresh_vertex(k);
        }
        if l != i && l != j && l != k {
            self.refresh_vertex(l);
        }
        Ok(h)
    }

    /// Flips non-Delaunay edges until none remain, starting from `seeds`
    /// and re-queueing the sides of every flipped quadrilateral. Returns the
    /// number of flips.
    pub fn flip_to_delaunay(&mut self, seeds: impl IntoIterator<Item = Halfedge>) -> usize {
        let cap = self.mesh.halfedge_capacity();
        let mut queued = core::mem::take(&mut self.queued);
        queued.resize(cap, false);
        let mut queue = VecDeque::new();
        let key = |s: &Surface, h: Halfedge| h.0.min(s.mesh.twin(h).0);
        for h in seeds {
            if !self.mesh.halfedge_alive(h) {
                continue;
            }
            let e = key(self, h);
            if !queued[e as usize] {
                queued[e as usize] = true;
                queue.push_back(Halfedge(e));
            }
        }
        let mut flips = 0;
        let limit = 64 * (self.mesh.num_edges() + 16) + 64 * queue.len();
        while let Some(h) = queue.pop_front() {
            queued[h.idx()] = false;
            if !self.mesh.halfedge_alive(h) || flips >= limit {
                continue;
            }
            let Some(sum) = self.opposite_angle_sum(h) else { continue };
            if sum <= PI + DELAUNAY_TOL || !self.is_flippable(h) {
                continue;
            }
            if self.flip_edge(h).is_err() {
                continue;
            }
            flips += 1;
            let m = &self.mesh;
            let t = m.twin(h);
            for g in [m.next(h), m.prev(h), m.next(t), m.prev(t)] {
                let e = key(self, g);
                if !queued[e as usize] {
                    queued[e as usize] = true;
                    queue.push_back(Halfedge(e));
                }
            }
        }
        self.queued = queued;
        flips
    }

    /// Flips every interior edge to Delaunay.
    pub fn make_delaunay(&mut self) -> usize {
        let seeds: alloc::vec::Vec<Halfedge> = self.mesh.interior_edges().collect();
        self.flip_to_delaunay(seeds)
    }
}

/// Length of the diagonal `kl` from the five lengths of a diamond with
/// shared edge `ij`: `(ℓ_ij, ℓ_jk, ℓ_ki, ℓ_il, ℓ_lj)`.
pub fn flipped_length(ij: f64, jk: f64, ki: f64, il: f64, lj: f64) -> f64 {
    let pi = math::Vec2::ZERO;
    let pj = math::Vec2::new(ij, 0.0);
    let pk = math::place_apex(pi, pj, ki, jk);
    let pl = math::place_apex(pj, pi, lj, il);
    (pk - pl).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Face, Vertex};
    use crate::shapes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use alloc::vec::Vec;

    fn square() -> Surface {
        let p = [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        Surface::from_positions(&p, &[[0, 1, 2], [1, 0, 3]]).unwrap()
    }

    #[test]
    fn square_diagonal_flip() {
        let mut s = square();
        assert!(s.is_flippable(Halfedge(0)));
        let h = s.flip_edge(Halfedge(0)).unwrap();
        assert!((s.length(h) - 2f64.sqrt()).abs() < 1e-12);
        let ends = [s.mesh().tail(h), s.mesh().tip(h)];
        assert!(ends.contains(&Vertex(2)) && ends.contains(&Vertex(3)));
        s.audit().unwrap();
    }

    #[test]
    fn equilateral_pair_flip() {
        let p = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.75f64.sqrt(), 0.0], [0.5, -0.75f64.sqrt(), 0.0]];
        let mut s = Surface::from_positions(&p, &[[0, 1, 2], [1, 0, 3]]).unwrap();
        let h = s.flip_edge(Halfedge(0)).unwrap();
        assert!((s.length(h) - 3f64.sqrt()).abs() < 1e-12);
        assert!((flipped_length(1.0, 1.0, 1.0, 1.0, 1.0) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn double_flip_restores() {
        let (p, f) = shapes::icosphere(2);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let h = s.mesh().interior_edges().nth(7).unwrap();
        let l0 = s.length(h);
        let sums: Vec<f64> = s.mesh().vertices().map(|v| s.angle_sum(v)).collect();
        s.flip_edge(h).unwrap();
        s.flip_edge(h).unwrap();
        assert!((s.length(h) - l0).abs() < 1e-10);
        for (v, want) in s.mesh().vertices().zip(sums) {
            assert!((s.angle_sum(v) - want).abs() < 1e-9);
        }
        assert_eq!(s.delaunay_violations(DELAUNAY_TOL), 0);
        s.audit().unwrap();
    }

    #[test]
    fn reflex_quad_is_not_flippable() {
        let p = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [-1.0, 0.5, 0.0], [1.0, -1.0, 0.0]];
        let s = Surface::from_positions(&p, &[[0, 1, 2], [1, 0, 3]]).unwrap();
        let m = s.mesh();
        let at_i = s.corner_angle(Halfedge(0)) + s.corner_angle(m.next(m.twin(Halfedge(0))));
        assert!(at_i > PI);
        let [pi, _, pk, pl] = s.layout_diamond(Halfedge(0)).unwrap();
        // i lies on the far side of the would-be diagonal kl
        assert!(math::orient(pk, pl, pi) * math::orient(pk, pl, math::Vec2::new(2.0, 0.0)) > 0.0);
        assert!(!s.is_flippable(Halfedge(0)));
        assert!(matches!(s.clone().flip_edge(Halfedge(0)), Err(Error::Unflippable(_))));
    }

    #[test]
    fn degree_one_vertex_blocks_flip() {
        let (p, f) = shapes::bipyramid(3, 3.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let v = Vertex(0);
        while s.mesh().degree(v) > 1 {
            let h = s.mesh().outgoing(v).find(|&h| s.is_flippable(h)).unwrap();
            s.flip_edge(h).unwrap();
            s.audit().unwrap();
        }
        let h = s.mesh().halfedge(v);
        assert!(!s.is_flippable(h));
        assert!(!s.is_flippable(s.mesh().twin(h)));
        assert!(s.gauss_bonnet_defect().abs() < 1e-9);
    }

    #[test]
    fn delaunay_already() {
        let (p, f) = shapes::grid(5, 5, 1.0, 1.0);
        let mut s = Surface::from_positions(&p, &f).unwrap();
        assert_eq!(s.make_delaunay(), 0);
    }

    #[test]
    fn stretched_square_one_flip() {
        // long diagonal 0-1 with opposite angles summing above π
        let p = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 0.3, 0.0], [1.0, -0.3, 0.0]];
        let mut s = Surface::from_positions(&p, &[[0, 1, 2], [1, 0, 3]]).unwrap();
        assert!(s.opposite_angle_sum(Halfedge(0)).unwrap() > PI);
        assert_eq!(s.make_delaunay(), 1);
        assert_eq!(s.delaunay_violations(DELAUNAY_TOL), 0);
        let _ = Face(0);
    }

    #[test]
    fn random_mesh_delaunay_audit() {
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed + 100);
            let (p, f) = shapes::jittered_grid(8, 8, || rng.gen_range(-0.45..0.45), || r2.gen_bool(0.5));
            let mut s = Surface::from_positions(&p, &f).unwrap();
            let area = s.total_area();
            s.make_delaunay();
            assert_eq!(s.delaunay_violations(DELAUNAY_TOL), 0);
            for h in s.mesh().interior_edges() {
                assert!(s.cotan_weight(h) >= -1e-10);
            }
            assert!((s.total_area() - area).abs() < 1e-9 * area);
            s.audit().unwrap();
        }
    }
}
