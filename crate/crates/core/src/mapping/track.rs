use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Surface;
use crate::math::{self, Vec2};
use crate::mesh::{Face, Vertex};

/// Barycentric coordinates tolerated below zero before a point counts as
/// outside a triangle.
pub const OUTSIDE_TOL: f64 = 1e-9;

/// A face as seen by one operation: `corners[k]` is the index of the layout
/// point at the tail of the face's `k`-th halfedge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFace {
    pub face: Face,
    pub corners: [u8; 3],
}

impl LocalFace {
    pub const NULL: LocalFace = LocalFace { face: Face(u32::MAX), corners: [0; 3] };
}

/// One atomic edit of the triangulation, with everything needed to move
/// points across it. Operations are self-contained so they can be replayed
/// without the surface.
#[derive(Clone, Debug, PartialEq)]
pub enum TrackOp {
    /// A planar region covered by `old` faces is covered by `new` faces
    /// instead (edge flips and vertex excisions).
    Retriangulate {
        points: [Vec2; 5],
        old: [LocalFace; 4],
        n_old: u8,
        new: [LocalFace; 2],
        n_new: u8,
    },
    /// Projective update after a conformal scaling: coordinate `corner` of
    /// every point in `face` is multiplied by `factor`, then renormalized.
    Scale { factor: f64, corners: Vec<(Face, u8)> },
}

/// A point on the surface: a face and barycentric coordinates ordered by the
/// face's halfedge cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedPoint {
    pub face: Face,
    pub bary: [f64; 3],
}

/// The atomic operations performed by one committed step of coarsening.
/// `vertex` is `None` for the initial Delaunay flips.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RemovalRecord {
    pub vertex: Option<Vertex>,
    pub ops: Vec<TrackOp>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrackingStats {
    /// Points that fell outside every candidate face and were snapped.
    pub snapped: usize,
    /// Points with slightly negative coordinates that were clamped.
    pub clamped: usize,
    /// Most negative coordinate seen before clamping.
    pub worst_negative: f64,
}

/// Points registered on a surface and carried through its operations.
#[derive(Clone, Debug)]
pub struct Tracker {
    points: Vec<TrackedPoint>,
    by_face: Vec<Vec<u32>>,
    stats: TrackingStats,
    scratch: Vec<u32>,
}

impl Tracker {
    pub fn new(face_capacity: usize) -> Self {
        Tracker { points: Vec::new(), by_face: vec![Vec::new(); face_capacity], stats: TrackingStats::default(), scratch: Vec::new() }
    }

    /// One point per vertex (in vertex order), sitting at a corner of the
    /// face of its reference halfedge.
    pub fn for_vertices(surface: &Surface) -> Self {
        let m = surface.mesh();
        let mut t = Tracker::new(m.face_capacity());
        for v in 0..m.vertex_capacity() as u32 {
            let v = Vertex(v);
            if !m.vertex_alive(v) {
                continue;
            }
            t.insert(vertex_point(surface, v));
        }
        t
    }

    pub fn insert(&mut self, p: TrackedPoint) -> usize {
        let id = self.points.len();
        self.by_face[p.face.idx()].push(id as u32);
        self.points.push(p);
        id
    }

    pub fn points(&self) -> &[TrackedPoint] {
        &self.points
    }

    pub fn point(&self, id: usize) -> TrackedPoint {
        self.points[id]
    }

    pub fn stats(&self) -> TrackingStats {
        self.stats
    }

    /// Ids of the points currently in `f`.
    pub fn points_in(&self, f: Face) -> &[u32] {
        &self.by_face[f.idx()]
    }

    pub fn replay(&mut self, records: &[RemovalRecord]) {
        for r in records {
            for op in &r.ops {
                self.apply(op);
            }
        }
    }

    pub fn apply(&mut self, op: &TrackOp) {
        match op {
            TrackOp::Scale { factor, corners } => {
                for &(f, c) in corners {
                    for &id in &self.by_face[f.idx()] {
                        let b = &mut self.points[id as usize].bary;
                        b[c as usize] *= factor;
                        let s = b[0] + b[1] + b[2];
                        *b = [b[0] / s, b[1] / s, b[2] / s];
                    }
                }
            }
            TrackOp::Retriangulate { points, old, n_old, new, n_new } => {
                let old = &old[..*n_old as usize];
                let new = &new[..*n_new as usize];
                let mut moving = core::mem::take(&mut self.scratch);
                moving.clear();
                for lf in old {
                    moving.append(&mut self.by_face[lf.face.idx()]);
                }
                for &id in &moving {
                    let p = self.points[id as usize];
                    let lf = old.iter().find(|lf| lf.face == p.face).expect("point not in an old face");
                    let pos = position(points, lf, p.bary);
                    let q = self.locate(points, new, pos);
                    self.points[id as usize] = q;
                    self.by_face[q.face.idx()].push(id);
                }
                self.scratch = moving;
            }
        }
    }

    fn locate(&mut self, points: &[Vec2; 5], faces: &[LocalFace], pos: Vec2) -> TrackedPoint {
        let mut best: Option<(f64, LocalFace, [f64; 3])> = None;
        for lf in faces {
            let tri = lf.corners.map(|c| points[c as usize]);
            let d = [
                math::orient(pos, tri[1], tri[2]),
                math::orient(pos, tri[2], tri[0]),
                math::orient(pos, tri[0], tri[1]),
            ];
            let s = d[0] + d[1] + d[2];
            let tol = -OUTSIDE_TOL * s;
            if d[0] >= tol && d[1] >= tol && d[2] >= tol {
                return TrackedPoint { face: lf.face, bary: self.clamp(d, s) };
            }
            let worst = d[0].min(d[1]).min(d[2]) / s;
            if best.is_none_or(|(w, ..)| worst > w) {
                best = Some((worst, *lf, d));
            }
        }
        let (_, lf, d) = best.expect("no candidate face");
        self.stats.snapped += 1;
        let s = d[0] + d[1] + d[2];
        TrackedPoint { face: lf.face, bary: self.clamp(d, s) }
    }

    fn clamp(&mut self, d: [f64; 3], s: f64) -> [f64; 3] {
        let b = [d[0] / s, d[1] / s, d[2] / s];
        let low = b[0].min(b[1]).min(b[2]);
        if low < 0.0 {
            self.stats.clamped += 1;
            self.stats.worst_negative = self.stats.worst_negative.min(low);
            math::clamp_barycentric(b)
        } else {
            b
        }
    }
}

fn position(points: &[Vec2; 5], lf: &LocalFace, b: [f64; 3]) -> Vec2 {
    let p = lf.corners.map(|c| points[c as usize]);
    Vec2::new(
        b[0] * p[0].x + b[1] * p[1].x + b[2] * p[2].x,
        b[0] * p[0].y + b[1] * p[1].y + b[2] * p[2].y,
    )
}

/// The point at vertex `v`, expressed in the face of its reference halfedge.
pub fn vertex_point(surface: &Surface, v: Vertex) -> TrackedPoint {
    let m = surface.mesh();
    let h = m.halfedge(v);
    let f = m.face(h).expect("reference halfedge is interior");
    let k = m.face_halfedges(f).iter().position(|&g| g == h).unwrap();
    let mut bary = [0.0; 3];
    bary[k] = 1.0;
    TrackedPoint { face: f, bary }
}
