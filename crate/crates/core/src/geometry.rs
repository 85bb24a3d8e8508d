//! Intrinsic metric on a Δ-complex: edge lengths, cached corner angles,
//! angle sums and signpost directions, plus the journal that lets any local
//! edit be undone bit-for-bit.
//!
//! Tangent directions at interior vertices are normalized by `2π/Θ`. At
//! boundary vertices they are plain angles measured from the first boundary
//! edge, so a flat boundary vertex has a Euclidean frame.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mapping::TrackOp;
use crate::math::{self, Vec2, TAU};
use crate::mesh::{DeltaComplex, Face, Halfedge, Vertex, NONE};
use crate::tangent::TangentVec;

#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicGeometry {
    /// Per halfedge; both halves of an edge hold the same value.
    pub(crate) len: Vec<f64>,
    /// Angle at the tail of each interior halfedge, inside its face.
    pub(crate) corner: Vec<f64>,
    pub(crate) angle_sum: Vec<f64>,
    pub(crate) signpost: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
enum Edit {
    Next(u32, u32),
    Vert(u32, u32),
    FaceOf(u32, u32),
    HeAlive(u32, bool),
    VHe(u32, u32),
    VAlive(u32, bool),
    FHe(u32, u32),
    FAlive(u32, bool),
    Counts(usize, usize, usize),
    Len(u32, f64),
    Corner(u32, f64),
    AngleSum(u32, f64),
    Signpost(u32, f64),
}

/// Position in the journal and in the emitted operation log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    journal: usize,
    ops: usize,
}

/// A Δ-complex with an intrinsic metric.
#[derive(Clone, Debug)]
pub struct Surface {
    pub(crate) mesh: DeltaComplex,
    pub(crate) geom: IntrinsicGeometry,
    journal: Vec<Edit>,
    depth: u32,
    track: bool,
    pub(crate) ops: Vec<TrackOp>,
    pub(crate) queued: Vec<bool>,
}

impl Surface {
    /// Euclidean edge lengths from 3D positions. Positions are not kept.
    pub fn from_positions(positions: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<Self> {
        Self::from_edge_lengths(positions.len(), faces, |a, b| {
            let p = positions[a];
            let q = positions[b];
            let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
            math::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
        })
    }

    /// Builds a surface from any metric given per (unordered) vertex pair.
    pub fn from_edge_lengths(
        n_vertices: usize,
        faces: &[[usize; 3]],
        mut length: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mesh = DeltaComplex::from_triangles(n_vertices, faces)?;
        let n_he = mesh.halfedge_capacity();
        let mut len = vec![0.0; n_he];
        for h in mesh.halfedges() {
            if mesh.is_ghost(h) {
                continue;
            }
            let (a, b) = (mesh.tail(h).idx(), mesh.tip(h).idx());
            let l = length(a, b);
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::ZeroLengthEdge(a, b));
            }
            len[h.idx()] = l;
        }
        for h in mesh.halfedges() {
            let t = mesh.twin(h);
            if mesh.is_ghost(h) {
                len[h.idx()] = len[t.idx()];
            } else if !mesh.is_ghost(t) && len[h.idx()] != len[t.idx()] {
                // asymmetric user metric: keep the value of the lower index
                let l = if h.0 < t.0 { len[h.idx()] } else { len[t.idx()] };
                len[h.idx()] = l;
                len[t.idx()] = l;
            }
        }
        Self::from_parts(mesh, len)
    }

    pub(crate) fn from_parts(mesh: DeltaComplex, len: Vec<f64>) -> Result<Self> {
        let n_he = mesh.halfedge_capacity();
        let nv = mesh.vertex_capacity();
        let mut s = Surface {
            geom: IntrinsicGeometry {
                len,
                corner: vec![0.0; n_he],
                angle_sum: vec![0.0; nv],
                signpost: vec![0.0; n_he],
            },
            mesh,
            journal: Vec::new(),
            depth: 0,
            track: false,
            ops: Vec::new(),
            queued: Vec::new(),
        };
        let faces: Vec<Face> = s.mesh.faces().collect();
        for f in faces {
            let [a, b, c] = s.face_lengths(f);
            if !math::triangle_valid(a, b, c) {
                return Err(Error::TriangleInequality(f.idx()));
            }
            s.refresh_face(f);
        }
        let verts: Vec<Vertex> = s.mesh.vertices().collect();
        for v in verts {
            s.refresh_vertex(v);
        }
        Ok(s)
    }

    #[inline]
    pub fn mesh(&self) -> &DeltaComplex {
        &self.mesh
    }
    #[inline]
    pub fn geometry(&self) -> &IntrinsicGeometry {
        &self.geom
    }
    #[inline]
    pub fn length(&self, h: Halfedge) -> f64 {
        self.geom.len[h.idx()]
    }
    /// Angle at the tail of `h` inside its face.
    #[inline]
    pub fn corner_angle(&self, h: Halfedge) -> f64 {
        self.geom.corner[h.idx()]
    }
    #[inline]
    pub fn angle_sum(&self, v: Vertex) -> f64 {
        self.geom.angle_sum[v.idx()]
    }
    #[inline]
    pub fn signpost(&self, h: Halfedge) -> f64 {
        self.geom.signpost[h.idx()]
    }
    /// Ratio between normalized and actual angles at `v`.
    #[inline]
    pub fn angle_scale(&self, v: Vertex) -> f64 {
        if self.mesh.is_boundary_vertex(v) {
            1.0
        } else {
            TAU / self.geom.angle_sum[v.idx()]
        }
    }
    /// Target angle sum of a flat vertex: `2π` inside, `π` on the boundary.
    #[inline]
    pub fn flat_angle_sum(&self, v: Vertex) -> f64 {
        if self.mesh.is_boundary_vertex(v) {
            PI
        } else {
            TAU
        }
    }
    /// Angle defect `2π − Θ` inside, geodesic curvature `π − Θ` on the boundary.
    #[inline]
    pub fn curvature(&self, v: Vertex) -> f64 {
        self.flat_angle_sum(v) - self.geom.angle_sum[v.idx()]
    }

    pub fn face_lengths(&self, f: Face) -> [f64; 3] {
        self.mesh.face_halfedges(f).map(|h| self.length(h))
    }

    pub fn face_area(&self, f: Face) -> f64 {
        let [a, b, c] = self.face_lengths(f);
        math::triangle_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        self.mesh.faces().map(|f| self.face_area(f)).sum()
    }

    /// Interior angle defects and boundary geodesic curvatures, per vertex.
    /// Dead vertices report 0.
    pub fn curvatures(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.mesh.vertex_capacity();
        let mut k = vec![0.0; n];
        let mut kappa = vec![0.0; n];
        for v in self.mesh.vertices() {
            if self.mesh.is_boundary_vertex(v) {
                kappa[v.idx()] = self.curvature(v);
            } else {
                k[v.idx()] = self.curvature(v);
            }
        }
        (k, kappa)
    }

    pub fn total_curvature(&self) -> f64 {
        self.mesh.vertices().map(|v| self.curvature(v)).sum()
    }

    /// `Σ K + Σ κ − 2πχ`.
    pub fn gauss_bonnet_defect(&self) -> f64 {
        self.total_curvature() - TAU * self.mesh.euler_characteristic() as f64
    }

    /// Rotation taking tangent vectors at the tail of `h` to its tip.
    pub fn transport_rotation(&self, h: Halfedge) -> Complex64 {
        let t = self.mesh.twin(h);
        let a = (self.signpost(t) + PI) - self.signpost(h);
        Complex64::new(math::cos(a), math::sin(a))
    }

    /// The edge vector of `h` in the tangent space of its tail.
    pub fn edge_vector(&self, h: Halfedge) -> TangentVec {
        TangentVec::from_polar(self.length(h), self.signpost(h))
    }

    /// Face laid out with its reference corner at the origin and the second
    /// corner on the positive x axis.
    pub fn layout_face(&self, f: Face) -> [Vec2; 3] {
        let [a, b, c] = self.face_lengths(f);
        let p0 = Vec2::ZERO;
        let p1 = Vec2::new(a, 0.0);
        let p2 = math::place_apex(p0, p1, c, b);
        [p0, p1, p2]
    }

    /// Planar layout of the two faces at interior halfedge `h = i → j`,
    /// returned as `[i, j, k, l]` where `k` is opposite in the face of `h`
    /// and `l` opposite in the face of its twin.
    pub fn layout_diamond(&self, h: Halfedge) -> Result<[Vec2; 4]> {
        let m = &self.mesh;
        let t = m.twin(h);
        if m.is_ghost(h) || m.is_ghost(t) {
            return Err(Error::BoundaryEdge(h));
        }
        for f in [m.face(h).unwrap(), m.face(t).unwrap()] {
            let [a, b, c] = self.face_lengths(f);
            if !math::triangle_valid(a, b, c) {
                return Err(Error::DegenerateLayout(f));
            }
        }
        let pi = Vec2::ZERO;
        let pj = Vec2::new(self.length(h), 0.0);
        let pk = math::place_apex(pi, pj, self.length(m.prev(h)), self.length(m.next(h)));
        let pl = math::place_apex(pj, pi, self.length(m.prev(t)), self.length(m.next(t)));
        Ok([pi, pj, pk, pl])
    }

    /// `θᵏ + θˡ` for the edge of `h`, or `None` on the boundary.
    pub fn opposite_angle_sum(&self, h: Halfedge) -> Option<f64> {
        let m = &self.mesh;
        let t = m.twin(h);
        if m.is_ghost(h) || m.is_ghost(t) {
            return None;
        }
        Some(self.corner_angle(m.prev(h)) + self.corner_angle(m.prev(t)))
    }

    /// Cotan weight `(cot θᵏ + cot θˡ) / 2` of the edge of `h`.
    pub fn cotan_weight(&self, h: Halfedge) -> f64 {
        let m = &self.mesh;
        let mut w = 0.0;
        for g in [h, m.twin(h)] {
            if !m.is_ghost(g) {
                let opp = self.length(g);
                let b = self.length(m.next(g));
                let c = self.length(m.prev(g));
                w += 0.5 * math::cot_from_lengths(opp, b, c);
            }
        }
        w
    }

    pub fn is_delaunay_edge(&self, h: Halfedge, tol: f64) -> bool {
        self.opposite_angle_sum(h).is_none_or(|s| s <= PI + tol)
    }

    /// Interior edges whose opposite angles sum to more than `π + tol`.
    pub fn delaunay_violations(&self, tol: f64) -> usize {
        self.mesh.interior_edges().filter(|&h| !self.is_delaunay_edge(h, tol)).count()
    }

    /// Cross-checks cached angles, angle sums and signposts against a fresh
    /// evaluation, plus the strict triangle inequality.
    pub fn audit(&self) -> core::result::Result<(), &'static str> {
        self.mesh.audit()?;
        for f in self.mesh.faces() {
            let [a, b, c] = self.face_lengths(f);
            if !math::triangle_valid(a, b, c) {
                return Err("face violates the triangle inequality");
            }
            let hs = self.mesh.face_halfedges(f);
            let fresh = [math::corner_angle(b, a, c), math::corner_angle(c, a, b), math::corner_angle(a, b, c)];
            for (h, want) in hs.iter().zip(fresh) {
                let got = self.corner_angle(*h);
                if (got - want).abs() > 1e-12 * want.max(1e-300) && (got - want).abs() > 1e-15 {
                    return Err("cached corner angle is stale");
                }
            }
        }
        for h in self.mesh.halfedges() {
            if self.length(h) != self.length(self.mesh.twin(h)) {
                return Err("edge halves disagree on length");
            }
        }
        for v in self.mesh.vertices() {
            let sum: f64 = self
                .mesh
                .outgoing(v)
                .filter(|&h| !self.mesh.is_ghost(h))
                .map(|h| self.corner_angle(h))
                .sum();
            if (sum - self.angle_sum(v)).abs() > 1e-10 * sum {
                return Err("cached angle sum is stale");
            }
        }
        Ok(())
    }

    // ----- journal -------------------------------------------------------

    /// Starts recording edits so they can be rolled back.
    pub fn checkpoint(&mut self) -> Checkpoint {
        self.depth += 1;
        Checkpoint { journal: self.journal.len(), ops: self.ops.len() }
    }

    /// Restores the exact state at `cp` and closes it.
    pub fn rollback(&mut self, cp: Checkpoint) {
        while self.journal.len() > cp.journal {
            let e = self.journal.pop().unwrap();
            self.undo(e);
        }
        self.ops.truncate(cp.ops);
        self.close();
    }

    /// Keeps all edits made since `cp` and closes it.
    pub fn commit(&mut self, _cp: Checkpoint) {
        self.close();
    }

    fn close(&mut self) {
        debug_assert!(self.depth > 0);
        self.depth -= 1;
        if self.depth == 0 {
            self.journal.clear();
        }
    }

    /// Removes and returns the atomic operations emitted so far.
    pub fn take_ops(&mut self) -> Vec<TrackOp> {
        debug_assert_eq!(self.depth, 0);
        core::mem::take(&mut self.ops)
    }

    /// Enables logging of atomic operations for point tracking.
    pub fn set_tracking(&mut self, on: bool) {
        self.track = on;
    }

    #[inline]
    pub fn tracking(&self) -> bool {
        self.track
    }

    pub(crate) fn emit(&mut self, op: TrackOp) {
        if self.track {
            self.ops.push(op);
        }
    }

    fn undo(&mut self, e: Edit) {
        let m = &mut self.mesh;
        let g = &mut self.geom;
        match e {
            Edit::Next(h, v) => m.next[h as usize] = v,
            Edit::Vert(h, v) => m.vert[h as usize] = v,
            Edit::FaceOf(h, v) => m.face[h as usize] = v,
            Edit::HeAlive(h, v) => m.he_alive[h as usize] = v,
            Edit::VHe(v, h) => m.v_he[v as usize] = h,
            Edit::VAlive(v, a) => m.v_alive[v as usize] = a,
            Edit::FHe(f, h) => m.f_he[f as usize] = h,
            Edit::FAlive(f, a) => m.f_alive[f as usize] = a,
            Edit::Counts(v, f, h) => {
                m.n_vertices = v;
                m.n_faces = f;
                m.n_halfedges = h;
            }
            Edit::Len(h, l) => g.len[h as usize] = l,
            Edit::Corner(h, a) => g.corner[h as usize] = a,
            Edit::AngleSum(v, a) => g.angle_sum[v as usize] = a,
            Edit::Signpost(h, a) => g.signpost[h as usize] = a,
        }
    }

    #[inline]
    fn log(&mut self, e: Edit) {
        if self.depth > 0 {
            self.journal.push(e);
        }
    }

    pub(crate) fn set_next(&mut self, h: Halfedge, n: Halfedge) {
        self.log(Edit::Next(h.0, self.mesh.next[h.idx()]));
        self.mesh.next[h.idx()] = n.0;
    }
    pub(crate) fn set_tail(&mut self, h: Halfedge, v: Vertex) {
        self.log(Edit::Vert(h.0, self.mesh.vert[h.idx()]));
        self.mesh.vert[h.idx()] = v.0;
    }
    pub(crate) fn set_face(&mut self, h: Halfedge, f: Option<Face>) {
        self.log(Edit::FaceOf(h.0, self.mesh.face[h.idx()]));
        self.mesh.face[h.idx()] = f.map_or(NONE, |f| f.0);
    }
    pub(crate) fn set_vertex_halfedge(&mut self, v: Vertex, h: Halfedge) {
        self.log(Edit::VHe(v.0, self.mesh.v_he[v.idx()]));
        self.mesh.v_he[v.idx()] = h.0;
    }
    pub(crate) fn set_face_halfedge(&mut self, f: Face, h: Halfedge) {
        self.log(Edit::FHe(f.0, self.mesh.f_he[f.idx()]));
        self.mesh.f_he[f.idx()] = h.0;
    }
    fn log_counts(&mut self) {
        let m = &self.mesh;
        self.log(Edit::Counts(m.n_vertices, m.n_faces, m.n_halfedges));
    }
    pub(crate) fn kill_halfedge(&mut self, h: Halfedge) {
        self.log_counts();
        self.log(Edit::HeAlive(h.0, true));
        self.mesh.he_alive[h.idx()] = false;
        self.mesh.n_halfedges -= 1;
    }
    pub(crate) fn kill_vertex(&mut self, v: Vertex) {
        self.log_counts();
        self.log(Edit::VAlive(v.0, true));
        self.mesh.v_alive[v.idx()] = false;
        self.mesh.n_vertices -= 1;
    }
    pub(crate) fn kill_face(&mut self, f: Face) {
        self.log_counts();
        self.log(Edit::FAlive(f.0, true));
        self.mesh.f_alive[f.idx()] = false;
        self.mesh.n_faces -= 1;
    }

    /// Sets the length of the edge of `h` (both halves).
    pub(crate) fn set_length(&mut self, h: Halfedge, l: f64) {
        let t = self.mesh.twin(h);
        self.log(Edit::Len(h.0, self.geom.len[h.idx()]));
        self.log(Edit::Len(t.0, self.geom.len[t.idx()]));
        self.geom.len[h.idx()] = l;
        self.geom.len[t.idx()] = l;
    }
    fn set_corner(&mut self, h: Halfedge, a: f64) {
        self.log(Edit::Corner(h.0, self.geom.corner[h.idx()]));
        self.geom.corner[h.idx()] = a;
    }
    fn set_angle_sum(&mut self, v: Vertex, a: f64) {
        self.log(Edit::AngleSum(v.0, self.geom.angle_sum[v.idx()]));
        self.geom.angle_sum[v.idx()] = a;
    }
    fn set_signpost(&mut self, h: Halfedge, a: f64) {
        self.log(Edit::Signpost(h.0, self.geom.signpost[h.idx()]));
        self.geom.signpost[h.idx()] = a;
    }

    /// Recomputes the three corner angles of `f` from its lengths.
    pub(crate) fn refresh_face(&mut self, f: Face) {
        let [h0, h1, h2] = self.mesh.face_halfedges(f);
        let (a, b, c) = (self.length(h0), self.length(h1), self.length(h2));
        self.set_corner(h0, math::corner_angle(b, a, c));
        self.set_corner(h1, math::corner_angle(c, a, b));
        self.set_corner(h2, math::corner_angle(a, b, c));
    }

    /// Recomputes the angle sum and the signposts of all halfedges leaving
    /// `v`. Interior vertices keep the direction of their reference
    /// halfedge; boundary vertices measure from their first boundary edge.
    pub(crate) fn refresh_vertex(&mut self, v: Vertex) {
        let mut sum = 0.0;
        let mut h = self.mesh.halfedge(v);
        let start = h;
        loop {
            if self.mesh.is_ghost(h) {
                break;
            }
            sum += self.corner_angle(h);
            h = self.mesh.twin(self.mesh.prev(h));
            if h == start {
                break;
            }
        }
        self.set_angle_sum(v, sum);
        let boundary = self.mesh.is_boundary_vertex(v);
        let (scale, base) = if boundary { (1.0, 0.0) } else { (TAU / sum, self.signpost(start)) };
        let mut acc = 0.0;
        let mut h = start;
        loop {
            let phi = if boundary { acc } else { math::wrap_angle(base + scale * acc) };
            self.set_signpost(h, phi);
            if self.mesh.is_ghost(h) {
                break;
            }
            acc += self.corner_angle(h);
            h = self.mesh.twin(self.mesh.prev(h));
            if h == start {
                break;
            }
        }
    }

    /// Refreshes signposts around `v` and at every neighbour of `v`.
    pub fn update_signposts_around(&mut self, v: Vertex) {
        self.refresh_vertex(v);
        let nbrs = self.mesh.neighbors(v);
        for w in nbrs {
            self.refresh_vertex(w);
        }
    }

    /// Re-validates the reference halfedge of `v` after local surgery.
    /// `candidate` is any live halfedge leaving `v`. Boundary vertices take
    /// the first edge of their wedge; interior vertices keep a live reference
    /// and otherwise take the lowest-index outgoing halfedge.
    pub(crate) fn repair_vertex_reference(&mut self, v: Vertex, candidate: Halfedge) {
        let m = &self.mesh;
        let cur = m.halfedge(v);
        let cur_ok = m.halfedge_alive(cur) && m.tail(cur) == v && !m.is_ghost(cur);
        let mut lowest = None;
        let mut anchor = None;
        let mut h = candidate;
        loop {
            if !m.is_ghost(h) {
                if m.is_ghost(m.twin(h)) {
                    anchor = Some(h);
                }
                if lowest.is_none_or(|l: Halfedge| h.0 < l.0) {
                    lowest = Some(h);
                }
            }
            h = m.next(m.twin(h));
            if h == candidate {
                break;
            }
        }
        let pick = match anchor {
            Some(a) => a,
            None if cur_ok => cur,
            None => lowest.expect("vertex without faces"),
        };
        if pick != cur {
            self.set_vertex_halfedge(v, pick);
        }
    }

    /// A compact copy with dead elements dropped. Returns the surface and,
    /// for each new vertex, its id in `self`.
    pub fn compacted(&self) -> (Surface, Vec<Vertex>) {
        let m = &self.mesh;
        let mut vmap = vec![NONE; m.vertex_capacity()];
        let mut old_vertices = Vec::new();
        for v in m.vertices() {
            vmap[v.idx()] = old_vertices.len() as u32;
            old_vertices.push(v);
        }
        let mut fmap = vec![NONE; m.face_capacity()];
        let mut hmap = vec![NONE; m.halfedge_capacity()];
        let mut nf = 0u32;
        let mut nh = 0u32;
        for f in m.faces() {
            fmap[f.idx()] = nf;
            nf += 1;
            for h in m.face_halfedges(f) {
                hmap[h.idx()] = nh;
                nh += 1;
            }
        }
        for h in m.halfedges() {
            if m.is_ghost(h) {
                hmap[h.idx()] = nh;
                nh += 1;
            }
        }
        let nh = nh as usize;
        let mut next = vec![NONE; nh];
        let mut twin = vec![NONE; nh];
        let mut vert = vec![NONE; nh];
        let mut face = vec![NONE; nh];
        let mut len = vec![0.0; nh];
        for h in m.halfedges() {
            let n = hmap[h.idx()] as usize;
            next[n] = hmap[m.next(h).idx()];
            twin[n] = hmap[m.twin(h).idx()];
            vert[n] = vmap[m.tail(h).idx()];
            face[n] = m.face(h).map_or(NONE, |f| fmap[f.idx()]);
            len[n] = self.length(h);
        }
        let v_he = old_vertices.iter().map(|&v| hmap[m.halfedge(v).idx()]).collect();
        let f_he = m.faces().map(|f| hmap[m.face_halfedge(f).idx()]).collect();
        let mesh = DeltaComplex {
            next,
            twin,
            vert,
            face,
            he_alive: vec![true; nh],
            v_he,
            v_alive: vec![true; old_vertices.len()],
            f_he,
            f_alive: vec![true; nf as usize],
            n_vertices: old_vertices.len(),
            n_faces: nf as usize,
            n_halfedges: nh,
        };
        let mut s = Surface {
            geom: IntrinsicGeometry {
                len,
                corner: vec![0.0; nh],
                angle_sum: vec![0.0; old_vertices.len()],
                signpost: vec![0.0; nh],
            },
            mesh,
            journal: Vec::new(),
            depth: 0,
            track: false,
            ops: Vec::new(),
            queued: Vec::new(),
        };
        // carry corner angles and signposts over verbatim
        for h in m.halfedges() {
            let n = hmap[h.idx()] as usize;
            s.geom.corner[n] = self.geom.corner[h.idx()];
            s.geom.signpost[n] = self.geom.signpost[h.idx()];
        }
        for (n, &v) in old_vertices.iter().enumerate() {
            s.geom.angle_sum[n] = self.geom.angle_sum[v.idx()];
        }
        (s, old_vertices)
    }
}
