//! Halfedge connectivity for Δ-complexes.
//!
//! Interior faces are triangles whose three halfedges are stored at indices
//! `3f, 3f + 1, 3f + 2` when the complex is built. Boundary edges carry a
//! "ghost" halfedge (no face) on the exterior side, linked into loops with
//! `next`, so every halfedge has a twin. Self-edges and faces with repeated
//! vertices are representable: nothing here assumes that an element is
//! determined by its vertices.
//!
//! Elements are never allocated after construction; removal only marks them
//! dead, so handles stored in logs stay meaningful for the whole run.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub(crate) const NONE: u32 = u32::MAX;

macro_rules! handle {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }
    };
}

handle!(Vertex);
handle!(Halfedge);
handle!(Face);

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaComplex {
    pub(crate) next: Vec<u32>,
    pub(crate) twin: Vec<u32>,
    pub(crate) vert: Vec<u32>,
    pub(crate) face: Vec<u32>,
    pub(crate) he_alive: Vec<bool>,
    pub(crate) v_he: Vec<u32>,
    pub(crate) v_alive: Vec<bool>,
    pub(crate) f_he: Vec<u32>,
    pub(crate) f_alive: Vec<bool>,
    pub(crate) n_vertices: usize,
    pub(crate) n_faces: usize,
    pub(crate) n_halfedges: usize,
}

impl DeltaComplex {
    /// Builds connectivity from oriented vertex triples.
    pub fn from_triangles(n_vertices: usize, faces: &[[usize; 3]]) -> Result<Self> {
        let nf = faces.len();
        let mut next = Vec::with_capacity(3 * nf);
        let mut vert = Vec::with_capacity(3 * nf);
        let mut face = Vec::with_capacity(3 * nf);
        let mut directed: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= n_vertices {
                    return Err(Error::VertexOutOfRange { face: fi, vertex: v, count: n_vertices });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[2] == f[0] {
                return Err(Error::DegenerateFace(fi));
            }
            for k in 0..3 {
                let h = (3 * fi + k) as u32;
                let a = f[k] as u32;
                let b = f[(k + 1) % 3] as u32;
                next.push((3 * fi + (k + 1) % 3) as u32);
                vert.push(a);
                face.push(fi as u32);
                if directed.insert((a, b), h).is_some() {
                    return Err(Error::NonManifoldEdge(a as usize, b as usize));
                }
            }
        }
        let n_interior = 3 * nf;
        let mut twin = vec![NONE; n_interior];
        let mut ghost_from: BTreeMap<u32, u32> = BTreeMap::new();
        for h in 0..n_interior {
            let a = vert[h];
            let b = vert[next[h] as usize];
            if let Some(&t) = directed.get(&(b, a)) {
                twin[h] = t;
            } else {
                // ghost b -> a on the exterior side
                let g = twin.len() as u32;
                twin.push(h as u32);
                twin[h] = g;
                vert.push(b);
                face.push(NONE);
                next.push(NONE);
                if ghost_from.insert(b, g).is_some() {
                    return Err(Error::NonManifoldVertex(b as usize));
                }
            }
        }
        // ghost loops: ghost b -> a continues with the ghost leaving a
        for g in n_interior..twin.len() {
            let a = vert[twin[g] as usize];
            next[g] = *ghost_from.get(&a).ok_or(Error::NonManifoldVertex(a as usize))?;
        }

        let n_he = twin.len();
        let mut v_he = vec![NONE; n_vertices];
        for h in 0..n_interior {
            let v = vert[h] as usize;
            let is_anchor = face[twin[h] as usize] == NONE;
            if v_he[v] == NONE || (is_anchor && face[twin[v_he[v] as usize] as usize] != NONE) {
                v_he[v] = h as u32;
            }
        }
        let mut c = DeltaComplex {
            next,
            twin,
            vert,
            face,
            he_alive: vec![true; n_he],
            v_he,
            v_alive: vec![true; n_vertices],
            f_he: (0..nf).map(|f| (3 * f) as u32).collect(),
            f_alive: vec![true; nf],
            n_vertices,
            n_faces: nf,
            n_halfedges: n_he,
        };
        // every vertex must be used, and its halfedges must form a single fan
        let mut out_count = vec![0usize; n_vertices];
        for h in 0..n_he {
            out_count[c.vert[h] as usize] += 1;
        }
        for v in 0..n_vertices {
            if c.v_he[v] == NONE {
                return Err(Error::NonManifoldVertex(v));
            }
            let orbit = c.outgoing(Vertex(v as u32)).count();
            if orbit != out_count[v] {
                return Err(Error::NonManifoldVertex(v));
            }
        }
        c.n_vertices = n_vertices;
        Ok(c)
    }

    #[inline]
    pub fn next(&self, h: Halfedge) -> Halfedge {
        Halfedge(self.next[h.idx()])
    }
    #[inline]
    pub fn prev(&self, h: Halfedge) -> Halfedge {
        debug_assert!(!self.is_ghost(h));
        self.next(self.next(h))
    }
    #[inline]
    pub fn twin(&self, h: Halfedge) -> Halfedge {
        Halfedge(self.twin[h.idx()])
    }
    /// Source vertex.
    #[inline]
    pub fn tail(&self, h: Halfedge) -> Vertex {
        Vertex(self.vert[h.idx()])
    }
    /// Target vertex.
    #[inline]
    pub fn tip(&self, h: Halfedge) -> Vertex {
        Vertex(self.vert[self.twin[h.idx()] as usize])
    }
    #[inline]
    pub fn face(&self, h: Halfedge) -> Option<Face> {
        let f = self.face[h.idx()];
        (f != NONE).then_some(Face(f))
    }
    #[inline]
    pub fn is_ghost(&self, h: Halfedge) -> bool {
        self.face[h.idx()] == NONE
    }
    /// `true` when the edge of `h` lies on the boundary.
    #[inline]
    pub fn is_boundary_edge(&self, h: Halfedge) -> bool {
        self.is_ghost(h) || self.is_ghost(self.twin(h))
    }
    #[inline]
    pub fn halfedge(&self, v: Vertex) -> Halfedge {
        Halfedge(self.v_he[v.idx()])
    }
    #[inline]
    pub fn face_halfedge(&self, f: Face) -> Halfedge {
        Halfedge(self.f_he[f.idx()])
    }
    #[inline]
    pub fn is_boundary_vertex(&self, v: Vertex) -> bool {
        self.is_ghost(self.twin(self.halfedge(v)))
    }
    #[inline]
    pub fn vertex_alive(&self, v: Vertex) -> bool {
        self.v_alive[v.idx()]
    }
    #[inline]
    pub fn face_alive(&self, f: Face) -> bool {
        self.f_alive[f.idx()]
    }
    #[inline]
    pub fn halfedge_alive(&self, h: Halfedge) -> bool {
        self.he_alive[h.idx()]
    }

    pub fn vertex_capacity(&self) -> usize {
        self.v_alive.len()
    }
    pub fn face_capacity(&self) -> usize {
        self.f_alive.len()
    }
    pub fn halfedge_capacity(&self) -> usize {
        self.he_alive.len()
    }
    pub fn num_vertices(&self) -> usize {
        self.n_vertices
    }
    pub fn num_faces(&self) -> usize {
        self.n_faces
    }
    pub fn num_edges(&self) -> usize {
        self.n_halfedges / 2
    }
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.num_edges() as i64 + self.n_faces as i64
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.v_alive.len() as u32).map(Vertex).filter(|v| self.v_alive[v.idx()])
    }
    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        (0..self.f_alive.len() as u32).map(Face).filter(|f| self.f_alive[f.idx()])
    }
    pub fn halfedges(&self) -> impl Iterator<Item = Halfedge> + '_ {
        (0..self.he_alive.len() as u32).map(Halfedge).filter(|h| self.he_alive[h.idx()])
    }
    /// One halfedge per edge: the interior side, or the lower index when both are.
    pub fn edges(&self) -> impl Iterator<Item = Halfedge> + '_ {
        self.halfedges().filter(|&h| {
            let t = self.twin(h);
            if self.is_ghost(h) {
                false
            } else if self.is_ghost(t) {
                true
            } else {
                h.0 < t.0
            }
        })
    }
    /// Interior edges (both sides carry a face).
    pub fn interior_edges(&self) -> impl Iterator<Item = Halfedge> + '_ {
        self.edges().filter(|&h| !self.is_boundary_edge(h))
    }

    /// The three halfedges of a face, starting at its reference halfedge.
    #[inline]
    pub fn face_halfedges(&self, f: Face) -> [Halfedge; 3] {
        let h0 = self.face_halfedge(f);
        let h1 = self.next(h0);
        [h0, h1, self.next(h1)]
    }
    #[inline]
    pub fn face_vertices(&self, f: Face) -> [Vertex; 3] {
        self.face_halfedges(f).map(|h| self.tail(h))
    }

    /// Outgoing halfedges of `v` in counter-clockwise order, starting at the
    /// vertex's reference halfedge. At a boundary vertex the ghost halfedge
    /// comes last.
    pub fn outgoing(&self, v: Vertex) -> Outgoing<'_> {
        let start = self.halfedge(v);
        Outgoing { mesh: self, start, cur: Some(start) }
    }

    /// Number of face corners at `v`.
    pub fn degree(&self, v: Vertex) -> usize {
        self.outgoing(v).filter(|&h| !self.is_ghost(h)).count()
    }

    /// Distinct neighbours of `v`, excluding `v` itself, in orbit order.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = Vec::new();
        for h in self.outgoing(v) {
            let w = self.tip(h);
            if w != v && !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// Connected components as a per-vertex label (dead vertices get `u32::MAX`).
    pub fn components(&self) -> (Vec<u32>, usize) {
        let mut label = vec![NONE; self.v_alive.len()];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for s in self.vertices() {
            if label[s.idx()] != NONE {
                continue;
            }
            label[s.idx()] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for h in self.outgoing(v) {
                    let w = self.tip(h);
                    if label[w.idx()] == NONE {
                        label[w.idx()] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Checks next-cycles, twin involution, orbit closure and element counts.
    pub fn audit(&self) -> core::result::Result<(), &'static str> {
        let mut he_count = 0;
        for h in self.halfedges() {
            he_count += 1;
            let t = self.twin(h);
            if !self.halfedge_alive(t) || self.twin(t) != h || t == h {
                return Err("twin is not an involution");
            }
            if !self.halfedge_alive(self.next(h)) {
                return Err("next points to a dead halfedge");
            }
            if self.tip(h) != self.tail(self.next(h)) {
                return Err("next does not continue at the tip");
            }
            match self.face(h) {
                Some(f) => {
                    if !self.face_alive(f) {
                        return Err("halfedge in dead face");
                    }
                    let n3 = self.next(self.next(self.next(h)));
                    if n3 != h {
                        return Err("face is not a 3-cycle");
                    }
                    if self.face(self.next(h)) != Some(f) {
                        return Err("face labels disagree within a cycle");
                    }
                }
                None => {
                    if !self.is_ghost(self.next(h)) {
                        return Err("ghost loop leaves the boundary");
                    }
                    if self.is_ghost(t) {
                        return Err("edge with two ghost sides");
                    }
                }
            }
            if !self.vertex_alive(self.tail(h)) {
                return Err("halfedge from dead vertex");
            }
        }
        if he_count != self.n_halfedges {
            return Err("halfedge count mismatch");
        }
        let mut f_count = 0;
        for f in self.faces() {
            f_count += 1;
            let h = self.face_halfedge(f);
            if !self.halfedge_alive(h) || self.face(h) != Some(f) {
                return Err("face reference halfedge is invalid");
            }
        }
        if f_count != self.n_faces {
            return Err("face count mismatch");
        }
        let mut out_count = vec![0usize; self.v_alive.len()];
        for h in self.halfedges() {
            out_count[self.tail(h).idx()] += 1;
        }
        let mut v_count = 0;
        for v in self.vertices() {
            v_count += 1;
            let h = self.halfedge(v);
            if !self.halfedge_alive(h) || self.tail(h) != v || self.is_ghost(h) {
                return Err("vertex reference halfedge is invalid");
            }
            let ghosts = self.outgoing(v).filter(|&h| self.is_ghost(h)).count();
            if ghosts > 1 {
                return Err("vertex touches two boundary wedges");
            }
            if ghosts == 1 && !self.is_ghost(self.twin(h)) {
                return Err("boundary vertex reference is not the first wedge edge");
            }
            let n = self.outgoing(v).take(out_count[v.idx()] + 1).count();
            if n != out_count[v.idx()] {
                return Err("vertex orbit does not close over all outgoing halfedges");
            }
        }
        if v_count != self.n_vertices {
            return Err("vertex count mismatch");
        }
        Ok(())
    }
}

pub struct Outgoing<'a> {
    mesh: &'a DeltaComplex,
    start: Halfedge,
    cur: Option<Halfedge>,
}

impl Iterator for Outgoing<'_> {
    type Item = Halfedge;

    #[inline]
    fn next(&mut self) -> Option<Halfedge> {
        let h = self.cur?;
        self.cur = if self.mesh.is_ghost(h) {
            None
        } else {
            let n = self.mesh.twin(self.mesh.prev(h));
            (n != self.start).then_some(n)
        };
        Some(h)
    }
}
