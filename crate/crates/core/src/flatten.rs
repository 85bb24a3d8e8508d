//! Conformal flattening of a single vertex: a scale factor `u` at vertex `i`
//! multiplies every incident edge length by `e^{u/2}` so that the angle sum
//! at `i` reaches `2π` (or `π` on the boundary).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::mapping::TrackOp;
use crate::math;
use crate::mesh::{Halfedge, Vertex};

/// Angle-sum residual accepted as flat.
pub const FLAT_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 32;
const MAX_BISECT: usize = 200;
const MAX_STEP: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FlattenOutcome {
    pub u: f64,
    /// Newton (and fallback bisection) steps taken by the final solve.
    pub iterations: usize,
    /// Edge flips performed to restore the triangle inequality.
    pub flips: usize,
    /// `K̃_j − K_j` per distinct neighbour, in orbit order.
    pub deltas: Vec<(Vertex, f64)>,
}

/// One corner at the flattened vertex: lengths of the two spokes and the
/// opposite ring edge, each with the number of endpoints at the vertex.
#[derive(Clone, Copy)]
struct Corner {
    a: f64,
    ea: i32,
    b: f64,
    eb: i32,
    c: f64,
    ec: i32,
}

impl Corner {
    #[inline]
    fn scaled(&self, half: f64) -> (f64, f64, f64) {
        let s = |l: f64, e: i32| match e {
            0 => l,
            1 => l * half,
            _ => l * (half * half),
        };
        (s(self.a, self.ea), s(self.b, self.eb), s(self.c, self.ec))
    }
}

fn corners(s: &Surface, v: Vertex, out: &mut Vec<Corner>) {
    out.clear();
    let m = s.mesh();
    for h in m.outgoing(v) {
        if m.is_ghost(h) {
            continue;
        }
        let n = m.next(h);
        let p = m.prev(h);
        let ends = |g: Halfedge| (m.tail(g) == v) as i32 + (m.tip(g) == v) as i32;
        out.push(Corner { a: s.length(h), ea: ends(h), b: s.length(p), eb: ends(p), c: s.length(n), ec: ends(n) });
    }
}

/// `Θ(u)` and `dΘ/du` from the corner list.
fn angle_sum(cs: &[Corner], u: f64) -> (f64, f64) {
    let half = math::exp(0.5 * u);
    let mut theta = 0.0;
    let mut slope = 0.0;
    for c in cs {
        let (a, b, opp) = c.scaled(half);
        theta += math::corner_angle(opp, a, b);
        if math::triangle_valid(a, b, opp) {
            slope -= 0.5 * (math::cot_from_lengths(b, a, opp) + math::cot_from_lengths(a, b, opp));
        }
    }
    (theta, slope)
}

/// Solves `Θ(u) = target`. Returns `(u, iterations)`.
fn solve(cs: &[Corner], target: f64) -> Option<(f64, usize)> {
    let mut u = 0.0;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut iters = 0;
    // Θ is non-increasing in u, so g = target − Θ is non-decreasing
    loop {
        let (theta, slope) = angle_sum(cs, u);
        let g = target - theta;
        if g.abs() < FLAT_TOL {
            return Some((u, iters));
        }
        if g < 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        if iters >= MAX_NEWTON {
            break;
        }
        iters += 1;
        let dg = -slope;
        let mut next = if dg > 0.0 { u - g / dg } else { f64::NAN };
        if !next.is_finite() {
            next = if g < 0.0 { u + MAX_STEP } else { u - MAX_STEP };
        }
        next = next.clamp(u - MAX_STEP, u + MAX_STEP);
        if next <= lo || next >= hi {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + MAX_STEP
            } else {
                hi - MAX_STEP
            };
        }
        u = next;
    }
    // bracket the root, then bisect
    let g = |u: f64| target - angle_sum(cs, u).0;
    let mut step = MAX_STEP;
    while !lo.is_finite() {
        let x = hi - step;
        if g(x) < 0.0 {
            lo = x;
        } else {
            hi = x;
            step *= 2.0;
        }
        if step > 1e3 {
            return None;
        }
    }
    step = MAX_STEP;
    while !hi.is_finite() {
        let x = lo + step;
        if g(x) > 0.0 {
            hi = x;
        } else {
            lo = x;
            step *= 2.0;
        }
        if step > 1e3 {
            return None;
        }
    }
    for _ in 0..MAX_BISECT {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() < FLAT_TOL {
            return Some((mid, iters));
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            return None;
        }
    }
    None
}

impl Surface {
    /// Conformally scales the edges at `v` until its angle sum is flat.
    /// One-ring faces that would violate the triangle inequality are
    /// repaired by flipping their edge opposite `v`, at most `4·deg` times.
    ///
    /// On error the surface may be partially modified; callers run this
    /// inside a checkpoint.
    pub fn flatten_vertex(&mut self, v: Vertex) -> Result<FlattenOutcome> {
        if !self.mesh.vertex_alive(v) {
            return Err(Error::DeadVertex(v));
        }
        let target = self.flat_angle_sum(v);
        let budget = 4 * self.mesh.degree(v);
        let mut flips = 0;
        let mut cs = Vec::new();
        let (u, iterations) = loop {
            corners(self, v, &mut cs);
            let (u, iters) = solve(&cs, target).ok_or(Error::NotFlat(v))?;
            let half = math::exp(0.5 * u);
            let bad = self.mesh.outgoing(v).zip(cs.iter()).find_map(|(h, c)| {
                let (a, b, opp) = c.scaled(half);
                (!math::triangle_valid(a, b, opp)).then_some(h)
            });
            match bad {
                None => break (u, iters),
                Some(h) => {
                    if flips >= budget {
                        return Err(Error::NotFlat(v));
                    }
                    let ring = self.mesh.next(h);
                    self.flip_edge(ring).map_err(|_| Error::NotFlat(v))?;
                    flips += 1;
                }
            }
        };

        let m = &self.mesh;
        let spokes: Vec<Halfedge> = m.outgoing(v).filter(|&h| !m.is_ghost(h)).collect();
        // neighbour corner angles before scaling
        let mut before: Vec<(Vertex, f64)> = Vec::with_capacity(2 * spokes.len());
        for &h in &spokes {
            let (n, p) = (m.next(h), m.prev(h));
            before.push((m.tail(n), self.corner_angle(n)));
            before.push((m.tail(p), self.corner_angle(p)));
        }

        let half = math::exp(0.5 * u);
        let full = half * half;
        let all: Vec<Halfedge> = self.mesh.outgoing(v).collect();
        for &h in &all {
            let m = &self.mesh;
            let t = m.twin(h);
            // a self-edge appears twice in the orbit; scale it once
            if m.tail(t) == v && t.0 < h.0 {
                continue;
            }
            let f = if m.tip(h) == v { full } else { half };
            self.set_length(h, self.length(h) * f);
        }
        let m = &self.mesh;
        let faces: Vec<_> = spokes.iter().map(|&h| m.face(h).unwrap()).collect();
        for &f in &faces {
            self.refresh_face(f);
        }

        let m = &self.mesh;
        let mut deltas: Vec<(Vertex, f64)> = Vec::new();
        for (k, &h) in spokes.iter().enumerate() {
            let (n, p) = (m.next(h), m.prev(h));
            for (g, (w, old)) in [(n, before[2 * k]), (p, before[2 * k + 1])] {
                if w == v {
                    continue;
                }
                let d = -(self.corner_angle(g) - old);
                match deltas.iter_mut().find(|(x, _)| *x == w) {
                    Some(e) => e.1 += d,
                    None => deltas.push((w, d)),
                }
            }
        }

        if self.tracking() {
            let mut corners = Vec::with_capacity(spokes.len());
            for &h in &spokes {
                let f = m.face(h).unwrap();
                let k = m.face_halfedges(f).iter().position(|&g| g == h).unwrap();
                corners.push((f, k as u8));
            }
            self.emit(TrackOp::Scale { factor: full, corners });
        }
        self.update_signposts_around(v);
        Ok(FlattenOutcome { u, iterations, flips, deltas })
    }
}
