//! Conversion of extrinsic per-vertex vectors to intrinsic tangent vectors.

use ice_core::math::{wrap_angle, TAU};
use ice_core::{Surface, TangentVec, Vertex};

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Projects `u` into the tangent plane at `v` (area-weighted normal) and
/// expresses it in `v`'s normalized polar coordinates by interpolating the
/// signposts of the surrounding edges.
pub fn to_tangent(surface: &Surface, positions: &[V3], v: Vertex, u: V3) -> TangentVec {
    let m = surface.mesh();
    let x = positions[v.idx()];
    let mut n = [0.0; 3];
    for h in m.outgoing(v) {
        if let Some(f) = m.face(h) {
            let [a, b, c] = m.face_vertices(f).map(|w| positions[w.idx()]);
            let c = cross(sub(b, a), sub(c, a));
            n = [n[0] + c[0], n[1] + c[1], n[2] + c[2]];
        }
    }
    let nn = dot(n, n).sqrt();
    if nn == 0.0 {
        return TangentVec::ZERO;
    }
    let n = scale(n, 1.0 / nn);
    let project = |w: V3| sub(w, scale(n, dot(w, n)));
    let e1 = project(sub(positions[m.tip(m.halfedge(v)).idx()], x));
    let e1 = scale(e1, 1.0 / dot(e1, e1).sqrt());
    let e2 = cross(n, e1);
    let angle = |w: V3| wrap_angle(dot(w, e2).atan2(dot(w, e1)));
    let pu = project(u);
    let r = dot(pu, pu).sqrt();
    if r == 0.0 {
        return TangentVec::ZERO;
    }
    let a = angle(pu);
    let mut spokes: Vec<(f64, f64)> = Vec::new();
    for h in m.outgoing(v) {
        let t = m.tip(h);
        if t == v {
            continue;
        }
        let d = angle(sub(positions[t.idx()], x));
        let d = if spokes.is_empty() { 0.0 } else { d };
        spokes.push((d, surface.signpost(h)));
    }
    if !m.is_boundary_vertex(v) {
        spokes.push((TAU, TAU));
    }
    for w in spokes.windows(2) {
        let ((a0, p0), (a1, p1)) = (w[0], w[1]);
        if a >= a0 && a <= a1 && a1 > a0 {
            return TangentVec::from_polar(r, p0 + (a - a0) / (a1 - a0) * (p1 - p0));
        }
    }
    TangentVec::from_polar(r, spokes.last().map_or(0.0, |s| s.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ice_core::shapes;

    #[test]
    fn flat_vertex_exact() {
        let (p, f) = shapes::hexagon_fan();
        let s = Surface::from_positions(&p, &f).unwrap();
        let v = Vertex(0);
        let e = p[s.mesh().tip(s.mesh().halfedge(v)).idx()];
        let base = e[1].atan2(e[0]);
        for k in 0..12 {
            let a = 0.5 * k as f64;
            let t = to_tangent(&s, &p, v, [2.0 * (base + a).cos(), 2.0 * (base + a).sin(), 0.3]);
            assert!((t.norm() - 2.0).abs() < 1e-12);
            assert!((wrap_angle(t.angle() - a).min(wrap_angle(a - t.angle()))) < 1e-12);
        }
    }
}
