use core::f64::consts::PI;

use crate::geometry::Surface;
use crate::mapping::TrackedPoint;
use crate::math::{self, Vec2};
use crate::mesh::{Face, Halfedge, Vertex};
use crate::tangent::TangentVec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOutcome {
    pub end: TrackedPoint,
    /// Distance actually walked; shorter than requested if the boundary
    /// was hit.
    pub length: f64,
    pub hit_boundary: bool,
}

fn at_vertex(surface: &Surface, h: Halfedge) -> TrackedPoint {
    let m = surface.mesh();
    let f = m.face(h).unwrap();
    let k = m.face_halfedges(f).iter().position(|&g| g == h).unwrap();
    let mut bary = [0.0; 3];
    bary[k] = 1.0;
    TrackedPoint { face: f, bary }
}

/// The outgoing interior halfedge whose wedge contains normalized angle `a`,
/// with the offset of `a` from it in actual angle.
fn wedge(surface: &Surface, v: Vertex, a: f64) -> Option<(Halfedge, f64)> {
    let m = surface.mesh();
    let s = surface.angle_scale(v);
    let a = math::wrap_angle(a);
    for h in m.outgoing(v) {
        if m.is_ghost(h) {
            continue;
        }
        let lo = surface.signpost(h);
        let width = surface.corner_angle(h);
        let off = math::wrap_angle(a - lo) / s;
        if off <= width + 1e-14 {
            return Some((h, off.min(width)));
        }
    }
    None
}

/// Walks a straight line from `start` in direction `dir` for `‖dir‖` by
/// unfolding triangles one at a time (the discrete exponential map).
pub fn trace_geodesic(surface: &Surface, start: Vertex, dir: TangentVec) -> TraceOutcome {
    let m = surface.mesh();
    let total = dir.norm();
    let mut walked = 0.0;
    let mut vertex = start;
    let mut angle = dir.0.arg();
    let stop_at = |h: Halfedge, walked: f64, boundary: bool| TraceOutcome {
        end: at_vertex(surface, h),
        length: walked,
        hit_boundary: boundary,
    };
    'vertex: loop {
        let Some((h, off)) = wedge(surface, vertex, angle) else {
            let h = m.outgoing(vertex).next().unwrap();
            return stop_at(h, walked, true);
        };
        if total - walked <= 0.0 {
            return stop_at(h, walked, false);
        }
        let mut f = m.face(h).unwrap();
        let mut layout = surface.layout_face(f);
        let hs = m.face_halfedges(f);
        let k = hs.iter().position(|&g| g == h).unwrap();
        let edge = layout[(k + 1) % 3] - layout[k];
        let mut p = layout[k];
        let mut d = Vec2::from_polar(1.0, edge.arg() + off);
        // halfedge of `f` the walk entered through, or the corner it left
        let mut entry: Option<Halfedge> = None;
        let mut corner = Some(k);
        loop {
            let hs = m.face_halfedges(f);
            let remaining = total - walked;
            let scale = (layout[1] - layout[0]).norm();
            let mut best: Option<(f64, usize, f64)> = None;
            for e in 0..3 {
                if Some(hs[e]) == entry || corner.is_some_and(|c| c == e || (c + 2) % 3 == e) {
                    continue;
                }
                let (a, b) = (layout[e], layout[(e + 1) % 3]);
                let ab = b - a;
                let den = d.cross(ab);
                if den.abs() < 1e-300 {
                    continue;
                }
                let t = (a - p).cross(ab) / den;
                let u = (a - p).cross(d) / den;
                if t > -1e-12 * scale && best.is_none_or(|x| t < x.0) {
                    best = Some((t, e, u.clamp(0.0, 1.0)));
                }
            }
            let Some((t, e, u)) = best else {
                let b = math::clamp_barycentric(math::barycentric(p, layout));
                return TraceOutcome { end: TrackedPoint { face: f, bary: b }, length: walked, hit_boundary: false };
            };
            if t >= remaining - 1e-12 * scale {
                let q = p + d * remaining;
                let b = math::clamp_barycentric(math::barycentric(q, layout));
                return TraceOutcome { end: TrackedPoint { face: f, bary: b }, length: total, hit_boundary: false };
            }
            walked += t.max(0.0);
            let g = hs[e];
            let snap = 1e-10;
            if u < snap || u > 1.0 - snap {
                // passed through a vertex: leave it splitting its angle evenly
                let c = if u < snap { e } else { (e + 1) % 3 };
                let w = m.tail(hs[c]);
                let out = hs[c];
                let back = (d * -1.0).arg() - (layout[(c + 1) % 3] - layout[c]).arg();
                let back = wrap_pi(back);
                if m.is_boundary_vertex(w) {
                    return stop_at(out, walked, true);
                }
                let s = surface.angle_scale(w);
                angle = surface.signpost(out) + s * back + PI;
                vertex = w;
                continue 'vertex;
            }
            let t_he = m.twin(g);
            if m.is_ghost(t_he) {
                let q = p + d * t;
                let b = math::clamp_barycentric(math::barycentric(q, layout));
                return TraceOutcome { end: TrackedPoint { face: f, bary: b }, length: walked, hit_boundary: true };
            }
            let q = p + d * t;
            let (a0, a1) = (layout[e], layout[(e + 1) % 3]);
            let nf: Face = m.face(t_he).unwrap();
            let nl = surface.layout_face(nf);
            let nhs = m.face_halfedges(nf);
            let j = nhs.iter().position(|&x| x == t_he).unwrap();
            // twin runs a1 -> a0 in the new frame
            let (b0, b1) = (nl[j], nl[(j + 1) % 3]);
            let rot = (b0 - b1).arg() - (a1 - a0).arg();
            let map = |v: Vec2| rotate(v, rot);
            p = b1 + map(q - a0);
            d = map(d);
            f = nf;
            layout = nl;
            entry = Some(t_he);
            corner = None;
        }
    }
}

fn rotate(v: Vec2, a: f64) -> Vec2 {
    let (c, s) = (math::cos(a), math::sin(a));
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

fn wrap_pi(a: f64) -> f64 {
    let w = math::wrap_angle(a);
    if w > PI + 1.0 {
        w - 2.0 * PI
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn position(p: &[[f64; 3]], s: &Surface, t: TrackedPoint) -> [f64; 3] {
        let vs = s.mesh().face_vertices(t.face);
        let mut x = [0.0; 3];
        for k in 0..3 {
            for c in 0..3 {
                x[c] += t.bary[k] * p[vs[k].idx()][c];
            }
        }
        x
    }

    #[test]
    fn edge_vector_lands_on_tip() {
        let (p, f) = shapes::bumpy_sphere(4, 0.1, 2.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        for h in s.mesh().outgoing(Vertex(7)) {
            let out = trace_geodesic(&s, Vertex(7), s.edge_vector(h));
            let x = position(&p, &s, out.end);
            let y = p[s.mesh().tip(h).idx()];
            for c in 0..3 {
                assert!((x[c] - y[c]).abs() < 1e-9);
            }
            assert!((out.length - s.length(h)).abs() < 1e-9);
        }
    }

    #[test]
    fn straight_line_on_grid() {
        let (p, f) = shapes::jittered_grid(9, 9, || 0.17, || true);
        let s = Surface::from_positions(&p, &f).unwrap();
        let v = Vertex(40);
        let h = s.mesh().halfedge(v);
        let e = p[s.mesh().tip(h).idx()];
        let ref_angle = (e[1] - p[40][1]).atan2(e[0] - p[40][0]);
        for k in 0..12 {
            let a = 0.5 * k as f64 + 0.1;
            let len = 0.3;
            let out = trace_geodesic(&s, v, TangentVec::from_polar(len, s.signpost(h) + a));
            assert!(!out.hit_boundary);
            assert!((out.length - len).abs() < 1e-9);
            let x = position(&p, &s, out.end);
            let want = [p[40][0] + len * (ref_angle + a).cos(), p[40][1] + len * (ref_angle + a).sin()];
            assert!((x[0] - want[0]).abs() < 1e-9 && (x[1] - want[1]).abs() < 1e-9, "{k}");
        }
    }

    #[test]
    fn stops_at_boundary() {
        let (p, f) = shapes::grid(3, 3, 1.0, 1.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let out = trace_geodesic(&s, Vertex(4), TangentVec::from_polar(5.0, 0.3));
        assert!(out.hit_boundary);
        assert!(out.length < 1.0);
    }
}
