//! Procedural test surfaces.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

pub type Positions = Vec<[f64; 3]>;
pub type Triangles = Vec<[usize; 3]>;

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = math::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    [p[0] / n, p[1] / n, p[2] / n]
}

pub fn regular_tetrahedron() -> (Positions, Triangles) {
    let s = 1.0 / (2.0 * core::f64::consts::SQRT_2);
    let p = vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    (p, vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
}

fn icosahedron() -> (Positions, Triangles) {
    let t = (1.0 + math::sqrt(5.0)) / 2.0;
    let p = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (p.into_iter().map(normalize).collect(), f)
}

/// Unit geodesic sphere: each icosahedron face is split into `freq²`
/// triangles, giving `10·freq² + 2` vertices.
pub fn icosphere(freq: usize) -> (Positions, Triangles) {
    assert!(freq >= 1);
    let (base, bf) = icosahedron();
    let n = freq as u32;
    let mut index: BTreeMap<Vec<(u32, u32)>, usize> = BTreeMap::new();
    let mut pos = Vec::new();
    let mut faces = Vec::new();
    for f in &bf {
        let mut id = |i: u32, j: u32| -> usize {
            // weights (n - i - j, i, j) on corners f[0], f[1], f[2]
            let w = [(f[0] as u32, n - i - j), (f[1] as u32, i), (f[2] as u32, j)];
            let mut key: Vec<(u32, u32)> = w.iter().copied().filter(|&(_, x)| x > 0).collect();
            key.sort();
            *index.entry(key).or_insert_with(|| {
                let mut p = [0.0; 3];
                for &(c, x) in &w {
                    for k in 0..3 {
                        p[k] += base[c as usize][k] * x as f64 / n as f64;
                    }
                }
                pos.push(normalize(p));
                pos.len() - 1
            })
        };
        for i in 0..n {
            for j in 0..n - i {
                let a = id(i, j);
                let b = id(i + 1, j);
                let c = id(i, j + 1);
                faces.push([a, b, c]);
                if i + j + 1 < n {
                    let d = id(i + 1, j + 1);
                    faces.push([b, d, c]);
                }
            }
        }
    }
    (pos, faces)
}

/// Icosphere with every vertex moved to radius `radius(p)` along its
/// direction `p`.
pub fn sphere_with_radius(freq: usize, mut radius: impl FnMut([f64; 3]) -> f64) -> (Positions, Triangles) {
    let (mut p, f) = icosphere(freq);
    for q in &mut p {
        let r = radius(*q);
        *q = [q[0] * r, q[1] * r, q[2] * r];
    }
    (p, f)
}

/// Smooth bumps of relative height `amp` with `waves` oscillations.
pub fn bumpy_sphere(freq: usize, amp: f64, waves: f64) -> (Positions, Triangles) {
    sphere_with_radius(freq, |p| {
        1.0 + amp * math::sin(waves * p[0]) * math::sin(waves * p[1]) * math::sin(waves * p[2])
    })
}

/// Torus with `nu` segments around the axis and `nv` around the tube.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> (Positions, Triangles) {
    let mut p = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let a = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let b = 2.0 * PI * j as f64 / nv as f64;
            let r = major + minor * math::cos(b);
            p.push([r * math::cos(a), r * math::sin(a), minor * math::sin(b)]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut f = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    (p, f)
}

/// Planar `nx × ny` vertex grid over `[0, width] × [0, height]`, every quad
/// split along the same diagonal.
pub fn grid(nx: usize, ny: usize, width: f64, height: f64) -> (Positions, Triangles) {
    assert!(nx >= 2 && ny >= 2);
    let mut p = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            p.push([width * i as f64 / (nx - 1) as f64, height * j as f64 / (ny - 1) as f64, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut f = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (p, f)
}

/// Grid whose interior vertices are displaced by `offset()` (called twice
/// per interior vertex, in index order, for x then y) times the spacing,
/// and whose quads are split along the diagonal picked by `flip()`.
pub fn jittered_grid(
    nx: usize,
    ny: usize,
    mut offset: impl FnMut() -> f64,
    mut flip: impl FnMut() -> bool,
) -> (Positions, Triangles) {
    let (mut p, _) = grid(nx, ny, 1.0, 1.0);
    let (dx, dy) = (1.0 / (nx - 1) as f64, 1.0 / (ny - 1) as f64);
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let q = &mut p[j * nx + i];
            q[0] += offset() * dx;
            q[1] += offset() * dy;
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut f = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if flip() {
                f.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                f.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    (p, f)
}

/// Flat annulus with `nr` rings of `na` vertices between radii `r0 < r1`.
pub fn annulus(nr: usize, na: usize, r0: f64, r1: f64) -> (Positions, Triangles) {
    assert!(nr >= 2 && na >= 3);
    let mut p = Vec::with_capacity(nr * na);
    for i in 0..nr {
        let r = r0 + (r1 - r0) * i as f64 / (nr - 1) as f64;
        for j in 0..na {
            // stagger alternate rings for better shaped triangles
            let a = 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / na as f64;
            p.push([r * math::cos(a), r * math::sin(a), 0.0]);
        }
    }
    let id = |i: usize, j: usize| i * na + (j % na);
    let mut f = Vec::new();
    for i in 0..nr - 1 {
        for j in 0..na {
            if i % 2 == 0 {
                f.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                f.push([id(i, j + 1), id(i + 1, j), id(i + 1, j + 1)]);
            } else {
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            }
        }
    }
    (p, f)
}

/// Regular hexagon with unit spokes around vertex 0.
pub fn hexagon_fan() -> (Positions, Triangles) {
    let mut p = vec![[0.0, 0.0, 0.0]];
    for k in 0..6 {
        let a = PI / 3.0 * k as f64;
        p.push([math::cos(a), math::sin(a), 0.0]);
    }
    let f = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    (p, f)
}

/// Open square pyramid: apex 0 joined by unit edges to the corners of a
/// unit square (vertices 1..=4), which form the boundary.
pub fn square_pyramid() -> (Positions, Triangles) {
    let h = math::sqrt(0.5);
    let p = vec![[0.0, 0.0, h], [0.5, 0.5, 0.0], [-0.5, 0.5, 0.0], [-0.5, -0.5, 0.0], [0.5, -0.5, 0.0]];
    (p, vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]])
}

/// Closed octahedron-like double pyramid with `n` equator vertices; apex
/// heights `top` and `bottom`.
pub fn bipyramid(n: usize, top: f64, bottom: f64) -> (Positions, Triangles) {
    let mut p = vec![[0.0, 0.0, top], [0.0, 0.0, -bottom]];
    for k in 0..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        p.push([math::cos(a), math::sin(a), 0.0]);
    }
    let mut f = Vec::new();
    for k in 0..n {
        let (a, b) = (2 + k, 2 + (k + 1) % n);
        f.push([0, a, b]);
        f.push([1, b, a]);
    }
    (p, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Surface;

    #[test]
    fn icosphere_counts() {
        for (freq, v) in [(1, 12), (2, 42), (8, 642), (16, 2562)] {
            let (p, f) = icosphere(freq);
            assert_eq!(p.len(), v);
            assert_eq!(f.len(), 2 * v - 4);
            let s = Surface::from_positions(&p, &f).unwrap();
            assert_eq!(s.mesh().euler_characteristic(), 2);
            s.audit().unwrap();
        }
    }

    #[test]
    fn torus_and_annulus_topology() {
        let (p, f) = torus(24, 12, 2.0, 0.7);
        let s = Surface::from_positions(&p, &f).unwrap();
        assert_eq!(s.mesh().euler_characteristic(), 0);
        assert!(s.gauss_bonnet_defect().abs() < 1e-10);
        let (p, f) = annulus(5, 24, 1.0, 2.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        assert_eq!(s.mesh().euler_characteristic(), 0);
        assert!(s.gauss_bonnet_defect().abs() < 1e-10);
        s.audit().unwrap();
    }
}
