use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Surface;
use crate::mapping::compact_index;
use crate::sparse::Csr;

/// Positive semidefinite cotan Laplacian `L` and lumped mass diagonal `M`,
/// indexed by compact vertex order.
pub fn cotan_laplacian(surface: &Surface) -> (Csr, Vec<f64>) {
    let m = surface.mesh();
    let (col, n) = compact_index(surface);
    let mut t = Vec::with_capacity(4 * m.num_edges());
    for h in m.edges() {
        let (i, j) = (col[m.tail(h).idx()] as usize, col[m.tip(h).idx()] as usize);
        if i == j {
            continue;
        }
        let w = surface.cotan_weight(h);
        t.push((i, j, -w));
        t.push((j, i, -w));
        t.push((i, i, w));
        t.push((j, j, w));
    }
    let mut mass = vec![0.0; n];
    for f in m.faces() {
        let a = surface.face_area(f) / 3.0;
        for v in m.face_vertices(f) {
            mass[col[v.idx()] as usize] += a;
        }
    }
    (Csr::from_triplets(n, n, &t), mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn equilateral_weights() {
        let s = Surface::from_positions(
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.75f64.sqrt(), 0.0]],
            &[[0, 1, 2]],
        )
        .unwrap();
        let (l, m) = cotan_laplacian(&s);
        let w = 0.5 / 3f64.sqrt();
        assert!((l.get(0, 1) + w).abs() < 1e-15);
        assert!((l.get(0, 0) - 2.0 * w).abs() < 1e-15);
        let area = 0.75f64.sqrt() / 2.0;
        assert!((m[2] - area / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constants_in_kernel() {
        let (p, f) = shapes::icosphere(6);
        let s = Surface::from_positions(&p, &f).unwrap();
        let (l, _) = cotan_laplacian(&s);
        let y = l.mul_vec(&vec![1.0; l.rows]).unwrap();
        assert!(y.iter().all(|x| x.abs() < 1e-12));
        for i in 0..l.rows {
            for (j, x) in l.row(i) {
                if i != j {
                    assert!(x <= 1e-10);
                    assert!((x - l.get(j, i)).abs() < 1e-12);
                }
            }
        }
    }
}
