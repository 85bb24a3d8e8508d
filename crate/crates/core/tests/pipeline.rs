use ice_core::solvers::{self, Gauge, LowRankDistance};
use ice_core::{shapes, CoarsenConfig, Coarsener, Surface, TangentVec, Vertex};
use num_complex::Complex64;

fn planar_frame(s: &Surface, p: &[[f64; 3]], v: Vertex) -> f64 {
    let m = s.mesh();
    let h = m.halfedge(v);
    let (a, b) = (p[v.idx()], p[m.tip(h).idx()]);
    (b[1] - a[1]).atan2(b[0] - a[0]) - s.signpost(h) / s.angle_scale(v)
}

#[test]
fn vector_prolongation_keeps_parallel_field_on_grid() {
    let mut k = 0;
    let (p, f) = shapes::jittered_grid(
        9,
        9,
        || {
            k += 1;
            0.25 * ((k as f64) * 1.7).sin()
        },
        || false,
    );
    let s = Surface::from_positions(&p, &f).unwrap();
    let fixed: Vec<usize> = s.mesh().vertices().filter(|&v| s.mesh().is_boundary_vertex(v)).map(|v| v.idx()).collect();
    let mut c = Coarsener::new(s, CoarsenConfig { target: fixed.len(), fixed, ..Default::default() }).unwrap();
    c.run();
    let dir = 0.7f64;
    let coarse = c.surface();
    let field: Vec<TangentVec> =
        coarse.mesh().vertices().map(|v| TangentVec::from_polar(2.0, dir - planar_frame(coarse, &p, v))).collect();
    let out = c.vector_prolongation(1).unwrap().apply(&field).unwrap();
    for (row, v) in c.input().mesh().vertices().enumerate() {
        let expected = Complex64::from_polar(2.0, dir - planar_frame(c.input(), &p, v));
        assert!((out[row].0 - expected).norm() < 1e-6, "vertex {}", v.0);
    }
}

#[test]
fn coarse_poisson_approximates_fine_solve() {
    let (p, f) = shapes::icosphere(8);
    let fine = Surface::from_positions(&p, &f).unwrap();
    let (l, m) = solvers::cotan_laplacian(&fine);
    let mut b: Vec<f64> = p.iter().zip(&m).map(|(q, w)| w * q[2]).collect();
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    b.iter_mut().for_each(|x| *x -= mean);
    let u = solvers::solve_poisson(&l, &b, &Gauge::MeanZero).unwrap();
    let mut c = Coarsener::new(fine, CoarsenConfig { target: 200, ..Default::default() }).unwrap();
    c.run();
    let (lc, _) = solvers::cotan_laplacian(c.surface());
    let uc = solvers::poisson_coarse(&c.prolongation().unwrap(), &lc, &b, &Gauge::MeanZero).unwrap();
    let err: f64 = u.iter().zip(&uc).zip(&m).map(|((a, b), w)| (a - b) * (a - b) * w).sum::<f64>().sqrt();
    let norm: f64 = u.iter().zip(&m).map(|(a, w)| a * a * w).sum::<f64>().sqrt();
    assert!(err / norm < 0.05, "{}", err / norm);
}

#[test]
fn low_rank_distance_matches_on_coarse_vertices() {
    let (p, f) = shapes::icosphere(6);
    let fine = Surface::from_positions(&p, &f).unwrap();
    let mut c = Coarsener::new(fine, CoarsenConfig { target: 60, ..Default::default() }).unwrap();
    c.run();
    let approx = LowRankDistance::new(c.prolongation().unwrap(), c.surface()).unwrap();
    let survivors: Vec<Vertex> = c.surface().mesh().vertices().collect();
    let d = solvers::dijkstra(c.surface(), &[survivors[0]]);
    for &v in &survivors {
        assert!((approx.entry(survivors[0].idx(), v.idx()) - d[v.idx()]).abs() < 1e-9);
    }
}
