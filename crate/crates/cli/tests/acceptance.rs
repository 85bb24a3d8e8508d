//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::process::{self, Command};
use std::time::Instant;

use ice_cli::obj::write_obj;
use ice_core::coarsen::StopReason;
use ice_core::flip::DELAUNAY_TOL;
use ice_core::metric::{ChannelConfig, ChannelKind, ChannelState};
use ice_core::solvers::{self, Gauge, LowRankDistance, Multigrid};
use ice_core::sparse::Csr;
use ice_core::{shapes, CoarsenConfig, Coarsener, Surface, TangentVec, Tracker, Vertex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Mesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!("criterion {n:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

/// Facts gathered from one coarsening run of the shared suite.
struct Run {
    name: &'static str,
    max_defect: f64,
    delaunay_violations: usize,
    cost_gap: f64,
    newton: Vec<u16>,
    skipped: usize,
    audit: bool,
    target_reached: bool,
    worst_bary: f64,
    worst_bary_sum: f64,
    replay_exact: bool,
    worst_row_sum: f64,
    worst_constant: f64,
}

fn run_suite_mesh(name: &'static str, (p, f): Mesh, fraction: f64) -> Run {
    let s = Surface::from_positions(&p, &f).unwrap();
    let n = s.mesh().num_vertices();
    let target = (n as f64 * fraction).round() as usize;
    let mut c = Coarsener::new(s, CoarsenConfig { target, ..Default::default() }).unwrap();
    let mut max_defect = c.surface().gauss_bonnet_defect().abs();
    while c.step().is_some() {
        max_defect = max_defect.max(c.surface().gauss_bonnet_defect().abs());
    }
    let sm = c.summary().clone();
    let coarse = c.surface();
    let tracker = c.tracker().unwrap();
    let mut worst_bary = 0.0f64;
    let mut worst_bary_sum = 0.0f64;
    for q in tracker.points() {
        worst_bary = worst_bary.min(q.bary.iter().copied().fold(f64::INFINITY, f64::min));
        worst_bary_sum = worst_bary_sum.max((q.bary.iter().sum::<f64>() - 1.0).abs());
    }
    let mut replayed = Tracker::for_vertices(c.input());
    replayed.replay(c.records());
    let replay_exact = replayed.points().iter().zip(tracker.points()).all(|(a, b)| {
        a.face == b.face && a.bary.iter().zip(&b.bary).all(|(x, y)| x.to_bits() == y.to_bits())
    }) && replayed.points().len() == tracker.points().len();
    let pr = c.prolongation().unwrap();
    let worst_row_sum = pr.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    let ones = pr.apply(&vec![1.0; pr.cols]).unwrap();
    let worst_constant = ones.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    Run {
        name,
        max_defect,
        delaunay_violations: coarse.delaunay_violations(DELAUNAY_TOL),
        cost_gap: sm.max_cost_gap,
        newton: sm.newton_iterations,
        skipped: sm.skipped,
        audit: coarse.audit().is_ok(),
        target_reached: sm.stop == StopReason::TargetReached && coarse.mesh().num_vertices() <= target,
        worst_bary,
        worst_bary_sum,
        replay_exact,
        worst_row_sum,
        worst_constant,
    }
}

fn criterion_3(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut worst_mass = 0.0f64;
    let mut curvature_cost_zero = true;
    let mut meshes = 0;
    let mut removals = 0;
    while meshes < 120 {
        let nx = rng.gen_range(4..=14);
        let ny = rng.gen_range(4..=14);
        let jitter: Vec<f64> = (0..2 * nx * ny).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let diagonals: Vec<bool> = (0..nx * ny).map(|_| rng.gen_bool(0.5)).collect();
        let (mut a, mut b) = (jitter.into_iter(), diagonals.into_iter());
        let (p, f) = shapes::jittered_grid(nx, ny, || a.next().unwrap(), || b.next().unwrap());
        let corners = [0, nx - 1, nx * (ny - 1), nx * ny - 1];
        let n = p.len();
        let mut s = Surface::from_positions(&p, &f).unwrap();
        let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let cfg = ChannelConfig { w_curvature: 0.0, w_area: 0.0, user: vec![(masses.clone(), 1.0)] };
        let mut user = ChannelState::new(&s, &cfg).unwrap();
        let mut curv = ChannelState::new(&s, &ChannelConfig::default()).unwrap();
        // share[k][j]: fraction of the mass of fine vertex k now held by j
        let mut share = vec![vec![0.0; n]; n];
        for (k, row) in share.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        let mut order: Vec<usize> = (0..n).filter(|i| !corners.contains(i)).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for &i in &order {
            let v = Vertex(i as u32);
            let Ok((_, plan)) = s.evaluate_removal(v) else { continue };
            if curv.memory_cost(v, &plan) != 0.0 {
                curvature_cost_zero = false;
            }
            let Ok(out) = s.remove_vertex(v) else { continue };
            removals += 1;
            user.apply(v, &out.plan);
            curv.apply(v, &out.plan);
            for row in share.iter_mut() {
                let x = row[i];
                if x != 0.0 {
                    for t in &out.plan.neighbors {
                        row[t.vertex.idx()] += t.alpha * x;
                    }
                    row[i] = 0.0;
                }
            }
            let ch = &user.channels[0];
            assert_eq!(ch.kind, ChannelKind::User(0));
            let m = s.mesh();
            for j in m.vertices() {
                let mut mass = 0.0;
                let mut com = [0.0; 2];
                for k in 0..n {
                    let w = share[k][j.idx()] * masses[k];
                    mass += w;
                    com[0] += w * p[k][0];
                    com[1] += w * p[k][1];
                }
                worst_mass = worst_mass.max((mass - ch.mass[j.idx()]).abs());
                let x = p[j.idx()];
                let d = Complex64::new(com[0] / mass - x[0], com[1] / mass - x[1]);
                let h = m.halfedge(j);
                let tip = p[m.tip(h).idx()];
                let frame = Complex64::new(tip[0] - x[0], tip[1] - x[1]).arg() - s.signpost(h) / s.angle_scale(j);
                let expected = d * Complex64::from_polar(1.0, -frame);
                worst = worst.max((expected - ch.error[j.idx()]).norm());
            }
        }
        meshes += 1;
    }
    r.line(
        3,
        worst < 1e-9 && worst_mass < 1e-9 && curvature_cost_zero,
        format!(
            "{meshes} flat meshes, {removals} removals: error vector deviation {worst:.2e}, mass deviation {worst_mass:.2e}, curvature cost identically zero: {curvature_cost_zero}"
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let (p, f) = shapes::icosphere(71);
    let s = Surface::from_positions(&p, &f).unwrap();
    let n = s.mesh().num_vertices();
    let start = Instant::now();
    let mut c = Coarsener::new(s, CoarsenConfig { target: n / 20, ..Default::default() }).unwrap();
    let mut times = Vec::new();
    let mut last = Instant::now();
    while c.step().is_some() {
        let now = Instant::now();
        times.push((now - last).as_secs_f64());
        last = now;
    }
    let total = start.elapsed().as_secs_f64();
    let rate = times.len() as f64 / total;
    let k = times.len() / 10;
    let deciles: Vec<f64> = (0..10).map(|d| times[d * k..(d + 1) * k].iter().sum::<f64>() / k as f64).collect();
    let lo = deciles.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = deciles.iter().copied().fold(0.0, f64::max);
    r.line(
        6,
        rate >= 1000.0 && hi / lo < 3.0,
        format!("{n} vertices, {} removals in {total:.2}s: {rate:.0}/s, per-removal time spread across deciles {:.2}x", times.len(), hi / lo),
    );
}

fn vector_annulus() -> (f64, usize) {
    let (p, f) = shapes::annulus(5, 32, 1.0, 2.0);
    let s = Surface::from_positions(&p, &f).unwrap();
    let fixed: Vec<usize> = s.mesh().vertices().filter(|&v| s.mesh().is_boundary_vertex(v)).map(|v| v.idx()).collect();
    let target = fixed.len();
    let mut c = Coarsener::new(s, CoarsenConfig { target, fixed, ..Default::default() }).unwrap();
    c.run();
    let frame = |s: &Surface, v: Vertex| {
        let m = s.mesh();
        let h = m.halfedge(v);
        let (a, b) = (p[v.idx()], p[m.tip(h).idx()]);
        (b[1] - a[1]).atan2(b[0] - a[0]) - s.signpost(h) / s.angle_scale(v)
    };
    let coarse = c.surface();
    let field: Vec<TangentVec> = coarse.mesh().vertices().map(|v| TangentVec::from_polar(1.0, -frame(coarse, v))).collect();
    let pv = c.vector_prolongation(1).unwrap();
    let out = pv.apply(&field).unwrap();
    let input = c.input();
    let mut worst = 0.0f64;
    for (row, v) in input.mesh().vertices().enumerate() {
        let expected = Complex64::from_polar(1.0, -frame(input, v));
        worst = worst.max((out[row].0 - expected).norm());
    }
    (worst, coarse.mesh().num_vertices())
}

fn mass_norm(x: &[f64], m: &[f64]) -> f64 {
    x.iter().zip(m).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
}

fn centered(x: &[f64], m: &[f64]) -> Vec<f64> {
    let mean = x.iter().zip(m).map(|(a, b)| a * b).sum::<f64>() / m.iter().sum::<f64>();
    x.iter().map(|a| a - mean).collect()
}

fn smooth_rhs(p: &[[f64; 3]], m: &[f64]) -> Vec<f64> {
    let b: Vec<f64> = p.iter().zip(m).map(|(q, w)| w * (q[2] + q[0] * q[1] + 0.5 * q[0])).collect();
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    b.iter().map(|x| x - mean).collect()
}

fn criterion_10(r: &mut Report) {
    let (p, f) = shapes::icosphere(16);
    let fine = Surface::from_positions(&p, &f).unwrap();
    let (l, m) = solvers::cotan_laplacian(&fine);
    let b = smooth_rhs(&p, &m);
    let u = solvers::solve_poisson(&l, &b, &Gauge::MeanZero).unwrap();
    let un = mass_norm(&centered(&u, &m), &m);
    let mut errors = Vec::new();
    for size in [100, 200, 400] {
        let mut c = Coarsener::new(fine.clone(), CoarsenConfig { target: size, ..Default::default() }).unwrap();
        c.run();
        let (lc, _) = solvers::cotan_laplacian(c.surface());
        let uc = solvers::poisson_coarse(&c.prolongation().unwrap(), &lc, &b, &Gauge::MeanZero).unwrap();
        let e: Vec<f64> = u.iter().zip(&uc).map(|(a, b)| a - b).collect();
        errors.push(mass_norm(&centered(&e, &m), &m) / un);
    }
    let ok = errors.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    r.line(10, ok, format!("{} vertices, relative L2 error at 100/200/400 coarse vertices: {:.3e} {:.3e} {:.3e}", p.len(), errors[0], errors[1], errors[2]));
}

fn drop_first(a: &Csr, p: &Csr) -> (Csr, Csr) {
    let mut ta = Vec::new();
    for i in 1..a.rows {
        ta.extend(a.row(i).filter(|e| e.0 > 0).map(|(j, x)| (i - 1, j - 1, x)));
    }
    let mut tp = Vec::new();
    for i in 1..p.rows {
        tp.extend(p.row(i).map(|(j, x)| (i - 1, j, x)));
    }
    (Csr::from_triplets(a.rows - 1, a.cols - 1, &ta), Csr::from_triplets(p.rows - 1, p.cols, &tp))
}

fn criterion_11(r: &mut Report) {
    let (p, f) = shapes::icosphere(32);
    let fine = Surface::from_positions(&p, &f).unwrap();
    let n = fine.mesh().num_vertices();
    let mut sizes = vec![n];
    let mut prolongations = Vec::new();
    let mut current = fine.clone();
    for _ in 0..2 {
        let target = sizes.last().unwrap() / 4;
        let mut c = Coarsener::new(current, CoarsenConfig { target, ..Default::default() }).unwrap();
        c.run();
        prolongations.push(c.prolongation().unwrap().to_csr());
        current = c.surface().compacted().0;
        sizes.push(current.mesh().num_vertices());
    }
    let (l, m) = solvers::cotan_laplacian(&fine);
    let b = smooth_rhs(&p, &m);
    let (a, p0) = drop_first(&l, &prolongations[0]);
    let mut ps = vec![p0];
    ps.push(prolongations[1].clone());
    let mg = Multigrid::new(a, ps).unwrap();
    match mg.solve(&b[1..], 1e-8, 30) {
        Ok(out) => {
            let worst = out.residuals.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            r.line(
                11,
                worst < 0.5,
                format!(
                    "levels {:?}: relative residual {:.2e} after {} V-cycles, worst per-cycle reduction {worst:.3}",
                    sizes,
                    out.residuals.last().unwrap(),
                    out.cycles
                ),
            );
        }
        Err(e) => r.line(11, false, format!("levels {sizes:?}: {e}")),
    }
}

fn criterion_12(r: &mut Report) {
    let (p, f) = shapes::icosphere(14);
    let fine = Surface::from_positions(&p, &f).unwrap();
    let n = fine.mesh().num_vertices();
    let d = solvers::all_pairs_dijkstra(&fine);
    let mut c = Coarsener::new(fine, CoarsenConfig { target: n / 10, ..Default::default() }).unwrap();
    c.run();
    let approx = LowRankDistance::new(c.prolongation().unwrap(), c.surface()).unwrap();
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        let row = approx.row(i);
        for j in 0..n {
            if i != j {
                sum += (row[j] - d[i][j]).abs() / d[i][j];
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    r.line(12, mean < 0.1, format!("{n} vertices to {}: mean relative error {:.2}%", c.surface().mesh().num_vertices(), 100.0 * mean));
}

fn criterion_13(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let (p, f) = shapes::bumpy_sphere(10, 0.1, 4.0);
    fs::write(dir.path().join("in.obj"), write_obj(&p, &f)).unwrap();
    for prefix in ["a", "b"] {
        let status = Command::new(env!("CARGO_BIN_EXE_ice"))
            .current_dir(dir.path())
            .args(["simplify", "in.obj", "--target", "80", "--w-area", "0.25", "--out-prefix", prefix])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut same = true;
    let mut bytes = 0;
    for ext in ["coarse", "map", "pmat"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        bytes += a.len();
        same &= a == b;
    }
    r.line(13, same, format!("two CLI runs, {bytes} bytes of .coarse/.map/.pmat compared: identical: {same}"));
}

fn main() {
    let mut r = Report { failed: 0 };
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let suite: Vec<(&'static str, Mesh)> = vec![
        ("icosphere 642", shapes::icosphere(8)),
        ("icosphere 2562", shapes::icosphere(16)),
        ("icosphere 10242", shapes::icosphere(32)),
        ("torus 2048", shapes::torus(64, 32, 1.0, 0.4)),
        ("bumpy sphere 2562", shapes::bumpy_sphere(16, 0.15, 5.0)),
    ];
    let mut runs: Vec<Run> = suite.into_iter().map(|(name, mesh)| run_suite_mesh(name, mesh, 0.05)).collect();
    let robust = vec![
        run_suite_mesh("icosphere 10242 to 1%", shapes::icosphere(32), 0.01),
        run_suite_mesh("noisy sphere 10242 to 1%", shapes::sphere_with_radius(32, |_| 1.0 + rng.gen_range(-0.01..0.01)), 0.01),
    ];

    let defect = runs.iter().map(|x| x.max_defect).fold(0.0, f64::max);
    let names: Vec<&str> = runs.iter().map(|x| x.name).collect();
    r.line(1, defect < 1e-7, format!("{} meshes to 5% ({}): worst |sum K - 2 pi chi| {defect:.2e}", runs.len(), names.join(", ")));

    runs.extend(robust);
    let violations: usize = runs.iter().map(|x| x.delaunay_violations).sum();
    r.line(2, violations == 0, format!("{violations} non-Delaunay interior edges after {} runs", runs.len()));

    criterion_3(&mut r);

    let gap = runs.iter().map(|x| x.cost_gap).fold(0.0, f64::max);
    r.line(4, gap < 1e-12, format!("largest gap between the two cost forms at initialization {gap:.2e}"));

    let mut newton: Vec<u16> = runs.iter().flat_map(|x| x.newton.iter().copied()).collect();
    newton.sort_unstable();
    let median = newton[newton.len() / 2];
    r.line(5, median <= 8, format!("median Newton iterations {median} over {} flattenings (max {})", newton.len(), newton.last().unwrap()));

    criterion_6(&mut r);

    let hard = &runs[runs.len() - 2..];
    let ok7 = hard.iter().all(|x| x.skipped == 0 && x.audit && x.target_reached);
    let detail: Vec<String> = hard.iter().map(|x| format!("{}: skipped {}, audit {}, target reached {}", x.name, x.skipped, x.audit, x.target_reached)).collect();
    r.line(7, ok7, detail.join("; "));

    let bary = runs.iter().map(|x| x.worst_bary).fold(0.0, f64::min);
    let bsum = runs.iter().map(|x| x.worst_bary_sum).fold(0.0, f64::max);
    let replay = runs.iter().all(|x| x.replay_exact);
    r.line(8, bary >= 0.0 && bsum < 1e-9 && replay, format!("smallest barycentric {bary:.2e}, worst sum error {bsum:.2e}, replay bit-exact: {replay}"));

    let rows = runs.iter().map(|x| x.worst_row_sum).fold(0.0, f64::max);
    let constant = runs.iter().map(|x| x.worst_constant).fold(0.0, f64::max);
    let (vec_err, coarse_n) = vector_annulus();
    r.line(
        9,
        rows < 1e-12 && constant < 1e-12 && vec_err < 1e-6,
        format!("row sum error {rows:.2e}, constant error {constant:.2e}, unit field on flat annulus ({coarse_n} coarse vertices) error {vec_err:.2e}"),
    );

    criterion_10(&mut r);
    criterion_11(&mut r);
    criterion_12(&mut r);
    criterion_13(&mut r);

    println!("acceptance: {} of 13 criteria failed ({:.1}s)", r.failed, start.elapsed().as_secs_f64());
    if r.failed > 0 {
        process::exit(1);
    }
}
