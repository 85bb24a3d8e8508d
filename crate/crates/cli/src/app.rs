//! The `simplify` pipeline, independent of argument parsing and file I/O.

use std::collections::HashMap;
use std::fmt::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ice_core::coarsen::{Anisotropy, StopReason};
use ice_core::flip::DELAUNAY_TOL;
use ice_core::metric::ChannelConfig;
use ice_core::solvers::{self, Gauge, LowRankDistance, Multigrid};
use ice_core::sparse::Csr;
use ice_core::{CoarsenConfig, Coarsener, Surface, TangentVec, Vertex};

use crate::field::to_tangent;
use crate::obj::Obj;
use crate::output;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demo {
    Poisson,
    Multigrid,
    Geodesic,
}

#[derive(Clone, Debug)]
pub struct SimplifyOptions {
    pub target: usize,
    pub per_component: bool,
    pub w_curvature: f64,
    pub w_area: f64,
    pub masses: Option<Vec<f64>>,
    pub w_masses: f64,
    pub fixed: Vec<usize>,
    pub aniso_tau: Option<f64>,
    pub aniso_field: Option<Vec<(usize, [f64; 3])>>,
    pub lengths: Option<HashMap<(usize, usize), f64>>,
    pub solve: Option<Demo>,
    pub deterministic_report: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            target: 0,
            per_component: false,
            w_curvature: 1.0,
            w_area: 0.0,
            masses: None,
            w_masses: 1.0,
            fixed: Vec::new(),
            aniso_tau: None,
            aniso_field: None,
            lengths: None,
            solve: None,
            deterministic_report: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub coarse: String,
    pub map: String,
    pub pmat: String,
    pub vec_pmat: String,
    pub viz: String,
    pub report: String,
}

fn build_surface(obj: &Obj, lengths: Option<&HashMap<(usize, usize), f64>>) -> Result<Surface> {
    let s = match lengths {
        None => Surface::from_positions(&obj.positions, &obj.faces)?,
        Some(map) => {
            let p = &obj.positions;
            Surface::from_edge_lengths(p.len(), &obj.faces, |i, j| match map.get(&(i.min(j), i.max(j))) {
                Some(&l) => l,
                None => {
                    let d = [p[i][0] - p[j][0], p[i][1] - p[j][1], p[i][2] - p[j][2]];
                    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
                }
            })?
        }
    };
    Ok(s)
}

pub fn simplify(obj: &Obj, opts: &SimplifyOptions) -> Result<Artifacts> {
    let start = Instant::now();
    let surface = build_surface(obj, opts.lengths.as_ref()).context("invalid input mesh")?;
    let n = surface.mesh().vertex_capacity();
    let anisotropy = match (opts.aniso_tau, &opts.aniso_field) {
        (None, None) => None,
        (Some(tau), Some(records)) => {
            let mut field = vec![TangentVec::ZERO; n];
            for &(i, u) in records {
                if i >= n {
                    bail!("anisotropy field references vertex {i}, but the mesh has {n}");
                }
                field[i] = to_tangent(&surface, &obj.positions, Vertex(i as u32), u);
            }
            Some(Anisotropy { tau, field })
        }
        _ => bail!("--aniso-tau and --aniso-field must be given together"),
    };
    let mut user = Vec::new();
    if let Some(m) = &opts.masses {
        user.push((m.clone(), opts.w_masses));
    }
    let cfg = CoarsenConfig {
        target: opts.target,
        per_component: opts.per_component,
        fixed: opts.fixed.clone(),
        channels: ChannelConfig { w_curvature: opts.w_curvature, w_area: opts.w_area, user },
        anisotropy,
        track: true,
    };
    let mut c = Coarsener::new(surface, cfg).context("invalid configuration")?;
    c.run();
    let elapsed = start.elapsed();
    let coarse = c.surface();
    let tracker = c.tracker().expect("tracking is on");
    let p = c.prolongation().expect("tracking is on");
    let pv = c.vector_prolongation(1).expect("tracking is on");

    let mut report = String::new();
    let sm = c.summary();
    let input = c.input();
    let mut newton = sm.newton_iterations.clone();
    newton.sort_unstable();
    let w = &mut report;
    writeln!(w, "input_vertices {}", sm.initial_vertices)?;
    writeln!(w, "input_faces {}", input.mesh().num_faces())?;
    writeln!(w, "euler_characteristic {}", input.mesh().euler_characteristic())?;
    writeln!(w, "target {}", opts.target)?;
    writeln!(w, "coarse_vertices {}", coarse.mesh().num_vertices())?;
    writeln!(w, "coarse_faces {}", coarse.mesh().num_faces())?;
    writeln!(w, "removals {}", sm.removals)?;
    writeln!(w, "skipped {}", sm.skipped)?;
    let stop = match sm.stop {
        StopReason::TargetReached => "target reached",
        StopReason::AllInfinite => "all remaining vertices have infinite cost",
        StopReason::Running => "running",
    };
    writeln!(w, "stop {stop}")?;
    writeln!(w, "initial_delaunay_flips {}", sm.initial_delaunay_flips)?;
    writeln!(w, "delaunay_flips {}", sm.delaunay_flips)?;
    if !newton.is_empty() {
        let mean = newton.iter().map(|&x| x as f64).sum::<f64>() / newton.len() as f64;
        writeln!(w, "newton_flattens {}", newton.len())?;
        writeln!(w, "newton_median {}", newton[newton.len() / 2])?;
        writeln!(w, "newton_mean {mean:.4}")?;
        writeln!(w, "newton_max {}", newton[newton.len() - 1])?;
    }
    writeln!(w, "cost_form_gap {:.3e}", sm.max_cost_gap)?;
    writeln!(w, "gauss_bonnet_defect {:.3e}", coarse.gauss_bonnet_defect())?;
    writeln!(w, "delaunay_violations {}", coarse.delaunay_violations(DELAUNAY_TOL))?;
    let st = tracker.stats();
    writeln!(w, "tracking_snapped {}", st.snapped)?;
    writeln!(w, "tracking_clamped {}", st.clamped)?;
    writeln!(w, "vector_fallback_rows {}", pv.fallback_rows.len())?;
    if let Some(t) = sm.effective_tau {
        writeln!(w, "anisotropy_tau {t}")?;
    }
    if let Some(demo) = opts.solve {
        run_demo(w, demo, obj, &c)?;
    }
    if !opts.deterministic_report {
        writeln!(w, "wall_time_s {:.6}", elapsed.as_secs_f64())?;
    }

    Ok(Artifacts {
        coarse: output::write_coarse(coarse),
        map: output::write_map(coarse, tracker),
        pmat: output::write_pmat(coarse, &p),
        vec_pmat: output::write_vector_pmat(coarse, &pv),
        viz: output::write_viz(coarse, tracker),
        report,
    })
}

fn mass_norm(x: &[f64], m: &[f64]) -> f64 {
    x.iter().zip(m).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
}

fn centered(x: &[f64], m: &[f64]) -> Vec<f64> {
    let mean = x.iter().zip(m).map(|(a, b)| a * b).sum::<f64>() / m.iter().sum::<f64>();
    x.iter().map(|a| a - mean).collect()
}

/// Drops `pin` from the rows and columns of `a` and the rows of `p`.
fn pinned(a: &Csr, p: &Csr, pin: usize) -> (Csr, Csr) {
    let keep = |i: usize| if i < pin { Some(i) } else if i > pin { Some(i - 1) } else { None };
    let mut ta = Vec::new();
    for i in 0..a.rows {
        for (j, x) in a.row(i) {
            if let (Some(r), Some(c)) = (keep(i), keep(j)) {
                ta.push((r, c, x));
            }
        }
    }
    let mut tp = Vec::new();
    for i in 0..p.rows {
        if let Some(r) = keep(i) {
            tp.extend(p.row(i).map(|(j, x)| (r, j, x)));
        }
    }
    (Csr::from_triplets(a.rows - 1, a.cols - 1, &ta), Csr::from_triplets(p.rows - 1, p.cols, &tp))
}

fn run_demo(w: &mut String, demo: Demo, obj: &Obj, c: &Coarsener) -> Result<()> {
    let fine = c.input();
    let p = c.prolongation().expect("tracking is on");
    let (l, m) = solvers::cotan_laplacian(fine);
    match demo {
        Demo::Poisson | Demo::Multigrid => {
            let f: Vec<f64> = obj.positions.iter().map(|q| q[2] + q[0] * q[1]).collect();
            let b: Vec<f64> = f.iter().zip(&m).map(|(a, b)| a * b).collect();
            let closed = fine.mesh().halfedges().all(|h| !fine.mesh().is_ghost(h));
            let b = if closed {
                let mean = b.iter().sum::<f64>() / b.len() as f64;
                b.iter().map(|x| x - mean).collect()
            } else {
                b
            };
            if demo == Demo::Poisson {
                let gauge = if closed { Gauge::MeanZero } else { Gauge::Pin(0) };
                let u = solvers::solve_poisson(&l, &b, &gauge)?;
                let (lc, _) = solvers::cotan_laplacian(c.surface());
                let uc = solvers::poisson_coarse(&p, &lc, &b, &gauge)?;
                let e: Vec<f64> = u.iter().zip(&uc).map(|(a, b)| a - b).collect();
                let rel = mass_norm(&centered(&e, &m), &m) / mass_norm(&centered(&u, &m), &m);
                writeln!(w, "poisson_relative_l2_error {rel:.6e}")?;
            } else {
                let (a, pp) = pinned(&l, &p.to_csr(), 0);
                let mg = Multigrid::new(a, vec![pp])?;
                let out = mg.solve(&b[1..], 1e-8, 100)?;
                let factor = out.residuals.last().unwrap().powf(1.0 / out.cycles.max(1) as f64);
                writeln!(w, "multigrid_cycles {}", out.cycles)?;
                writeln!(w, "multigrid_mean_reduction {factor:.4}")?;
            }
        }
        Demo::Geodesic => {
            let d = solvers::dijkstra(fine, &[Vertex(0)]);
            let approx = LowRankDistance::new(p, c.surface())?;
            let row = approx.row(0);
            let mut sum = 0.0;
            let mut count = 0;
            for (j, &dj) in d.iter().enumerate() {
                if j != 0 && dj > 0.0 && dj.is_finite() {
                    sum += (row[j] - dj).abs() / dj;
                    count += 1;
                }
            }
            writeln!(w, "geodesic_source 0")?;
            writeln!(w, "geodesic_mean_relative_error {:.6e}", sum / count.max(1) as f64)?;
        }
    }
    Ok(())
}
