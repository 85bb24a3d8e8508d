//! Greedy coarsening: repeatedly remove the vertex of least intrinsic
//! curvature error until a target vertex count is reached.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::mapping::{Prolongation, RemovalRecord, Tracker, VectorProlongation};
use crate::math;
use crate::mesh::Vertex;
use crate::metric::{ChannelConfig, ChannelState};
use crate::tangent::TangentVec;

/// Length anisotropy along a tangent field.
#[derive(Clone, Debug, PartialEq)]
pub struct Anisotropy {
    /// Strength in `[0, 1]`.
    pub tau: f64,
    /// One vector per vertex, in normalized tangent coordinates.
    pub field: Vec<TangentVec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarsenConfig {
    /// Target vertex count (per connected component with `per_component`).
    pub target: usize,
    pub per_component: bool,
    /// Vertices that are never removed.
    pub fixed: Vec<usize>,
    pub channels: ChannelConfig,
    pub anisotropy: Option<Anisotropy>,
    /// Log operations and track every input vertex onto the coarse mesh.
    pub track: bool,
}

impl Default for CoarsenConfig {
    fn default() -> Self {
        CoarsenConfig {
            target: 0,
            per_component: false,
            fixed: Vec::new(),
            channels: ChannelConfig::default(),
            anisotropy: None,
            track: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Running,
    TargetReached,
    /// Every remaining candidate has infinite cost.
    AllInfinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarsenSummary {
    pub initial_vertices: usize,
    pub final_vertices: usize,
    pub removals: usize,
    /// Removals that failed after being popped with a finite cost.
    pub skipped: usize,
    pub initial_delaunay_flips: usize,
    pub delaunay_flips: usize,
    /// Newton iteration counts of every flattening, tentative or not.
    pub newton_iterations: Vec<u16>,
    /// Largest difference between the two cost forms at initialization.
    pub max_cost_gap: f64,
    pub effective_tau: Option<f64>,
    pub stop: StopReason,
}

impl CoarsenSummary {
    pub fn median_newton(&self) -> Option<u16> {
        if self.newton_iterations.is_empty() {
            return None;
        }
        let mut v = self.newton_iterations.clone();
        v.sort_unstable();
        Some(v[v.len() / 2])
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    cost: f64,
    vertex: u32,
    version: u32,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    // reversed so that the max-heap pops the least (cost, vertex)
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then(o.vertex.cmp(&self.vertex)).then(o.version.cmp(&self.version))
    }
}

pub struct Coarsener {
    surface: Surface,
    input: Surface,
    channels: ChannelState,
    tracker: Option<Tracker>,
    records: Vec<RemovalRecord>,
    heap: BinaryHeap<Entry>,
    version: Vec<u32>,
    cost: Vec<f64>,
    fixed: Vec<bool>,
    component: Vec<u32>,
    remaining: Vec<usize>,
    target: usize,
    per_component: bool,
    summary: CoarsenSummary,
}

/// Rescales lengths by `(1−τ) + (τ/2)((u_i·ê_ij)² + (u_j·ê_ji)²)`, halving
/// `τ` until every face satisfies the triangle inequality. Returns the
/// rescaled surface and the `τ` actually used.
pub fn apply_anisotropic_scaling(surface: &Surface, field: &[TangentVec], tau: f64) -> Result<(Surface, f64)> {
    let m = surface.mesh();
    if field.len() != m.vertex_capacity() {
        return Err(Error::Dimension { expected: m.vertex_capacity(), got: field.len() });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Config("anisotropy strength must lie in [0, 1]"));
    }
    let dot = |h| {
        let v = m.tail(h);
        let s = surface.angle_scale(v);
        let u = field[v.idx()];
        let a = (u.0.arg() - surface.signpost(h)) / s;
        u.norm() * math::cos(a)
    };
    let squares: Vec<f64> = m
        .halfedges()
        .map(|h| {
            let d = dot(h);
            d * d
        })
        .collect();
    let ids: Vec<usize> = m.halfedges().map(|h| h.idx()).collect();
    let mut sq = vec![0.0; m.halfedge_capacity()];
    for (k, &i) in ids.iter().enumerate() {
        sq[i] = squares[k];
    }
    let mut tau = tau;
    for _ in 0..64 {
        let mut len = surface.geometry().len.clone();
        for h in m.halfedges() {
            let t = m.twin(h);
            let f = (1.0 - tau) + 0.5 * tau * (sq[h.idx()] + sq[t.idx()]);
            len[h.idx()] = surface.length(h) * f;
        }
        let ok = m.halfedges().all(|h| len[h.idx()] > 0.0)
            && m.faces().all(|f| {
                let [a, b, c] = m.face_halfedges(f).map(|h| len[h.idx()]);
                math::triangle_valid(a, b, c)
            });
        if ok {
            return Ok((Surface::from_parts(m.clone(), len)?, tau));
        }
        tau *= 0.5;
    }
    Ok((surface.clone(), 0.0))
}

impl Coarsener {
    pub fn new(surface: Surface, cfg: CoarsenConfig) -> Result<Self> {
        let input = surface.clone();
        let n = surface.mesh().vertex_capacity();
        let mut fixed = vec![false; n];
        for &v in &cfg.fixed {
            if v >= n {
                return Err(Error::VertexIndex(v));
            }
            fixed[v] = true;
        }
        let (mut surface, effective_tau) = match &cfg.anisotropy {
            Some(a) => {
                let (s, t) = apply_anisotropic_scaling(&surface, &a.field, a.tau)?;
                (s, Some(t))
            }
            None => (surface, None),
        };
        let channels = ChannelState::new(&surface, &cfg.channels)?;
        let tracker = cfg.track.then(|| Tracker::for_vertices(&surface));
        surface.set_tracking(cfg.track);
        let (component, count) = surface.mesh().components();
        let mut remaining = vec![0usize; count];
        for v in surface.mesh().vertices() {
            remaining[component[v.idx()] as usize] += 1;
        }
        let mut c = Coarsener {
            input,
            channels,
            tracker,
            records: Vec::new(),
            heap: BinaryHeap::new(),
            version: vec![0; n],
            cost: vec![f64::INFINITY; n],
            fixed,
            component,
            remaining,
            target: cfg.target,
            per_component: cfg.per_component,
            summary: CoarsenSummary {
                initial_vertices: surface.mesh().num_vertices(),
                final_vertices: surface.mesh().num_vertices(),
                removals: 0,
                skipped: 0,
                initial_delaunay_flips: 0,
                delaunay_flips: 0,
                newton_iterations: Vec::new(),
                max_cost_gap: 0.0,
                effective_tau,
                stop: StopReason::Running,
            },
            surface,
        };
        c.summary.initial_delaunay_flips = c.surface.make_delaunay();
        c.flush_ops(None);
        c.initialize_queue();
        Ok(c)
    }

    fn flush_ops(&mut self, vertex: Option<Vertex>) {
        if let Some(t) = &mut self.tracker {
            let ops = self.surface.take_ops();
            for op in &ops {
                t.apply(op);
            }
            self.records.push(RemovalRecord { vertex, ops });
        }
    }

    fn initialize_queue(&mut self) {
        let track = self.surface.tracking();
        self.surface.set_tracking(false);
        let verts: Vec<Vertex> = self.surface.mesh().vertices().collect();
        for v in verts {
            let cost = if self.fixed[v.idx()] {
                f64::INFINITY
            } else {
                match self.surface.evaluate_removal(v) {
                    Ok((out, plan)) => {
                        self.summary.newton_iterations.push(out.iterations as u16);
                        let a = self.channels.memoryless_cost(v, &plan);
                        let b = self.channels.memory_cost(v, &plan);
                        self.summary.max_cost_gap = self.summary.max_cost_gap.max((a - b).abs());
                        a
                    }
                    Err(_) => f64::INFINITY,
                }
            };
            self.push(v, cost);
        }
        self.surface.set_tracking(track);
    }

    fn push(&mut self, v: Vertex, cost: f64) {
        let ver = &mut self.version[v.idx()];
        *ver += 1;
        self.cost[v.idx()] = cost;
        self.heap.push(Entry { cost, vertex: v.0, version: *ver });
    }

    fn rescore(&mut self, v: Vertex) {
        if !self.surface.mesh().vertex_alive(v) || self.fixed[v.idx()] {
            return;
        }
        let cost = match self.surface.evaluate_removal(v) {
            Ok((out, plan)) => {
                self.summary.newton_iterations.push(out.iterations as u16);
                self.channels.memory_cost(v, &plan)
            }
            Err(_) => f64::INFINITY,
        };
        self.push(v, cost);
    }

    fn done(&self) -> bool {
        !self.per_component && self.surface.mesh().num_vertices() <= self.target
    }

    /// Removes the next vertex. Returns `None` once coarsening has stopped.
    pub fn step(&mut self) -> Option<Vertex> {
        if self.summary.stop != StopReason::Running {
            return None;
        }
        loop {
            if self.done() {
                self.summary.stop = StopReason::TargetReached;
                return None;
            }
            let Some(e) = self.heap.pop() else {
                self.summary.stop =
                    if self.per_component { StopReason::TargetReached } else { StopReason::AllInfinite };
                return None;
            };
            let v = Vertex(e.vertex);
            if e.version != self.version[v.idx()] || !self.surface.mesh().vertex_alive(v) {
                continue;
            }
            if e.cost == f64::INFINITY {
                self.summary.stop = StopReason::AllInfinite;
                self.heap.push(e);
                return None;
            }
            let comp = self.component[v.idx()] as usize;
            if self.per_component && self.remaining[comp] <= self.target {
                continue;
            }
            match self.surface.remove_vertex(v) {
                Ok(out) => {
                    self.summary.newton_iterations.push(out.flatten.iterations as u16);
                    self.summary.delaunay_flips += out.delaunay_flips;
                    self.summary.removals += 1;
                    self.summary.final_vertices -= 1;
                    self.remaining[comp] -= 1;
                    self.channels.apply(v, &out.plan);
                    self.flush_ops(Some(v));
                    let track = self.surface.tracking();
                    self.surface.set_tracking(false);
                    for n in &out.plan.neighbors {
                        self.rescore(n.vertex);
                    }
                    self.surface.set_tracking(track);
                    return Some(v);
                }
                Err(_) => {
                    self.summary.skipped += 1;
                    self.push(v, f64::INFINITY);
                }
            }
        }
    }

    pub fn run(&mut self) -> &CoarsenSummary {
        while self.step().is_some() {}
        &self.summary
    }

    pub fn summary(&self) -> &CoarsenSummary {
        &self.summary
    }
    pub fn surface(&self) -> &Surface {
        &self.surface
    }
    /// The surface as given, before anisotropic scaling and flips.
    pub fn input(&self) -> &Surface {
        &self.input
    }
    pub fn channels(&self) -> &ChannelState {
        &self.channels
    }
    pub fn tracker(&self) -> Option<&Tracker> {
        self.tracker.as_ref()
    }
    pub fn records(&self) -> &[RemovalRecord] {
        &self.records
    }
    /// Current queue cost of `v` (∞ for fixed or infeasible vertices).
    pub fn cost(&self, v: Vertex) -> f64 {
        self.cost[v.idx()]
    }

    pub fn into_parts(self) -> (Surface, ChannelState, Option<Tracker>, Vec<RemovalRecord>) {
        (self.surface, self.channels, self.tracker, self.records)
    }

    /// Scalar prolongation from the current coarse vertices to the input
    /// vertices. Requires tracking.
    pub fn prolongation(&self) -> Option<Prolongation> {
        self.tracker.as_ref().map(|t| Prolongation::new(&self.surface, t))
    }

    /// Tangent-vector prolongation for `power`-direction fields (1 for
    /// ordinary vectors). Requires tracking.
    pub fn vector_prolongation(&self, power: u32) -> Option<VectorProlongation> {
        self.tracker.as_ref().map(|t| VectorProlongation::new(&self.input, &self.surface, t, power))
    }
}

/// Coarsens `surface` to `target` vertices with default settings.
pub fn coarsen(surface: Surface, target: usize) -> Result<Coarsener> {
    let mut c = Coarsener::new(surface, CoarsenConfig { target, ..Default::default() })?;
    c.run();
    Ok(c)
}
