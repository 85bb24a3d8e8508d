//! The intrinsic curvature error: per-vertex mass channels, each carrying a
//! tangent vector that points from the vertex to the center of mass of the
//! fine-mesh mass it has absorbed.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::mesh::Vertex;

/// Curvatures below this magnitude are rounding noise and carry no mass.
pub const FLAT_CURVATURE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    /// Positive part of the angle defect (geodesic curvature on the boundary).
    PositiveCurvature,
    /// Negative part, stored as a nonnegative mass.
    NegativeCurvature,
    /// One third of the incident face areas.
    Area,
    /// User-supplied masses; the index is the position in the config.
    User(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub kind: ChannelKind,
    pub weight: f64,
    pub mass: Vec<f64>,
    pub error: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConfig {
    pub w_curvature: f64,
    pub w_area: f64,
    /// Extra channels as `(per-vertex masses, weight)`.
    pub user: Vec<(Vec<f64>, f64)>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { w_curvature: 1.0, w_area: 0.0, user: Vec::new() }
    }
}

/// How a removed vertex hands its mass to one neighbour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborTransfer {
    pub vertex: Vertex,
    pub alpha: f64,
    /// Transport rotation from the removed vertex to this neighbour.
    pub rot: Complex64,
    /// Edge vector from this neighbour to the removed vertex, in the
    /// neighbour's tangent space.
    pub edge: Complex64,
    pub len: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TransferPlan {
    pub neighbors: Vec<NeighborTransfer>,
}

/// Convex weights proportional to `|ΔK_j|`, uniform when every delta is 0.
pub fn transfer_weights(deltas: &[(Vertex, f64)]) -> Vec<(Vertex, f64)> {
    let total: f64 = deltas.iter().map(|d| d.1.abs()).sum();
    if total == 0.0 {
        let w = 1.0 / deltas.len() as f64;
        deltas.iter().map(|d| (d.0, w)).collect()
    } else {
        deltas.iter().map(|d| (d.0, d.1.abs() / total)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelState {
    pub channels: Vec<Channel>,
}

impl ChannelState {
    pub fn new(surface: &Surface, cfg: &ChannelConfig) -> Result<Self> {
        let n = surface.mesh().vertex_capacity();
        let mut pos = vec![0.0; n];
        let mut neg = vec![0.0; n];
        for v in surface.mesh().vertices() {
            let mut k = surface.curvature(v);
            if k.abs() < FLAT_CURVATURE {
                k = 0.0;
            }
            pos[v.idx()] = k.max(0.0);
            neg[v.idx()] = (-k).max(0.0);
        }
        let mut channels = Vec::new();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        if cfg.w_curvature < 0.0 || cfg.w_area < 0.0 {
            return Err(Error::Config("channel weights must be nonnegative"));
        }
        let curvature_mass: f64 = pos.iter().chain(neg.iter()).sum();
        if cfg.w_area > 0.0 {
            let mut area = vec![0.0; n];
            for f in surface.mesh().faces() {
                let a = surface.face_area(f) / 3.0;
                for v in surface.mesh().face_vertices(f) {
                    area[v.idx()] += a;
                }
            }
            let total: f64 = area.iter().sum();
            if curvature_mass > 0.0 && total > 0.0 {
                let s = curvature_mass / total;
                for a in &mut area {
                    *a *= s;
                }
            }
            channels.push(Channel { kind: ChannelKind::Area, weight: cfg.w_area, mass: area, error: zero.clone() });
        }
        if cfg.w_curvature > 0.0 {
            channels.push(Channel { kind: ChannelKind::PositiveCurvature, weight: cfg.w_curvature, mass: pos, error: zero.clone() });
            channels.push(Channel { kind: ChannelKind::NegativeCurvature, weight: cfg.w_curvature, mass: neg, error: zero.clone() });
        }
        for (k, (m, w)) in cfg.user.iter().enumerate() {
            if m.len() != n {
                return Err(Error::Dimension { expected: n, got: m.len() });
            }
            if let Some(i) = m.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidMass(i));
            }
            if !(*w >= 0.0) {
                return Err(Error::Config("channel weights must be nonnegative"));
            }
            channels.push(Channel { kind: ChannelKind::User(k), weight: *w, mass: m.clone(), error: zero.clone() });
        }
        Ok(ChannelState { channels })
    }

    pub fn channel(&self, kind: ChannelKind) -> Option<&Channel> {
        self.channels.iter().find(|c| c.kind == kind)
    }

    /// `Σ_p w_p m_i Σ_j α_ij ℓ_ij`: the cost assuming no error is stored yet.
    pub fn memoryless_cost(&self, i: Vertex, plan: &TransferPlan) -> f64 {
        let spread: f64 = plan.neighbors.iter().map(|n| n.alpha * n.len).sum();
        self.channels.iter().map(|c| c.weight * c.mass[i.idx()] * spread).sum()
    }

    /// `Σ_p w_p Σ_j m̃_j ‖t̃_j‖` with the error vectors updated as if `i`
    /// were removed according to `plan`.
    pub fn memory_cost(&self, i: Vertex, plan: &TransferPlan) -> f64 {
        let mut cost = 0.0;
        for c in &self.channels {
            if c.weight == 0.0 {
                continue;
            }
            let (mi, ti) = (c.mass[i.idx()], c.error[i.idx()]);
            let mut sum = 0.0;
            for n in &plan.neighbors {
                let j = n.vertex.idx();
                let moved = (n.rot * ti + n.edge) * (n.alpha * mi);
                sum += (moved + c.error[j] * c.mass[j]).norm();
            }
            cost += c.weight * sum;
        }
        cost
    }

    /// Moves the mass and error of `i` to its neighbours.
    pub fn apply(&mut self, i: Vertex, plan: &TransferPlan) {
        for c in &mut self.channels {
            let (mi, ti) = (c.mass[i.idx()], c.error[i.idx()]);
            for n in &plan.neighbors {
                let j = n.vertex.idx();
                let am = n.alpha * mi;
                let denom = am + c.mass[j];
                if denom > 0.0 {
                    c.error[j] = ((n.rot * ti + n.edge) * am + c.error[j] * c.mass[j]) / denom;
                }
                c.mass[j] += am;
            }
            c.mass[i.idx()] = 0.0;
            c.error[i.idx()] = Complex64::new(0.0, 0.0);
        }
    }

    pub fn total_mass(&self, k: usize) -> f64 {
        self.channels[k].mass.iter().sum()
    }
}
