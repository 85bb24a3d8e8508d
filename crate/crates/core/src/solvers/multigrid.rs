use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::Csr;

use super::linear::{norm, Cholesky};

/// Galerkin multigrid hierarchy: `A_{l+1} = P_lᵀ A_l P_l`, Gauss–Seidel
/// smoothing and a dense direct solve on the coarsest level.
#[derive(Clone, Debug)]
pub struct Multigrid {
    ops: Vec<Csr>,
    prolong: Vec<Csr>,
    restrict: Vec<Csr>,
    coarsest: Cholesky,
    pub sweeps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultigridOutcome {
    pub x: Vec<f64>,
    pub cycles: usize,
    /// Relative residual after each cycle, starting with the initial one.
    pub residuals: Vec<f64>,
}

fn gauss_seidel(a: &Csr, b: &[f64], x: &mut [f64], forward: bool) {
    let n = a.rows;
    let mut sweep = |i: usize| {
        let mut s = b[i];
        let mut d = 0.0;
        for (j, v) in a.row(i) {
            if j == i {
                d = v;
            } else {
                s -= v * x[j];
            }
        }
        if d != 0.0 {
            x[i] = s / d;
        }
    };
    if forward {
        (0..n).for_each(&mut sweep);
    } else {
        (0..n).rev().for_each(&mut sweep);
    }
}

fn residual(a: &Csr, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; a.rows];
    a.mul_vec_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    r
}

impl Multigrid {
    /// `prolongations[l]` maps level `l + 1` to level `l`; level 0 is `a`.
    pub fn new(a: Csr, prolongations: Vec<Csr>) -> Result<Self> {
        let mut ops = vec![a];
        let mut restrict = Vec::new();
        for p in &prolongations {
            let last = ops.last().unwrap();
            if p.rows != last.rows {
                return Err(Error::Dimension { expected: last.rows, got: p.rows });
            }
            let next = last.galerkin(p)?;
            restrict.push(p.transpose());
            ops.push(next);
        }
        let coarsest = Cholesky::factor(ops.last().unwrap())?;
        Ok(Multigrid { ops, prolong: prolongations, restrict, coarsest, sweeps: 3 })
    }

    pub fn levels(&self) -> usize {
        self.ops.len()
    }

    pub fn operator(&self, level: usize) -> &Csr {
        &self.ops[level]
    }

    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        if l + 1 == self.ops.len() {
            x.copy_from_slice(&self.coarsest.solve(b));
            return;
        }
        let a = &self.ops[l];
        for _ in 0..self.sweeps {
            gauss_seidel(a, b, x, true);
        }
        let r = residual(a, b, x);
        let mut rc = vec![0.0; self.restrict[l].rows];
        self.restrict[l].mul_vec_into(&r, &mut rc);
        let mut ec = vec![0.0; rc.len()];
        self.cycle(l + 1, &rc, &mut ec);
        let mut e = vec![0.0; x.len()];
        self.prolong[l].mul_vec_into(&ec, &mut e);
        for (xi, ei) in x.iter_mut().zip(&e) {
            *xi += ei;
        }
        for _ in 0..self.sweeps {
            gauss_seidel(a, b, x, false);
        }
    }

    /// One V-cycle from `x` in place.
    pub fn v_cycle(&self, b: &[f64], x: &mut [f64]) {
        self.cycle(0, b, x);
    }

    /// V-cycles from zero until the relative residual drops below `tol`.
    /// Fails if the residual grows for five consecutive cycles.
    pub fn solve(&self, b: &[f64], tol: f64, max_cycles: usize) -> Result<MultigridOutcome> {
        let n = self.ops[0].rows;
        if b.len() != n {
            return Err(Error::Dimension { expected: n, got: b.len() });
        }
        let bn = norm(b);
        let mut x = vec![0.0; n];
        if bn == 0.0 {
            return Ok(MultigridOutcome { x, cycles: 0, residuals: vec![0.0] });
        }
        let mut residuals = vec![1.0];
        let mut growth = 0;
        for c in 1..=max_cycles {
            self.v_cycle(b, &mut x);
            let r = norm(&residual(&self.ops[0], b, &x)) / bn;
            growth = if r > *residuals.last().unwrap() { growth + 1 } else { 0 };
            residuals.push(r);
            if r <= tol {
                return Ok(MultigridOutcome { x, cycles: c, residuals });
            }
            if growth >= 5 {
                return Err(Error::Diverged(c));
            }
        }
        Err(Error::NoConvergence(max_cycles))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1d(n: usize) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        Csr::from_triplets(n, n, &t)
    }

    fn linear_interp(nc: usize) -> Csr {
        let nf = 2 * nc + 1;
        let mut t = Vec::new();
        for c in 0..nc {
            let f = 2 * c + 1;
            t.push((f, c, 1.0));
            t.push((f - 1, c, 0.5));
            t.push((f + 1, c, 0.5));
        }
        Csr::from_triplets(nf, nc, &t)
    }

    #[test]
    fn one_level_is_direct() {
        let a = lap1d(20);
        let b = vec![1.0; 20];
        let mg = Multigrid::new(a.clone(), Vec::new()).unwrap();
        let out = mg.solve(&b, 1e-12, 1).unwrap();
        assert_eq!(out.cycles, 1);
    }

    #[test]
    fn two_grid_1d() {
        let a = lap1d(63);
        let mg = Multigrid::new(a.clone(), alloc::vec![linear_interp(31), linear_interp(15)]).unwrap();
        let b: Vec<f64> = (0..63).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
        let out = mg.solve(&b, 1e-10, 30).unwrap();
        for w in out.residuals.windows(2) {
            assert!(w[1] < 0.5 * w[0]);
        }
        let x = Cholesky::factor(&a).unwrap().solve(&b);
        let err: f64 = x.iter().zip(&out.x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let scale: f64 = x.iter().map(|p| p.abs()).fold(0.0, f64::max);
        assert!(err < 1e-6 * scale);
    }
}
