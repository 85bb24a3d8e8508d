use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mapping::Prolongation;
use crate::sparse::Csr;

use super::linear::conjugate_gradient;

/// How the constant nullspace of a closed-surface Laplacian is removed.
#[derive(Clone, Debug, PartialEq)]
pub enum Gauge {
    /// Fix one value to zero.
    Pin(usize),
    /// Require a mean-zero right-hand side and return a mean-zero solution.
    MeanZero,
    /// Prescribed values.
    Dirichlet(Vec<(usize, f64)>),
}

/// Solves `L u = b` (with `b` a load vector such as `M f`) to a relative
/// residual of 1e-12.
pub fn solve_poisson(l: &Csr, b: &[f64], gauge: &Gauge) -> Result<Vec<f64>> {
    let n = l.rows;
    if b.len() != n {
        return Err(Error::Dimension { expected: n, got: b.len() });
    }
    let fixed: Vec<(usize, f64)> = match gauge {
        Gauge::Pin(i) => vec![(*i, 0.0)],
        Gauge::MeanZero => {
            let sum: f64 = b.iter().sum();
            let scale: f64 = b.iter().map(|x| x.abs()).sum();
            if sum.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Config("right-hand side must have zero mean"));
            }
            vec![(0, 0.0)]
        }
        Gauge::Dirichlet(d) => d.clone(),
    };
    let mut u = vec![0.0; n];
    let mut is_fixed = vec![false; n];
    for &(i, x) in &fixed {
        if i >= n {
            return Err(Error::VertexIndex(i));
        }
        is_fixed[i] = true;
        u[i] = x;
    }
    let mut map = vec![usize::MAX; n];
    let mut free = Vec::new();
    for i in 0..n {
        if !is_fixed[i] {
            map[i] = free.len();
            free.push(i);
        }
    }
    let mut t = Vec::new();
    let mut rhs = Vec::with_capacity(free.len());
    for &i in &free {
        let mut r = b[i];
        for (j, a) in l.row(i) {
            if is_fixed[j] {
                r -= a * u[j];
            } else {
                t.push((map[i], map[j], a));
            }
        }
        rhs.push(r);
    }
    let a = Csr::from_triplets(free.len(), free.len(), &t);
    let sol = conjugate_gradient(&a, &rhs, 1e-12, 20 * n + 100)?;
    for (k, &i) in free.iter().enumerate() {
        u[i] = sol.x[k];
    }
    if *gauge == Gauge::MeanZero {
        let mean = u.iter().sum::<f64>() / n as f64;
        for x in &mut u {
            *x -= mean;
        }
    }
    Ok(u)
}

/// Restricts the fine load vector with `Pᵀ`, solves on the coarse
/// Laplacian and prolongs the result back with `P`.
pub fn poisson_coarse(p: &Prolongation, coarse_l: &Csr, fine_b: &[f64], gauge: &Gauge) -> Result<Vec<f64>> {
    if coarse_l.rows != p.cols {
        return Err(Error::Dimension { expected: p.cols, got: coarse_l.rows });
    }
    let bc = p.apply_transpose(fine_b)?;
    let x = solve_poisson(coarse_l, &bc, gauge)?;
    p.apply(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Surface;
    use crate::shapes;
    use crate::solvers::cotan_laplacian;

    #[test]
    fn zero_rhs_zero_solution() {
        let (p, f) = shapes::grid(5, 5, 1.0, 1.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let (l, _) = cotan_laplacian(&s);
        let bc: Vec<(usize, f64)> = [0, 4, 20, 24].iter().map(|&i| (i, 0.0)).collect();
        let u = solve_poisson(&l, &[0.0; 25], &Gauge::Dirichlet(bc)).unwrap();
        assert!(u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn linear_function_is_harmonic() {
        let (p, f) = shapes::grid(6, 6, 1.0, 1.0);
        let s = Surface::from_positions(&p, &f).unwrap();
        let (l, _) = cotan_laplacian(&s);
        let bc: Vec<(usize, f64)> =
            (0..36).filter(|&i| i % 6 == 0 || i % 6 == 5 || !(6..30).contains(&i)).map(|i| (i, 2.0 * p[i][0] - p[i][1])).collect();
        let u = solve_poisson(&l, &[0.0; 36], &Gauge::Dirichlet(bc)).unwrap();
        for i in 0..36 {
            assert!((u[i] - (2.0 * p[i][0] - p[i][1])).abs() < 1e-10);
        }
    }

    #[test]
    fn gauges_on_sphere() {
        let (p, f) = shapes::icosphere(4);
        let s = Surface::from_positions(&p, &f).unwrap();
        let (l, m) = cotan_laplacian(&s);
        let b: Vec<f64> = p.iter().zip(&m).map(|(q, a)| q[2] * a).collect();
        let mean_b: f64 = b.iter().sum::<f64>() / b.len() as f64;
        let b: Vec<f64> = b.iter().map(|x| x - mean_b).collect();
        let u0 = solve_poisson(&l, &b, &Gauge::MeanZero).unwrap();
        let u1 = solve_poisson(&l, &b, &Gauge::Pin(0)).unwrap();
        assert_eq!(u1[0], 0.0);
        let shift = u1[5] - u0[5];
        for i in 0..u0.len() {
            assert!((u1[i] - u0[i] - shift).abs() < 1e-8);
        }
        let mut bad = b.clone();
        bad[0] += 1.0;
        assert!(solve_poisson(&l, &bad, &Gauge::MeanZero).is_err());
    }
}
