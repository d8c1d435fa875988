use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use super::{GroundState, Method, SectorOperator};
use crate::error::{Error, Result};
use crate::statevec::rng_for;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosConfig {
    /// Krylov vectors kept before restarting from the Ritz vector.
    pub restart: usize,
    /// Ritz residual `‖Hx − θx‖` at which the solve stops.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    pub want_vector: bool,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            restart: 200,
            tol: 1e-8,
            max_restarts: 200,
            seed: 0x5eed,
            want_vector: false,
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (k, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors.column(k).iter().copied().collect())
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
pub(super) fn lowest(op: &SectorOperator, cfg: &LanczosConfig) -> Result<GroundState> {
    let n = op.dim();
    let m_max = cfg.restart.max(2).min(n);
    let mut rng = rng_for(cfg.seed, 0);
    let mut start: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut restart_energies = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut residual = f64::INFINITY;
    for _ in 0..=cfg.max_restarts {
        let nrm = norm(&start);
        start.iter_mut().for_each(|x| *x /= nrm);
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let (theta, y) = loop {
            let j = basis.len() - 1;
            op.matvec(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let m = alpha.len();
            if m % 5 == 0 || m == m_max || b < 1e-12 {
                let ritz = lowest_ritz(&alpha, &beta);
                residual = b * ritz.1[m - 1].abs();
                if residual < cfg.tol || m == m_max || b < 1e-12 {
                    break ritz;
                }
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        };
        restart_energies.push(theta);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (v, &c) in basis.iter().zip(&y) {
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += vi * c);
        }
        if residual < cfg.tol || basis.len() == n {
            return Ok(GroundState {
                energy: theta,
                vector: cfg.want_vector.then_some(x),
                residual,
                method: Method::Lanczos,
                dim: n,
                restart_energies,
            });
        }
        start = x;
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_restarts * m_max,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{ground_state, SectorBasis};
    use super::*;
    use crate::fermion::build_hamiltonians;
    use crate::lattice::HoneycombLattice;
    use crate::oracle::Sector;

    #[test]
    fn restarts_are_monotone_and_agree_with_dense() {
        let lat = HoneycombLattice::build(1, 1).unwrap();
        let hams = build_hamiltonians(&lat, 1.0, 1.5).unwrap();
        let op = SectorOperator::new(
            &hams.h_fh,
            SectorBasis::new(&lat, Sector::new(3, 3)).unwrap(),
        )
        .unwrap();
        let cfg = LanczosConfig {
            restart: 12,
            want_vector: true,
            ..LanczosConfig::default()
        };
        let lz = lowest(&op, &cfg).unwrap();
        assert!(lz.restart_energies.len() > 1);
        assert!(lz.restart_energies.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let dense = ground_state(&op, Method::Dense, &cfg).unwrap();
        assert!((lz.energy - dense.energy).abs() < 1e-8);
        assert!(lz.residual < 1e-8);
        assert_eq!(lz.vector.unwrap().len(), 400);
    }
}
