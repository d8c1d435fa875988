//! Preparation of the hopping ground state, a Slater determinant per spin,
//! with X gates followed by a network of fermionic Givens rotations.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::evolve::half_filling;
use crate::lattice::{HoneycombLattice, Spin};
use crate::statevec::{run, Angle, Circuit, Gate, StateVector};

/// Energies closer than this are treated as degenerate when ordering orbitals.
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalBasis {
    pub spin: Spin,
    /// All single-particle energies, ascending.
    pub energies: Vec<f64>,
    /// `N_site × N_occ`, occupied orbitals as columns.
    pub orbitals: DMatrix<f64>,
}

impl OrbitalBasis {
    pub fn n_occ(&self) -> usize {
        self.orbitals.ncols()
    }

    pub fn n_modes(&self) -> usize {
        self.orbitals.nrows()
    }

    pub fn occupied_energy(&self) -> f64 {
        self.energies[..self.n_occ()].iter().sum()
    }

    /// `max |QᵀQ − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.orbitals.transpose() * &self.orbitals;
        let m = g.nrows();
        (g - DMatrix::<f64>::identity(m, m)).amax()
    }
}

/// Occupation of one spin species at half filling.
pub fn occupation(lat: &HoneycombLattice, spin: Spin) -> usize {
    let (up, down) = half_filling(lat.n_sites());
    match spin {
        Spin::Up => up as usize,
        Spin::Down => down as usize,
    }
}

/// Eigen-decomposition of `−τ·A` with the lowest orbitals occupied.
///
/// Eigenpairs are ordered by energy, ties by solver index; each eigenvector
/// is signed so its largest-magnitude component is positive.
pub fn single_particle_orbitals(
    lat: &HoneycombLattice,
    tau: f64,
    spin: Spin,
) -> Result<OrbitalBasis> {
    let n = lat.n_sites();
    let adj = lat.adjacency();
    let h = DMatrix::from_fn(n, n, |i, j| -tau * adj[i][j]);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        if (ea - eb).abs() < DEGENERACY_TOL {
            a.cmp(&b)
        } else {
            ea.total_cmp(&eb)
        }
    });
    let m = occupation(lat, spin);
    let mut orbitals = DMatrix::zeros(n, m);
    for (k, &idx) in order.iter().take(m).enumerate() {
        let col = eig.eigenvectors.column(idx);
        let peak = col
            .iter()
            .copied()
            .fold(0.0f64, |p, v| if v.abs() > p.abs() + 1e-12 { v } else { p });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        orbitals.set_column(k, &(col * sign));
    }
    Ok(OrbitalBasis {
        spin,
        energies: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        orbitals,
    })
}

fn rotate_rows(m: &mut DMatrix<f64>, i: usize, k: usize, c: f64, s: f64) {
    for col in 0..m.ncols() {
        let (a, b) = (m[(i, col)], m[(k, col)]);
        m[(i, col)] = c * a - s * b;
        m[(k, col)] = s * a + c * b;
    }
}

/// Givens angles `(mode_a, mode_b, θ)` in circuit order that rotate the
/// determinant of the first `N_occ` modes into span(Q).
pub fn givens_angles(q: &DMatrix<f64>) -> Result<Vec<(usize, usize, f64)>> {
    let (n, m) = (q.nrows(), q.ncols());
    let g = q.transpose() * q;
    let deviation = (g - DMatrix::<f64>::identity(m, m)).amax();
    if deviation > 1e-10 {
        return Err(Error::NonOrthonormal { deviation });
    }
    // Qᵀ, m × n. Row rotations (mixing occupied orbitals) are free.
    let mut qt = q.transpose();
    for col in (n - m + 1..n).rev() {
        let k = col + m - n;
        for r in 0..k {
            let (a, b) = (qt[(r, col)], qt[(k, col)]);
            if a == 0.0 {
                continue;
            }
            let rr = a.hypot(b);
            // zero (r, col): row r ← c·r − s·k with c = b/rr, s = a/rr
            rotate_rows(&mut qt, r, k, b / rr, a / rr);
        }
    }
    // Column rotations on (j−1, j) are the mode rotations.
    let mut elim = Vec::with_capacity(m * (n - m));
    for r in 0..m {
        for j in (r + 1..=n - m + r).rev() {
            let (x, y) = (qt[(r, j - 1)], qt[(r, j)]);
            let theta = y.atan2(x);
            let (s, c) = theta.sin_cos();
            for row in 0..m {
                let (a, b) = (qt[(row, j - 1)], qt[(row, j)]);
                qt[(row, j - 1)] = c * a + s * b;
                qt[(row, j)] = -s * a + c * b;
            }
            elim.push((j - 1, j, theta));
        }
    }
    elim.reverse();
    Ok(elim)
}

/// X gates on the first `N_occ` modes of the spin sector, then the Givens network.
///
/// The X gates carry no Jordan-Wigner string, so when several sectors are
/// combined all X gates must precede all rotations; see [`initial_circuit`].
pub fn compile_givens(lat: &HoneycombLattice, basis: &OrbitalBasis) -> Result<Circuit> {
    let mut c = Circuit::new(lat.n_qubits());
    c.append(&occupy(lat, basis))?;
    c.append(&rotations(lat, basis)?)?;
    Ok(c)
}

fn occupy(lat: &HoneycombLattice, basis: &OrbitalBasis) -> Circuit {
    let mut c = Circuit::new(lat.n_qubits());
    for k in 0..basis.n_occ() {
        c.push(Gate::X(lat.qubit_of(k, basis.spin)))
            .expect("qubit in range");
    }
    c
}

fn rotations(lat: &HoneycombLattice, basis: &OrbitalBasis) -> Result<Circuit> {
    if basis.n_modes() != lat.n_sites() {
        return Err(Error::Dimension {
            expected: lat.n_sites(),
            found: basis.n_modes(),
        });
    }
    let mode = |i: usize| lat.qubit_of(i, basis.spin);
    let mut c = Circuit::new(lat.n_qubits());
    for (a, b, theta) in givens_angles(&basis.orbitals)? {
        c.push(Gate::Givens {
            a: mode(a),
            b: mode(b),
            angle: Angle::Fixed(theta),
        })?;
    }
    Ok(c)
}

/// Circuit preparing the half-filled ground state of `H_h` from `|0…0⟩`.
pub fn initial_circuit(lat: &HoneycombLattice, tau: f64) -> Result<Circuit> {
    let bases = Spin::BOTH
        .iter()
        .map(|&s| single_particle_orbitals(lat, tau, s))
        .collect::<Result<Vec<_>>>()?;
    let mut c = Circuit::new(lat.n_qubits());
    for b in &bases {
        c.append(&occupy(lat, b))?;
    }
    for b in &bases {
        c.append(&rotations(lat, b)?)?;
    }
    Ok(c)
}

pub fn prepare_initial(lat: &HoneycombLattice, tau: f64) -> Result<StateVector> {
    run(
        &initial_circuit(lat, tau)?,
        &[],
        &StateVector::new(lat.n_qubits())?,
    )
}
