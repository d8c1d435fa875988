//! Jordan-Wigner ladder operators and the Fermi-Hubbard Hamiltonians.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{HoneycombLattice, Spin};
use crate::pauli::{Letter, PauliSum, PauliWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// `c_j†` or `c_j` on `n` modes: `½(X_j ∓ iY_j)·Z_0⋯Z_{j−1}`.
pub fn jw_ladder(j: usize, n: usize, kind: Ladder) -> Result<PauliSum> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    let mut x = PauliWord::single(j, Letter::X);
    let mut y = PauliWord::single(j, Letter::Y);
    for q in 0..j {
        x.set(q, Letter::Z);
        y.set(q, Letter::Z);
    }
    let sign = match kind {
        Ladder::Create => -1.0,
        Ladder::Annihilate => 1.0,
    };
    Ok(PauliSum::from_terms(
        n,
        [
            (x, Complex64::new(0.5, 0.0)),
            (y, Complex64::new(0.0, 0.5 * sign)),
        ],
    ))
}

/// Number operator `c_j† c_j = ½(I − Z_j)`.
pub fn number_op(j: usize, n: usize) -> Result<PauliSum> {
    let up = jw_ladder(j, n, Ladder::Create)?;
    let down = jw_ladder(j, n, Ladder::Annihilate)?;
    up.try_mul(&down)
}

/// `c_a† c_b + c_b† c_a`.
pub fn hopping_term(a: usize, b: usize, n: usize) -> Result<PauliSum> {
    let ab = jw_ladder(a, n, Ladder::Create)?.try_mul(&jw_ladder(b, n, Ladder::Annihilate)?)?;
    ab.try_add(&ab.dagger())
}

/// Hopping, Coulomb and full Hubbard Hamiltonians of one lattice.
#[derive(Debug, Clone)]
pub struct HamiltonianSet {
    pub h_hop: PauliSum,
    pub h_coul: PauliSum,
    pub h_fh: PauliSum,
    pub tau: f64,
    pub u: f64,
}

/// `H_h = −τ Σ_{⟨ij⟩,σ} (c_iσ† c_jσ + h.c.)`, `H_c = U Σ_i n_i↑ n_i↓`.
///
/// The identity parts of the Coulomb term are kept so energies are absolute.
pub fn build_hamiltonians(lat: &HoneycombLattice, tau: f64, u: f64) -> Result<HamiltonianSet> {
    if !(tau > 0.0) {
        return Err(Error::Config(format!(
            "hopping amplitude must be positive, got {tau}"
        )));
    }
    let n = lat.n_qubits();
    let mut h_hop = PauliSum::new(n);
    for e in lat.edges() {
        for (qa, qb) in lat.edge_pairs(e) {
            h_hop = h_hop.try_add(&hopping_term(qa, qb, n)?.scale_real(-tau))?;
        }
    }
    let mut h_coul = PauliSum::new(n);
    for site in 0..lat.n_sites() {
        let up = number_op(lat.qubit_of(site, Spin::Up), n)?;
        let down = number_op(lat.qubit_of(site, Spin::Down), n)?;
        h_coul = h_coul.try_add(&up.try_mul(&down)?.scale_real(u))?;
    }
    let h_fh = h_hop.try_add(&h_coul)?;
    Ok(HamiltonianSet {
        h_hop,
        h_coul,
        h_fh,
        tau,
        u,
    })
}

/// Total particle number of one spin species.
pub fn spin_number(lat: &HoneycombLattice, spin: Spin) -> Result<PauliSum> {
    let n = lat.n_qubits();
    let mut total = PauliSum::new(n);
    for q in lat.spin_qubits(spin) {
        total = total.try_add(&number_op(q, n)?)?;
    }
    Ok(total)
}
