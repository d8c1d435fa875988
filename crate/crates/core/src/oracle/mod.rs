//! Reference ground energies restricted to a particle-number sector.
//!
//! Small sectors are diagonalized densely; larger ones use Lanczos with full
//! reorthogonalization and explicit restarts from the current Ritz vector.

mod golden;
mod lanczos;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::fermion::build_hamiltonians;
use crate::lattice::{HoneycombLattice, Spin};
use crate::pauli::PauliSum;
use crate::statevec::StateVector;

pub use golden::{GoldenEntry, GoldenRegistry, GOLDEN_REGISTRY};
pub use lanczos::LanczosConfig;

/// Largest sector dimension solved densely by [`Method::Auto`].
pub const DENSE_SECTOR_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub n_up: u32,
    pub n_down: u32,
}

impl Sector {
    pub fn new(n_up: u32, n_down: u32) -> Self {
        Sector { n_up, n_down }
    }

    /// Half filling; odd site counts put the extra particle in spin up.
    pub fn half_filling(lat: &HoneycombLattice) -> Self {
        let (n_up, n_down) = crate::evolve::half_filling(lat.n_sites());
        Sector { n_up, n_down }
    }

    pub fn flipped(self) -> Self {
        Sector {
            n_up: self.n_down,
            n_down: self.n_up,
        }
    }
}

/// Sorted computational basis states with fixed spin-resolved occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n_qubits: usize,
    sector: Sector,
    up_mask: u64,
    down_mask: u64,
    states: Vec<u64>,
}

fn subsets(qubits: &[usize], k: usize) -> Vec<u64> {
    let n = qubits.len();
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    // Gosper's hack over k-of-n index patterns.
    let mut v: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while v < limit {
        let mut s = 0u64;
        let mut bits = v;
        while bits != 0 {
            s |= 1u64 << qubits[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        out.push(s);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

impl SectorBasis {
    pub fn new(lat: &HoneycombLattice, sector: Sector) -> Result<Self> {
        Self::from_masks(
            lat.n_qubits(),
            lat.spin_mask(Spin::Up),
            lat.spin_mask(Spin::Down),
            sector,
        )
    }

    pub fn from_masks(
        n_qubits: usize,
        up_mask: u64,
        down_mask: u64,
        sector: Sector,
    ) -> Result<Self> {
        let qs = |m: u64| (0..64).filter(|q| m >> q & 1 == 1).collect::<Vec<usize>>();
        let (ups, downs) = (qs(up_mask), qs(down_mask));
        if sector.n_up as usize > ups.len() || sector.n_down as usize > downs.len() {
            return Err(Error::Config(format!(
                "sector ({}, {}) exceeds {} up / {} down modes",
                sector.n_up,
                sector.n_down,
                ups.len(),
                downs.len()
            )));
        }
        let up_states = subsets(&ups, sector.n_up as usize);
        let down_states = subsets(&downs, sector.n_down as usize);
        let mut states = Vec::with_capacity(up_states.len() * down_states.len());
        for &u in &up_states {
            for &d in &down_states {
                states.push(u | d);
            }
        }
        states.sort_unstable();
        Ok(SectorBasis {
            n_qubits,
            sector,
            up_mask,
            down_mask,
            states,
        })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, s: u64) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }

    pub fn contains(&self, s: u64) -> bool {
        (s & self.up_mask).count_ones() == self.sector.n_up
            && (s & self.down_mask).count_ones() == self.sector.n_down
    }

    /// Lifts sector amplitudes into a full register.
    pub fn embed(&self, v: &[Complex64]) -> Result<StateVector> {
        check_dim(self.len(), v.len())?;
        let mut st = StateVector::new(self.n_qubits)?;
        let amps = st.amplitudes_mut();
        amps[0] = Complex64::new(0.0, 0.0);
        for (&s, &a) in self.states.iter().zip(v) {
            amps[s as usize] = a;
        }
        Ok(st)
    }

    /// Sector amplitudes of a full register.
    pub fn restrict(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        check_dim(self.n_qubits, state.n_qubits())?;
        Ok(self
            .states
            .iter()
            .map(|&s| state.amplitudes()[s as usize])
            .collect())
    }
}

/// A Hamiltonian restricted to one sector, terms grouped by their X mask.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    basis: SectorBasis,
    /// `(x, [(z, c·i^{#Y})])`: `P|s⟩ = c·i^{#Y}(−1)^{|s∧z|} |s⊕x⟩`.
    groups: Vec<(u64, Vec<(u64, Complex64)>)>,
}

impl SectorOperator {
    pub fn new(h: &PauliSum, basis: SectorBasis) -> Result<Self> {
        check_dim(basis.n_qubits(), h.n_qubits())?;
        let mut groups: Vec<(u64, Vec<(u64, Complex64)>)> = Vec::new();
        for (w, c) in h.iter() {
            let entry = (w.z_mask(), c * w.y_phase());
            match groups.iter_mut().find(|(x, _)| *x == w.x_mask()) {
                Some(g) => g.1.push(entry),
                None => groups.push((w.x_mask(), vec![entry])),
            }
        }
        Ok(SectorOperator { basis, groups })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `⟨s ⊕ x| H_x |s⟩` for one X-mask group.
    fn element(terms: &[(u64, Complex64)], s: u64) -> Complex64 {
        terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(z, c)| {
            if (s & z).count_ones() % 2 == 1 {
                acc - c
            } else {
                acc + c
            }
        })
    }

    /// Row `i` as `(column, value)` pairs.
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let s_i = self.basis.states[i];
        self.groups.iter().filter_map(move |(x, terms)| {
            let s_j = s_i ^ x;
            let j = self.basis.index_of(s_j)?;
            let v = Self::element(terms, s_j);
            (v.norm_sqr() > 0.0).then_some((j, v))
        })
    }

    pub fn matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(256)
            .for_each(|(i, o)| {
                *o = self.row(i).map(|(j, h)| h * v[j]).sum();
            });
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        if n > DENSE_SECTOR_LIMIT {
            return Err(Error::Capacity {
                what: "dense sector dimension",
                requested: n,
                limit: DENSE_SECTOR_LIMIT,
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, h) in self.row(i) {
                m[(i, j)] += h;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Sector amplitudes; always present for dense solves, on request for Lanczos.
    pub vector: Option<Vec<Complex64>>,
    pub residual: f64,
    pub method: Method,
    pub dim: usize,
    /// Ritz value at the end of each Lanczos cycle.
    pub restart_energies: Vec<f64>,
}

pub fn ground_state(
    op: &SectorOperator,
    method: Method,
    cfg: &LanczosConfig,
) -> Result<GroundState> {
    if op.dim() == 0 {
        return Err(Error::Config("empty sector".into()));
    }
    let dense = match method {
        Method::Auto => op.dim() <= DENSE_SECTOR_LIMIT,
        Method::Dense => true,
        Method::Lanczos => false,
    };
    if dense {
        let eig = op.to_dense()?.symmetric_eigen();
        let (k, &energy) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let vector = eig.eigenvectors.column(k).iter().copied().collect();
        return Ok(GroundState {
            energy,
            vector: Some(vector),
            residual: 0.0,
            method: Method::Dense,
            dim: op.dim(),
            restart_energies: Vec::new(),
        });
    }
    lanczos::lowest(op, cfg)
}

/// `E₀` of `H_FH` in `sector`.
pub fn ground_energy(
    lat: &HoneycombLattice,
    tau: f64,
    u: f64,
    sector: Sector,
) -> Result<GroundState> {
    ground_energy_with(lat, tau, u, sector, Method::Auto, &LanczosConfig::default())
}

pub fn ground_energy_with(
    lat: &HoneycombLattice,
    tau: f64,
    u: f64,
    sector: Sector,
    method: Method,
    cfg: &LanczosConfig,
) -> Result<GroundState> {
    let hams = build_hamiltonians(lat, tau, u)?;
    let op = SectorOperator::new(&hams.h_fh, SectorBasis::new(lat, sector)?)?;
    ground_state(&op, method, cfg)
}

/// Lowest eigenvalue of an arbitrary number-conserving operator in `sector`.
pub fn sector_minimum(
    h: &PauliSum,
    lat: &HoneycombLattice,
    sector: Sector,
    method: Method,
) -> Result<GroundState> {
    let op = SectorOperator::new(h, SectorBasis::new(lat, sector)?)?;
    ground_state(&op, method, &LanczosConfig::default())
}

/// `⟨ψ|H|ψ⟩`; a non-negligible imaginary part means `H` was not Hermitian.
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    let e = state.expectation_complex(h)?;
    if e.im.abs() > 1e-10 {
        return Err(Error::Config(format!(
            "expectation has imaginary part {:e}; operator is not Hermitian",
            e.im
        )));
    }
    Ok(e.re)
}
