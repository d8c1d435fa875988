use std::fmt;
use std::str::FromStr;

use crate::cdsynth::{gauge_basis, two_body_pool, CdPool};
use crate::error::{Error, Result};
use crate::fermion::build_hamiltonians;
use crate::lattice::HoneycombLattice;
use crate::measure::route;
use crate::stateprep::initial_circuit;
use crate::statevec::{Angle, Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    Hv,
    CdInspired,
}

impl AnsatzKind {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Hv => "hv",
            AnsatzKind::CdInspired => "cd",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hv" => Ok(AnsatzKind::Hv),
            "cd" | "cd_inspired" => Ok(AnsatzKind::CdInspired),
            other => Err(Error::Parse(format!("unknown ansatz '{other}'"))),
        }
    }
}

/// Parameterised circuit applied to the prepared hopping ground state.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    pub layers: usize,
    /// Fixed preparation of the initial state from `|0…0⟩`.
    pub prep: Circuit,
    pub circuit: Circuit,
}

impl Ansatz {
    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }
}

/// One HV layer: `e^{−iγ n↑n↓}` per site, then per hopping group the FSWAP
/// routing, one `e^{−iβ(XX+YY)/2}` per pair, and the routing undone.
fn hv_layer(lat: &HoneycombLattice, c: &mut Circuit) -> Result<()> {
    let n = lat.n_qubits();
    let groups = lat.edge_groups();
    for &(a, b) in &groups.coulomb {
        let slot = c.add_param();
        c.push(Gate::CPhase {
            a,
            b,
            angle: Angle::param(slot),
        })?;
    }
    for pairs in [
        &groups.horizontal_even,
        &groups.horizontal_odd,
        &groups.vertical,
    ] {
        let routing = route(n, pairs)?;
        c.append(&routing.circuit(n)?)?;
        for &(a, b) in pairs.iter() {
            let slot = c.add_param();
            c.push(Gate::Hop {
                a: routing.position[a],
                b: routing.position[b],
                angle: Angle::param(slot),
            })?;
        }
        c.append(&routing.inverse_circuit(n)?)?;
    }
    Ok(())
}

/// Two-body pool of the first-order operator `i[H_h, H_c]` for a lattice.
pub fn lattice_pool(lat: &HoneycombLattice, tau: f64, u: f64) -> Result<CdPool> {
    let hams = build_hamiltonians(lat, tau, u)?;
    let o1 = gauge_basis(&hams.h_hop, &hams.h_coul, 1)?;
    two_body_pool(&o1[0])
}

/// One CD layer: `e^{−iθ_k G_k}` per pool generator, realised as one Pauli
/// exponential per string sharing the generator's parameter (the strings of
/// a generator commute).
fn cd_layer(pool: &CdPool, c: &mut Circuit) -> Result<()> {
    for g in &pool.generators {
        let slot = c.add_param();
        for (w, coeff) in g.op.iter() {
            c.push(Gate::ExpPauli {
                word: *w,
                angle: Angle::Param {
                    slot,
                    scale: coeff.re,
                },
            })?;
        }
    }
    Ok(())
}

pub fn build_ansatz(
    kind: AnsatzKind,
    lat: &HoneycombLattice,
    tau: f64,
    u: f64,
    layers: usize,
) -> Result<Ansatz> {
    if layers == 0 {
        return Err(Error::Config("an ansatz needs at least one layer".into()));
    }
    let mut circuit = Circuit::new(lat.n_qubits());
    let pool = match kind {
        AnsatzKind::CdInspired => Some(lattice_pool(lat, tau, u)?),
        AnsatzKind::Hv => None,
    };
    for _ in 0..layers {
        match &pool {
            Some(p) => cd_layer(p, &mut circuit)?,
            None => hv_layer(lat, &mut circuit)?,
        }
    }
    Ok(Ansatz {
        kind,
        layers,
        prep: initial_circuit(lat, tau)?,
        circuit,
    })
}

/// FSWAP gates in the variational circuit (routing there and back).
pub fn fswap_count(ansatz: &Ansatz) -> usize {
    ansatz
        .circuit
        .gates()
        .iter()
        .filter(|g| matches!(g, Gate::Fswap(..)))
        .count()
}
