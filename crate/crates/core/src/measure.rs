//! Shot-based energy estimation in four measurement groups.
//!
//! Group 1 reads the on-site pairs in the computational basis. Groups 2–4
//! first permute fermionic modes with an FSWAP network so every pair sits on
//! neighbouring qubits, then rotate each pair into the eigenbasis of
//! `½(XX + YY)`: after [`Gate::HopBasis`] the outcomes `10`/`01` (first mode
//! occupied / second mode occupied) carry eigenvalues `+1`/`−1`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{HoneycombLattice, QubitPair};
use crate::statevec::{rng_for, run, sample_with, Circuit, Gate, StateVector};

/// Default shots per measurement group.
pub const DEFAULT_SHOTS: u64 = 30_000;

/// A fermionic mode permutation realised by adjacent FSWAPs.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing {
    /// Adjacent qubit positions `(p, p + 1)` in application order.
    pub swaps: Vec<(usize, usize)>,
    /// `position[mode]` after the network.
    pub position: Vec<usize>,
}

impl Routing {
    pub fn circuit(&self, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for &(a, b) in &self.swaps {
            c.push(Gate::Fswap(a, b))?;
        }
        Ok(c)
    }

    /// The inverse network (swaps in reverse order).
    pub fn inverse_circuit(&self, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for &(a, b) in self.swaps.iter().rev() {
            c.push(Gate::Fswap(a, b))?;
        }
        Ok(c)
    }
}

/// Places the second mode of every pair right after the first.
///
/// Modes are visited in ascending order; a mode opening a pair is emitted
/// together with its partner, other modes keep their relative order. The
/// permutation is then built by insertion sort, so the swap count is the
/// number of inversions.
pub fn route(n_qubits: usize, pairs: &[QubitPair]) -> Result<Routing> {
    let mut partner = vec![None; n_qubits];
    for &(a, b) in pairs {
        let (lo, hi) = (a.min(b), a.max(b));
        if hi >= n_qubits {
            return Err(Error::IndexOutOfRange {
                index: hi,
                bound: n_qubits,
            });
        }
        if lo == hi || partner[lo].is_some() || partner[hi].is_some() {
            return Err(Error::Config(format!("pairs overlap at ({a}, {b})")));
        }
        partner[lo] = Some(hi);
        partner[hi] = Some(usize::MAX);
    }
    let mut target = Vec::with_capacity(n_qubits);
    for m in 0..n_qubits {
        match partner[m] {
            Some(usize::MAX) => {}
            Some(p) => {
                target.push(m);
                target.push(p);
            }
            None => target.push(m),
        }
    }
    let mut current: Vec<usize> = (0..n_qubits).collect();
    let mut swaps = Vec::new();
    for p in 0..n_qubits {
        let q = current
            .iter()
            .position(|&m| m == target[p])
            .expect("permutation");
        for k in (p..q).rev() {
            current.swap(k, k + 1);
            swaps.push((k, k + 1));
        }
    }
    let mut position = vec![0; n_qubits];
    for (p, &m) in current.iter().enumerate() {
        position[m] = p;
    }
    Ok(Routing { swaps, position })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Coulomb,
    Hopping,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub kind: GroupKind,
    /// Lattice qubit pairs measured by this group.
    pub pairs: Vec<QubitPair>,
    /// Qubit positions holding each pair after routing.
    pub measured: Vec<QubitPair>,
    pub routing: Circuit,
    pub basis_change: Circuit,
}

impl MeasurementGroup {
    /// Routing followed by the basis change.
    pub fn circuit(&self) -> Result<Circuit> {
        let mut c = self.routing.clone();
        c.append(&self.basis_change)?;
        Ok(c)
    }

    /// Value of this group's energy contribution on one basis outcome.
    pub fn shot_value(&self, outcome: u64, tau: f64, u: f64) -> f64 {
        let bit = |q: usize| outcome >> q & 1 == 1;
        match self.kind {
            GroupKind::Coulomb => {
                u * self
                    .measured
                    .iter()
                    .filter(|&&(a, b)| bit(a) && bit(b))
                    .count() as f64
            }
            GroupKind::Hopping => {
                let s: f64 = self
                    .measured
                    .iter()
                    .map(|&(a, b)| match (bit(a), bit(b)) {
                        (true, false) => 1.0,
                        (false, true) => -1.0,
                        _ => 0.0,
                    })
                    .sum();
                -tau * s
            }
        }
    }
}

pub fn build_groups(lat: &HoneycombLattice) -> Result<Vec<MeasurementGroup>> {
    let n = lat.n_qubits();
    let eg = lat.edge_groups();
    let mut groups = vec![MeasurementGroup {
        kind: GroupKind::Coulomb,
        pairs: eg.coulomb.clone(),
        measured: eg.coulomb.clone(),
        routing: Circuit::new(n),
        basis_change: Circuit::new(n),
    }];
    for pairs in [&eg.horizontal_even, &eg.horizontal_odd, &eg.vertical] {
        let routing = route(n, pairs)?;
        let measured: Vec<QubitPair> = pairs
            .iter()
            .map(|&(a, b)| (routing.position[a], routing.position[b]))
            .collect();
        let mut basis_change = Circuit::new(n);
        for &(a, b) in &measured {
            basis_change.push(Gate::HopBasis(a, b))?;
        }
        groups.push(MeasurementGroup {
            kind: GroupKind::Hopping,
            pairs: pairs.clone(),
            measured,
            routing: routing.circuit(n)?,
            basis_change,
        });
    }
    Ok(groups)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub std_err: f64,
}

/// Outcome histogram of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCounts {
    pub group: usize,
    pub counts: BTreeMap<u64, u64>,
}

fn group_stats(
    group: &MeasurementGroup,
    counts: &BTreeMap<u64, u64>,
    shots: u64,
    tau: f64,
    u: f64,
) -> (f64, f64) {
    let (mut s1, mut s2) = (0.0, 0.0);
    for (&outcome, &k) in counts {
        let v = group.shot_value(outcome, tau, u);
        s1 += v * k as f64;
        s2 += v * v * k as f64;
    }
    let n = shots as f64;
    let mean = s1 / n;
    let var = if shots > 1 {
        (s2 - n * mean * mean).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    (mean, var / n)
}

/// Samples every group with `shots` shots drawn from `rng`.
pub fn measure_groups<R: Rng>(
    state: &StateVector,
    groups: &[MeasurementGroup],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<GroupCounts>> {
    groups
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let rotated = run(&g.circuit()?, &[], state)?;
            Ok(GroupCounts {
                group: k,
                counts: sample_with(&rotated, shots, rng)?,
            })
        })
        .collect()
}

pub fn estimate_from_counts(
    groups: &[MeasurementGroup],
    counts: &[GroupCounts],
    shots: u64,
    tau: f64,
    u: f64,
) -> EnergyEstimate {
    let (mut energy, mut var) = (0.0, 0.0);
    for c in counts {
        let (m, v) = group_stats(&groups[c.group], &c.counts, shots, tau, u);
        energy += m;
        var += v;
    }
    EnergyEstimate {
        energy,
        std_err: var.sqrt(),
    }
}

pub fn estimate_energy_with<R: Rng>(
    state: &StateVector,
    groups: &[MeasurementGroup],
    shots: u64,
    rng: &mut R,
    tau: f64,
    u: f64,
) -> Result<EnergyEstimate> {
    let counts = measure_groups(state, groups, shots, rng)?;
    Ok(estimate_from_counts(groups, &counts, shots, tau, u))
}

/// Energy and standard error; group `k` samples from stream `k` of `seed`,
/// so groups run in parallel without changing the result.
pub fn estimate_energy(
    state: &StateVector,
    groups: &[MeasurementGroup],
    shots: u64,
    seed: u64,
    tau: f64,
    u: f64,
) -> Result<EnergyEstimate> {
    let counts = groups
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let rotated = run(&g.circuit()?, &[], state)?;
            Ok(GroupCounts {
                group: k,
                counts: sample_with(&rotated, shots, &mut rng_for(seed, k as u64))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(estimate_from_counts(groups, &counts, shots, tau, u))
}

/// One CSV row: group, lattice pair, two-bit outcome, count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub group: usize,
    pub pair: QubitPair,
    pub outcome: &'static str,
    pub count: u64,
}

/// Per-pair marginals of the group histograms (groups numbered from 1).
pub fn pair_records(groups: &[MeasurementGroup], counts: &[GroupCounts]) -> Vec<PairRecord> {
    const LABELS: [&str; 4] = ["00", "01", "10", "11"];
    let mut out = Vec::new();
    for c in counts {
        let g = &groups[c.group];
        for (&pair, &(a, b)) in g.pairs.iter().zip(&g.measured) {
            let mut tally = [0u64; 4];
            for (&s, &k) in &c.counts {
                let idx = ((s >> a & 1) << 1 | (s >> b & 1)) as usize;
                tally[idx] += k;
            }
            for (label, count) in LABELS.iter().zip(tally) {
                out.push(PairRecord {
                    group: c.group + 1,
                    pair,
                    outcome: label,
                    count,
                });
            }
        }
    }
    out
}

pub const RECORD_CSV_HEADER: &str = "group,pair,outcome,count";

impl PairRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{}-{},{},{}",
            self.group, self.pair.0, self.pair.1, self.outcome, self.count
        )
    }
}
