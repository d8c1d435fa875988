//! Annealing schedule and digitized (counterdiabatic) adiabatic evolution.
//!
//! The interpolating Hamiltonian is `H(λ) = H_h + λ·H_c`, started from the
//! hopping ground state. Each Trotter step evaluates the Hamiltonian at the
//! step midpoint `t_j = (j − ½)δt` and factorizes `exp(−i H(t_j) δt)` into one
//! Pauli exponential per term: hopping terms first, then Coulomb, then CD.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cdsynth::{CdDriver, LinearSweep};
use crate::error::{Error, Result};
use crate::fermion::{build_hamiltonians, HamiltonianSet};
use crate::lattice::{HoneycombLattice, Spin};
use crate::measure::{build_groups, estimate_energy_with, MeasurementGroup};
use crate::pauli::PauliSum;
use crate::stateprep::prepare_initial;
use crate::statevec::{rng_for, Angle, Circuit, Gate, StateVector};

/// `λ(t) = sin²[(π/2)·sin²(πt/2T)]` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    total: f64,
}

impl Schedule {
    pub fn new(total: f64) -> Result<Self> {
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Config(format!(
                "total time must be positive, got {total}"
            )));
        }
        Ok(Schedule { total })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    fn check(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.total;
        if !(t >= -slack && t <= self.total + slack) {
            return Err(Error::TimeOutOfRange {
                t,
                total: self.total,
            });
        }
        Ok(t.clamp(0.0, self.total))
    }

    pub fn lambda(&self, t: f64) -> Result<f64> {
        let t = self.check(t)?;
        let inner = (PI * t / (2.0 * self.total)).sin().powi(2);
        Ok((0.5 * PI * inner).sin().powi(2))
    }

    pub fn lambda_dot(&self, t: f64) -> Result<f64> {
        let t = self.check(t)?;
        let inner = (PI * t / (2.0 * self.total)).sin().powi(2);
        Ok(PI * PI / (4.0 * self.total) * (PI * inner).sin() * (PI * t / self.total).sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Adiabatic,
    AdiabaticCd,
    CdOnly,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Adiabatic, Variant::AdiabaticCd, Variant::CdOnly];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Adiabatic => "adiabatic",
            Variant::AdiabaticCd => "adiabatic_cd",
            Variant::CdOnly => "cd_only",
        }
    }

    pub fn uses_cd(self) -> bool {
        !matches!(self, Variant::Adiabatic)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adiabatic" => Ok(Variant::Adiabatic),
            "adiabatic_cd" | "cd" => Ok(Variant::AdiabaticCd),
            "cd_only" => Ok(Variant::CdOnly),
            other => Err(Error::Parse(format!("unknown evolution variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPlan {
    pub variant: Variant,
    pub steps: usize,
    pub dt: f64,
    pub order: usize,
}

impl EvolutionPlan {
    pub fn new(variant: Variant, steps: usize, dt: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Config(
                "at least one Trotter step is required".into(),
            ));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "Trotter step must be positive, got {dt}"
            )));
        }
        Ok(EvolutionPlan {
            variant,
            steps,
            dt,
            order: 1,
        })
    }

    /// Plan with `steps` steps covering total time `total`.
    pub fn with_total(variant: Variant, steps: usize, total: f64) -> Result<Self> {
        Self::new(variant, steps, total / steps.max(1) as f64)
    }

    pub fn with_order(mut self, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config(
                "nested-commutator order must be at least 1".into(),
            ));
        }
        self.order = order;
        Ok(self)
    }

    pub fn total_time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            total: self.total_time(),
        }
    }

    /// Midpoint time of step `j` (1-based).
    pub fn midpoint(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.steps {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.steps + 1,
            });
        }
        Ok((j as f64 - 0.5) * self.dt)
    }
}

/// Trotter circuit builder for one lattice and plan.
#[derive(Debug, Clone)]
pub struct Evolution {
    plan: EvolutionPlan,
    hams: HamiltonianSet,
    driver: Option<CdDriver>,
}

impl Evolution {
    pub fn new(plan: EvolutionPlan, lat: &HoneycombLattice, tau: f64, u: f64) -> Result<Self> {
        let hams = build_hamiltonians(lat, tau, u)?;
        let driver = if plan.variant.uses_cd() {
            let sweep = LinearSweep::new(hams.h_hop.clone(), hams.h_coul.clone())?;
            Some(CdDriver::new(
                sweep,
                plan.order,
                plan.schedule(),
                plan.steps,
            )?)
        } else {
            None
        };
        Ok(Evolution { plan, hams, driver })
    }

    pub fn plan(&self) -> &EvolutionPlan {
        &self.plan
    }

    pub fn hamiltonians(&self) -> &HamiltonianSet {
        &self.hams
    }

    /// The three ordered Hamiltonian blocks of step `j`: hopping, Coulomb, CD.
    pub fn step_terms(&self, j: usize) -> Result<[PauliSum; 3]> {
        let t = self.plan.midpoint(j)?;
        let n = self.hams.h_fh.n_qubits();
        let lambda = self.plan.schedule().lambda(t)?;
        let cd = match &self.driver {
            Some(d) => d.cd_hamiltonian(t)?,
            None => PauliSum::new(n),
        };
        Ok(match self.plan.variant {
            Variant::CdOnly => [PauliSum::new(n), PauliSum::new(n), cd],
            _ => [
                self.hams.h_hop.clone(),
                self.hams.h_coul.scale_real(lambda),
                cd,
            ],
        })
    }

    /// First-order Trotter fragment for step `j`; identity terms are dropped.
    pub fn build_step(&self, j: usize) -> Result<Circuit> {
        let mut c = Circuit::new(self.hams.h_fh.n_qubits());
        for block in self.step_terms(j)? {
            for (w, coeff) in block.iter() {
                if w.is_identity() {
                    continue;
                }
                c.push(Gate::ExpPauli {
                    word: *w,
                    angle: Angle::Fixed(coeff.re * self.plan.dt),
                })?;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementMode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    /// Standard error of a shot estimate; `None` in exact mode.
    pub std_err: Option<f64>,
}

/// Result of one evolution: per-step energies of `H_FH` plus the final state.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub records: Vec<EnergyRecord>,
    pub final_state: StateVector,
    /// Largest probability mass outside the half-filling sector seen along the way.
    pub max_leakage: f64,
}

impl EvolutionRun {
    pub fn initial_energy(&self) -> f64 {
        self.records[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.energy)
    }
}

fn record(
    state: &StateVector,
    h_fh: &PauliSum,
    groups: &[MeasurementGroup],
    hams: &HamiltonianSet,
    mode: MeasurementMode,
    step: usize,
    t: f64,
) -> Result<EnergyRecord> {
    let (energy, std_err) = match mode {
        MeasurementMode::Exact => (state.expectation_complex(h_fh)?.re, None),
        MeasurementMode::Shots { shots, seed } => {
            let est = estimate_energy_with(
                state,
                groups,
                shots,
                &mut rng_for(seed, step as u64),
                hams.tau,
                hams.u,
            )?;
            (est.energy, Some(est.std_err))
        }
    };
    Ok(EnergyRecord {
        step,
        t,
        energy,
        std_err,
    })
}

/// Evolves the prepared hopping ground state and records `⟨H_FH⟩` after every
/// step (step 0 is the initial state).
pub fn run_evolution(
    plan: &EvolutionPlan,
    lat: &HoneycombLattice,
    tau: f64,
    u: f64,
    mode: MeasurementMode,
) -> Result<EvolutionRun> {
    let evo = Evolution::new(*plan, lat, tau, u)?;
    let mut state = prepare_initial(lat, tau)?;
    let groups = match mode {
        MeasurementMode::Exact => Vec::new(),
        MeasurementMode::Shots { .. } => build_groups(lat)?,
    };
    let (up_mask, down_mask) = (lat.spin_mask(Spin::Up), lat.spin_mask(Spin::Down));
    let (n_up, n_down) = half_filling(lat.n_sites());
    let h_fh = &evo.hams.h_fh;
    let mut records = vec![record(&state, h_fh, &groups, &evo.hams, mode, 0, 0.0)?];
    let mut max_leakage = 0.0f64;
    for j in 1..=plan.steps {
        for block in evo.step_terms(j)? {
            for (w, coeff) in block.iter() {
                if !w.is_identity() {
                    state.apply_exp_pauli(w, coeff.re * plan.dt)?;
                }
            }
        }
        max_leakage = max_leakage.max(state.leakage(up_mask, n_up, down_mask, n_down));
        let t = j as f64 * plan.dt;
        records.push(record(&state, h_fh, &groups, &evo.hams, mode, j, t)?);
    }
    Ok(EvolutionRun {
        records,
        final_state: state,
        max_leakage,
    })
}

/// Half-filling occupations; an odd site count puts the extra particle in spin up.
pub fn half_filling(n_sites: usize) -> (u32, u32) {
    (n_sites.div_ceil(2) as u32, (n_sites / 2) as u32)
}

/// `ΔE = |(E_g − E_f)/(E_g − E_i)|·100` in percent.
pub fn energy_error(e_final: f64, e_ground: f64, e_initial: f64) -> Result<f64> {
    let gap = e_ground - e_initial;
    if gap.abs() < 1e-14 {
        return Err(Error::Undefined(
            "initial state already has the ground energy",
        ));
    }
    Ok(((e_ground - e_final) / gap).abs() * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub variant: Variant,
    pub steps: usize,
    pub dt: f64,
    pub final_energy: f64,
    pub initial_energy: f64,
    pub delta_e_pct: f64,
}

/// ΔE on the grid `steps × dts × variants`, cells evaluated in parallel and
/// returned in grid order.
pub fn sweep(
    lat: &HoneycombLattice,
    tau: f64,
    u: f64,
    steps: &[usize],
    dts: &[f64],
    variants: &[Variant],
    mode: MeasurementMode,
    e_ground: f64,
) -> Result<Vec<SweepCell>> {
    if steps.is_empty() || dts.is_empty() || variants.is_empty() {
        return Err(Error::Config("sweep grid must be nonempty".into()));
    }
    let mut cells = Vec::new();
    for &n in steps {
        for &dt in dts {
            for &v in variants {
                cells.push(EvolutionPlan::new(v, n, dt)?);
            }
        }
    }
    cells
        .par_iter()
        .map(|plan| {
            let run = run_evolution(plan, lat, tau, u, mode)?;
            Ok(SweepCell {
                variant: plan.variant,
                steps: plan.steps,
                dt: plan.dt,
                final_energy: run.final_energy(),
                initial_energy: run.initial_energy(),
                delta_e_pct: energy_error(run.final_energy(), e_ground, run.initial_energy())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints_and_midpoint() {
        let s = Schedule::new(3.0).unwrap();
        assert_eq!(s.lambda(0.0).unwrap(), 0.0);
        assert!((s.lambda(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.lambda(1.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(s.lambda_dot(0.0).unwrap(), 0.0);
        assert!(s.lambda_dot(3.0).unwrap().abs() < 1e-15);
        assert!(matches!(s.lambda(3.1), Err(Error::TimeOutOfRange { .. })));
        assert!(s.lambda(-0.1).is_err());
        assert!(Schedule::new(0.0).is_err());
    }

    #[test]
    fn lambda_dot_matches_finite_differences() {
        let s = Schedule::new(2.0).unwrap();
        let h = 1e-6;
        for k in 1..=20 {
            let t = 2.0 * k as f64 / 21.0;
            let fd = (s.lambda(t + h).unwrap() - s.lambda(t - h).unwrap()) / (2.0 * h);
            assert!((fd - s.lambda_dot(t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn energy_error_cases() {
        assert_eq!(energy_error(-2.0, -2.0, 1.0).unwrap(), 0.0);
        assert_eq!(energy_error(1.0, -2.0, 1.0).unwrap(), 100.0);
        assert!((energy_error(-0.5, -2.0, 1.0).unwrap() - 50.0).abs() < 1e-12);
        assert!(energy_error(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn plan_validation() {
        assert!(EvolutionPlan::new(Variant::Adiabatic, 0, 0.1).is_err());
        assert!(EvolutionPlan::new(Variant::Adiabatic, 3, 0.0).is_err());
        let p = EvolutionPlan::new(Variant::CdOnly, 4, 0.25).unwrap();
        assert_eq!(p.total_time(), 1.0);
        assert_eq!(p.midpoint(1).unwrap(), 0.125);
        assert!(p.midpoint(0).is_err() && p.midpoint(5).is_err());
        assert!(p.with_order(0).is_err());
        assert_eq!("cd".parse::<Variant>().unwrap(), Variant::AdiabaticCd);
    }

    #[test]
    fn single_step_structure() {
        let lat = HoneycombLattice::build(1, 1).unwrap();
        let plan = EvolutionPlan::new(Variant::Adiabatic, 1, 0.1).unwrap();
        let evo = Evolution::new(plan, &lat, 1.0, 1.5).unwrap();
        let c = evo.build_step(1).unwrap();
        let hams = evo.hamiltonians();
        // identity part of H_c is dropped
        assert_eq!(c.len(), hams.h_hop.len() + hams.h_coul.len() - 1);
        assert!(evo.build_step(2).is_err());
    }

    #[test]
    fn cd_only_near_identity_at_endpoints() {
        let lat = HoneycombLattice::build(1, 1).unwrap();
        let plan = EvolutionPlan::new(Variant::CdOnly, 400, 0.01).unwrap();
        let evo = Evolution::new(plan, &lat, 1.0, 1.5).unwrap();
        let c = evo.build_step(1).unwrap();
        let largest = c
            .gates()
            .iter()
            .filter_map(|g| g.angle())
            .map(|a| a.resolve(&[]).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(largest < 1e-5, "{largest}");
    }
}
