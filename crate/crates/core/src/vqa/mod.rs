//! Variational ground-state search: ansätze, cost, gradients and training.
//!
//! Exact-mode gradients use the adjoint method (one backward sweep). Noisy
//! exact-mode costs are averages over pre-sampled trajectories whose events
//! do not depend on the parameters, so their gradient is the average of
//! per-trajectory adjoint gradients. Shot estimates fall back to central
//! finite differences with common random numbers.

mod ansatz;
mod optim;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::fermion::HamiltonianSet;
use crate::lattice::HoneycombLattice;
use crate::measure::{build_groups, estimate_energy, MeasurementGroup};
use crate::pauli::PauliSum;
use crate::statevec::{
    apply_generator, rng_for, run, Circuit, NoiseModel, NoisePattern, StateVector,
};

pub use ansatz::{build_ansatz, fswap_count, lattice_pool, Ansatz, AnsatzKind};
pub use optim::{Adagrad, DEFAULT_EPS, DEFAULT_ETA};

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TRAJECTORIES: usize = 100;
pub const DEFAULT_FD_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostMode {
    Exact,
    Shots { shots: u64 },
}

/// Everything needed to evaluate the cost of one ansatz.
#[derive(Debug, Clone)]
pub struct Problem {
    pub ansatz: Ansatz,
    pub hams: HamiltonianSet,
    pub initial: StateVector,
    groups: Vec<MeasurementGroup>,
}

impl Problem {
    pub fn new(ansatz: Ansatz, lat: &HoneycombLattice, hams: HamiltonianSet) -> Result<Self> {
        let initial = run(&ansatz.prep, &[], &StateVector::new(lat.n_qubits())?)?;
        Ok(Problem {
            ansatz,
            hams,
            initial,
            groups: build_groups(lat)?,
        })
    }

    pub fn h(&self) -> &PauliSum {
        &self.hams.h_fh
    }

    pub fn n_params(&self) -> usize {
        self.ansatz.n_params()
    }

    pub fn state(&self, params: &[f64]) -> Result<StateVector> {
        run(&self.ansatz.circuit, params, &self.initial)
    }

    fn energy_of(&self, state: &StateVector, mode: CostMode, seed: u64) -> Result<f64> {
        match mode {
            CostMode::Exact => crate::oracle::expectation(state, self.h()),
            CostMode::Shots { shots } => {
                Ok(
                    estimate_energy(state, &self.groups, shots, seed, self.hams.tau, self.hams.u)?
                        .energy,
                )
            }
        }
    }

    /// Noiseless cost.
    pub fn cost(&self, params: &[f64], mode: CostMode, seed: u64) -> Result<f64> {
        self.energy_of(&self.state(params)?, mode, seed)
    }

    /// Trajectory-averaged noisy cost; trajectory `k` is the [`NoisePattern`]
    /// of stream `k` of `seed`. A shot estimate of an unnormalised damping
    /// trajectory is taken on the normalised state and rescaled by its norm.
    pub fn noisy_cost(
        &self,
        params: &[f64],
        mode: CostMode,
        noise: &NoiseModel,
        trajectories: usize,
        seed: u64,
    ) -> Result<f64> {
        let energies = (0..trajectories as u64)
            .into_par_iter()
            .map(|k| {
                let pattern = NoisePattern::sample(&self.ansatz.circuit, noise, seed, k)?;
                let mut st = pattern.run(&self.ansatz.circuit, params, &self.initial)?;
                let weight = st.norm_sqr();
                if weight == 0.0 {
                    return Ok(0.0);
                }
                st.normalize();
                Ok(weight * self.energy_of(&st, mode, seed ^ k.rotate_left(32))?)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(energies.iter().sum::<f64>() / trajectories.max(1) as f64)
    }

    /// Energy and gradient by the adjoint method, exact expectation.
    pub fn adjoint(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        adjoint_gradient(&self.ansatz.circuit, params, &self.initial, self.h())
    }
}

/// `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩` and `∂E/∂θ` for `|ψ(θ)⟩ = U(θ)|ψ₀⟩`.
pub fn adjoint_gradient(
    circuit: &Circuit,
    params: &[f64],
    initial: &StateVector,
    h: &PauliSum,
) -> Result<(f64, Vec<f64>)> {
    let mut psi = run(circuit, params, initial)?;
    let mut lam = StateVector::from_amplitudes(psi.apply_sum(h)?)?;
    let energy = psi.inner(&lam)?.re;
    let mut grad = vec![0.0; circuit.n_params()];
    for gate in circuit.gates().iter().rev() {
        if let Some((slot, scale)) = gate.angle().and_then(|a| a.slot()) {
            let g = apply_generator(&psi, gate).ok_or_else(|| {
                Error::Config(format!(
                    "{} has no generator for differentiation",
                    gate.name()
                ))
            })?;
            // 2·Re⟨λ| −i·G |ψ⟩ = 2·Im⟨λ|G|ψ⟩
            let overlap: Complex64 = lam
                .amplitudes()
                .iter()
                .zip(&g)
                .map(|(l, x)| l.conj() * x)
                .sum();
            grad[slot] += 2.0 * scale * overlap.im;
        }
        psi.apply_gate_inverse(gate, params)?;
        lam.apply_gate_inverse(gate, params)?;
    }
    Ok((energy, grad))
}

/// [`adjoint_gradient`] along one pre-sampled noisy trajectory.
///
/// Non-invertible events are undone from checkpoints taken in the forward sweep.
pub fn pattern_gradient(
    circuit: &Circuit,
    pattern: &NoisePattern,
    params: &[f64],
    initial: &StateVector,
    h: &PauliSum,
) -> Result<(f64, Vec<f64>)> {
    check_dim(circuit.n_qubits(), initial.n_qubits())?;
    circuit.check_params(params)?;
    let events = pattern.events();
    let mut checkpoints = Vec::new();
    let mut psi = initial.clone();
    let mut next = 0;
    for (k, gate) in circuit.gates().iter().enumerate() {
        psi.apply_gate(gate, params)?;
        while next < events.len() && events[next].0 == k {
            let (_, q, op) = events[next];
            if op.inverse().is_none() {
                checkpoints.push(psi.clone());
            }
            op.apply(&mut psi, q);
            next += 1;
        }
    }
    let mut lam = StateVector::from_amplitudes(psi.apply_sum(h)?)?;
    let energy = psi.inner(&lam)?.re;
    let mut grad = vec![0.0; circuit.n_params()];
    for (k, gate) in circuit.gates().iter().enumerate().rev() {
        while next > 0 && events[next - 1].0 == k {
            next -= 1;
            let (_, q, op) = events[next];
            op.apply_adjoint(&mut lam, q);
            match op.inverse() {
                Some(inv) => inv.apply(&mut psi, q),
                None => {
                    psi = checkpoints
                        .pop()
                        .expect("checkpoint per non-invertible event")
                }
            }
        }
        if let Some((slot, scale)) = gate.angle().and_then(|a| a.slot()) {
            let g = apply_generator(&psi, gate).ok_or_else(|| {
                Error::Config(format!(
                    "{} has no generator for differentiation",
                    gate.name()
                ))
            })?;
            let overlap: Complex64 = lam
                .amplitudes()
                .iter()
                .zip(&g)
                .map(|(l, x)| l.conj() * x)
                .sum();
            grad[slot] += 2.0 * scale * overlap.im;
        }
        psi.apply_gate_inverse(gate, params)?;
        lam.apply_gate_inverse(gate, params)?;
    }
    Ok((energy, grad))
}

/// How gradients are obtained in training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    /// Adjoint where unbiased (exact mode, Pauli channels), else finite differences.
    Auto,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub init_low: f64,
    pub init_high: f64,
    pub mode: CostMode,
    pub noise: Option<NoiseModel>,
    pub trajectories: usize,
    pub fd_step: f64,
    pub gradient: GradientMethod,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: DEFAULT_ETA,
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            init_low: 0.0,
            init_high: 1.0,
            mode: CostMode::Exact,
            noise: None,
            trajectories: DEFAULT_TRAJECTORIES,
            fd_step: DEFAULT_FD_STEP,
            gradient: GradientMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub param_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub ansatz: AnsatzKind,
    pub config: TrainConfig,
    pub records: Vec<TraceRecord>,
    pub final_params: Vec<f64>,
}

impl TrainingTrace {
    pub fn initial_energy(&self) -> f64 {
        self.records[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.energy)
    }
}

/// FNV-1a over the parameter bit patterns.
pub fn param_hash(params: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in params {
        for b in p.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Per-iteration random seed derived from the run seed.
fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    rng_for(seed, 1 + iteration as u64).gen()
}

fn finite_difference<F>(params: &[f64], step: f64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..params.len())
        .into_par_iter()
        .map(|i| {
            let mut p = params.to_vec();
            p[i] = params[i] + step;
            let up = f(&p)?;
            p[i] = params[i] - step;
            let down = f(&p)?;
            Ok((up - down) / (2.0 * step))
        })
        .collect()
}

impl Problem {
    /// Cost and gradient at `params` under `cfg`, with randomness from `seed`.
    pub fn evaluate(
        &self,
        params: &[f64],
        cfg: &TrainConfig,
        seed: u64,
    ) -> Result<(f64, Vec<f64>)> {
        let fd = cfg.gradient == GradientMethod::FiniteDifference;
        match (cfg.noise, cfg.mode) {
            (None, CostMode::Exact) if !fd => self.adjoint(params),
            (None, mode) => {
                let e = self.cost(params, mode, seed)?;
                let g = finite_difference(params, cfg.fd_step, |p| self.cost(p, mode, seed))?;
                Ok((e, g))
            }
            (Some(noise), CostMode::Exact) if !fd => {
                let parts = (0..cfg.trajectories as u64)
                    .into_par_iter()
                    .map(|k| {
                        let pattern = NoisePattern::sample(&self.ansatz.circuit, &noise, seed, k)?;
                        pattern_gradient(
                            &self.ansatz.circuit,
                            &pattern,
                            params,
                            &self.initial,
                            self.h(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                let n = cfg.trajectories.max(1) as f64;
                let mut g = vec![0.0; params.len()];
                let mut e = 0.0;
                for (ek, gk) in parts {
                    e += ek / n;
                    g.iter_mut().zip(gk).for_each(|(a, b)| *a += b / n);
                }
                Ok((e, g))
            }
            (Some(noise), mode) => {
                let cost = |p: &[f64]| self.noisy_cost(p, mode, &noise, cfg.trajectories, seed);
                let e = cost(params)?;
                let g = finite_difference(params, cfg.fd_step, cost)?;
                Ok((e, g))
            }
        }
    }
}

/// Adagrad descent from `uniform(init_low, init_high)` parameters.
///
/// Records iterations `0..=max_iter`; record `k` holds the cost and gradient
/// norm at the parameters after `k` updates.
pub fn train(problem: &Problem, cfg: &TrainConfig) -> Result<TrainingTrace> {
    if !(cfg.init_high > cfg.init_low) {
        return Err(Error::Config("empty initialisation interval".into()));
    }
    if cfg.noise.is_some() && cfg.trajectories == 0 {
        return Err(Error::Config(
            "noisy training needs at least one trajectory".into(),
        ));
    }
    let mut rng = rng_for(cfg.seed, 0);
    let mut params: Vec<f64> = (0..problem.n_params())
        .map(|_| rng.gen_range(cfg.init_low..cfg.init_high))
        .collect();
    let mut opt = Adagrad::new(params.len(), cfg.eta, cfg.eps)?;
    let mut records = Vec::with_capacity(cfg.max_iter + 1);
    for it in 0..=cfg.max_iter {
        let (energy, grad) = problem.evaluate(&params, cfg, iteration_seed(cfg.seed, it))?;
        records.push(TraceRecord {
            iteration: it,
            energy,
            grad_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
            param_hash: param_hash(&params),
        });
        if it < cfg.max_iter {
            opt.step(&mut params, &grad)?;
        }
    }
    Ok(TrainingTrace {
        ansatz: problem.ansatz.kind,
        config: cfg.clone(),
        records,
        final_params: params,
    })
}

pub const TRACE_CSV_HEADER: &str = "iteration,energy,grad_norm,seed,ansatz,noise_channel,p,mode";

impl TrainingTrace {
    pub fn csv(&self) -> String {
        let (channel, p) = match &self.config.noise {
            Some(n) => (n.channel().name(), n.p()),
            None => ("none", 0.0),
        };
        let mode = match self.config.mode {
            CostMode::Exact => "exact".to_string(),
            CostMode::Shots { shots } => format!("shots:{shots}"),
        };
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.12},{:.12},{},{},{},{},{}\n",
                r.iteration, r.energy, r.grad_norm, self.config.seed, self.ansatz, channel, p, mode
            ));
        }
        out
    }
}

/// Median of a nonempty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::build_hamiltonians;
    use crate::statevec::{Angle, Gate, NoiseChannel};

    fn problem(kind: AnsatzKind) -> Problem {
        let lat = HoneycombLattice::build(1, 1).unwrap();
        let ans = build_ansatz(kind, &lat, 1.0, 1.5, 1).unwrap();
        Problem::new(ans, &lat, build_hamiltonians(&lat, 1.0, 1.5).unwrap()).unwrap()
    }

    #[test]
    fn zero_params_give_initial_energy() {
        let p = problem(AnsatzKind::CdInspired);
        let e = p
            .cost(&vec![0.0; p.n_params()], CostMode::Exact, 0)
            .unwrap();
        let e0 = p.initial.expectation_complex(p.h()).unwrap();
        assert!((e - e0.re).abs() < 1e-12);
    }

    #[test]
    fn adjoint_matches_finite_differences() {
        for kind in [AnsatzKind::Hv, AnsatzKind::CdInspired] {
            let p = problem(kind);
            let mut rng = rng_for(7, 0);
            let theta: Vec<f64> = (0..p.n_params()).map(|_| rng.gen::<f64>()).collect();
            let (_, g) = p.adjoint(&theta).unwrap();
            let fd = finite_difference(&theta, 1e-5, |x| p.cost(x, CostMode::Exact, 0)).unwrap();
            for (a, b) in g.iter().zip(&fd) {
                assert!(
                    (a - b).abs() <= 1e-6 * b.abs().max(1.0),
                    "{kind}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn one_parameter_stationary_point() {
        // E(θ) = ⟨0|Rx(θ)† Z Rx(θ)|0⟩ = cos θ, minimum at π.
        let mut c = Circuit::new(1);
        let s = c.add_param();
        c.push(Gate::Rx(0, Angle::param(s))).unwrap();
        let h = PauliSum::parse(1, "(1+0i) Z0").unwrap();
        let init = StateVector::new(1).unwrap();
        let (e, g) = adjoint_gradient(&c, &[std::f64::consts::PI], &init, &h).unwrap();
        assert!((e + 1.0).abs() < 1e-12 && g[0].abs() < 1e-8);
        let (_, g) = adjoint_gradient(&c, &[0.4], &init, &h).unwrap();
        assert!((g[0] + 0.4f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn commuting_generator_has_zero_gradient() {
        // Rz on |0⟩ with H = Z: the generator commutes with H and the state.
        let mut c = Circuit::new(1);
        let s = c.add_param();
        c.push(Gate::Rz(0, Angle::param(s))).unwrap();
        let h = PauliSum::parse(1, "(1+0i) Z0").unwrap();
        let (_, g) = adjoint_gradient(&c, &[0.8], &StateVector::new(1).unwrap(), &h).unwrap();
        assert!(g[0].abs() < 1e-15);
    }

    #[test]
    fn noisy_gradient_matches_crn_differences() {
        let p = problem(AnsatzKind::CdInspired);
        for channel in NoiseChannel::ALL {
            let noise = NoiseModel::new(channel, 0.05).unwrap();
            let cfg = TrainConfig {
                noise: Some(noise),
                trajectories: 8,
                ..TrainConfig::default()
            };
            let theta: Vec<f64> = (0..p.n_params()).map(|k| 0.1 * k as f64).collect();
            let (e, g) = p.evaluate(&theta, &cfg, 99).unwrap();
            let e_direct = p
                .noisy_cost(&theta, CostMode::Exact, &noise, 8, 99)
                .unwrap();
            assert!((e - e_direct).abs() < 1e-10);
            let fd = finite_difference(&theta, 1e-5, |x| {
                p.noisy_cost(x, CostMode::Exact, &noise, 8, 99)
            })
            .unwrap();
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{channel}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn training_is_deterministic_and_descends() {
        let p = problem(AnsatzKind::CdInspired);
        let cfg = TrainConfig {
            max_iter: 20,
            seed: 3,
            ..TrainConfig::default()
        };
        let a = train(&p, &cfg).unwrap();
        let b = train(&p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 21);
        assert!(a.final_energy() < a.initial_energy());
        assert!(a.csv().starts_with(TRACE_CSV_HEADER));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
