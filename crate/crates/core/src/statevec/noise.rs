use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use super::gate::{Angle, Circuit, Gate};
use super::{rng_for, StateVector};
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseChannel {
    AmplitudeDamping,
    BitFlip,
    PhaseFlip,
}

impl NoiseChannel {
    pub const ALL: [NoiseChannel; 3] = [
        NoiseChannel::AmplitudeDamping,
        NoiseChannel::BitFlip,
        NoiseChannel::PhaseFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseChannel::AmplitudeDamping => "amplitude_damping",
            NoiseChannel::BitFlip => "bit_flip",
            NoiseChannel::PhaseFlip => "phase_flip",
        }
    }

    /// Pauli channels draw their events independently of the state.
    pub fn is_pauli(self) -> bool {
        !matches!(self, NoiseChannel::AmplitudeDamping)
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "amplitude_damping" | "ad" => Ok(NoiseChannel::AmplitudeDamping),
            "bit_flip" | "bf" => Ok(NoiseChannel::BitFlip),
            "phase_flip" | "pf" => Ok(NoiseChannel::PhaseFlip),
            other => Err(Error::Parse(format!("unknown noise channel '{other}'"))),
        }
    }
}

/// A single-qubit channel applied after every gate to every qubit it touches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    channel: NoiseChannel,
    p: f64,
}

impl NoiseModel {
    pub fn new(channel: NoiseChannel, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "noise probability {p} outside [0, 1]"
            )));
        }
        Ok(NoiseModel { channel, p })
    }

    pub fn channel(&self) -> NoiseChannel {
        self.channel
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// One stochastic Kraus event on `qubit`. Exactly one uniform draw is
    /// consumed per call whatever the channel, so streams stay aligned.
    pub fn apply_event<R: Rng>(&self, state: &mut StateVector, qubit: usize, rng: &mut R) {
        let r: f64 = rng.gen();
        let bit = 1usize << qubit;
        match self.channel {
            NoiseChannel::BitFlip => {
                if r < self.p {
                    let amps = state.amplitudes_mut();
                    for i in 0..amps.len() {
                        if i & bit == 0 {
                            amps.swap(i, i | bit);
                        }
                    }
                }
            }
            NoiseChannel::PhaseFlip => {
                if r < self.p {
                    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
                        if i & bit != 0 {
                            *a = -*a;
                        }
                    }
                }
            }
            NoiseChannel::AmplitudeDamping => {
                if self.p == 0.0 {
                    return;
                }
                let p1: f64 = state
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & bit != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                let amps = state.amplitudes_mut();
                if r < self.p * p1 {
                    // K1 = √γ |0⟩⟨1|
                    for i in 0..amps.len() {
                        if i & bit == 0 {
                            amps[i] = amps[i | bit];
                            amps[i | bit] = Complex64::new(0.0, 0.0);
                        }
                    }
                } else {
                    // K0 = |0⟩⟨0| + √(1−γ) |1⟩⟨1|
                    let k = (1.0 - self.p).sqrt();
                    for (i, a) in amps.iter_mut().enumerate() {
                        if i & bit != 0 {
                            *a *= k;
                        }
                    }
                }
                state.normalize();
            }
        }
    }
}

/// Branch probability of the decay operator in a pre-sampled damping
/// trajectory, as a fraction of `p`. One half is the exact jump rate of a
/// half-occupied qubit, which keeps the branch weights close to one.
const DECAY_BRANCH_FRACTION: f64 = 0.5;

/// A fixed linear operator inserted into a pre-sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KrausOp {
    X,
    Z,
    /// `diag(s0, s1)`, the no-jump operator divided by √(branch probability).
    Keep {
        s0: f64,
        s1: f64,
    },
    /// `s·|0⟩⟨1|`, the jump operator divided by √(branch probability).
    Decay {
        s: f64,
    },
}

impl KrausOp {
    pub fn apply(&self, state: &mut StateVector, qubit: usize) {
        let bit = 1usize << qubit;
        let amps = state.amplitudes_mut();
        match *self {
            KrausOp::X => {
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            KrausOp::Z => amps
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & bit != 0)
                .for_each(|(_, a)| *a = -*a),
            KrausOp::Keep { s0, s1 } => {
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { s0 } else { s1 };
                }
            }
            KrausOp::Decay { s } => {
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps[i] = amps[i | bit] * s;
                        amps[i | bit] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
    }

    pub fn apply_adjoint(&self, state: &mut StateVector, qubit: usize) {
        match *self {
            KrausOp::Decay { s } => {
                let bit = 1usize << qubit;
                let amps = state.amplitudes_mut();
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps[i | bit] = amps[i] * s;
                        amps[i] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            op => op.apply(state, qubit),
        }
    }

    /// Inverse, when it exists.
    pub fn inverse(&self) -> Option<KrausOp> {
        match *self {
            KrausOp::Keep { s0, s1 } => Some(KrausOp::Keep {
                s0: 1.0 / s0,
                s1: 1.0 / s1,
            }),
            KrausOp::Decay { .. } => None,
            op => Some(op),
        }
    }
}

/// Pre-sampled noise events of one trajectory: `(gate index, qubit, op)`
/// triples, the op applied right after the gate.
///
/// For Pauli channels only fired errors are listed, and sampling consumes
/// the `(seed, trajectory)` stream exactly as [`super::run_noisy`] does, so
/// the pattern reproduces that trajectory. For amplitude damping every event
/// gets a branch drawn with state-independent probabilities `(1 − p/2, p/2)`
/// and the Kraus operator is divided by the square root of that probability;
/// the resulting unnormalised trajectories average `⟨ψ̃|H|ψ̃⟩` to `Tr(ρH)`.
/// Either way the events do not depend on the circuit parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePattern {
    channel: NoiseChannel,
    events: Vec<(usize, usize, KrausOp)>,
}

impl NoisePattern {
    pub fn sample(
        circuit: &Circuit,
        model: &NoiseModel,
        seed: u64,
        trajectory: u64,
    ) -> Result<Self> {
        let mut rng = rng_for(seed, trajectory);
        let p = model.p;
        let q1 = DECAY_BRANCH_FRACTION * p;
        let keep = KrausOp::Keep {
            s0: 1.0 / (1.0 - q1).sqrt(),
            s1: ((1.0 - p) / (1.0 - q1)).sqrt(),
        };
        let mut events = Vec::new();
        for (k, g) in circuit.gates().iter().enumerate() {
            for q in g.qubits() {
                let r = rng.gen::<f64>();
                let op = match model.channel {
                    NoiseChannel::BitFlip if r < p => KrausOp::X,
                    NoiseChannel::PhaseFlip if r < p => KrausOp::Z,
                    NoiseChannel::AmplitudeDamping if p == 0.0 => continue,
                    NoiseChannel::AmplitudeDamping if r < q1 => {
                        KrausOp::Decay { s: (p / q1).sqrt() }
                    }
                    NoiseChannel::AmplitudeDamping => keep,
                    _ => continue,
                };
                events.push((k, q, op));
            }
        }
        Ok(NoisePattern {
            channel: model.channel,
            events,
        })
    }

    pub fn channel(&self) -> NoiseChannel {
        self.channel
    }

    pub fn events(&self) -> &[(usize, usize, KrausOp)] {
        &self.events
    }

    /// Runs the trajectory; the result is unnormalised for amplitude damping.
    pub fn run(
        &self,
        circuit: &Circuit,
        params: &[f64],
        initial: &StateVector,
    ) -> Result<StateVector> {
        check_dim(circuit.n_qubits(), initial.n_qubits())?;
        circuit.check_params(params)?;
        let mut state = initial.clone();
        let mut ev = self.events.iter().peekable();
        for (k, g) in circuit.gates().iter().enumerate() {
            state.apply_gate(g, params)?;
            while let Some((_, q, op)) = ev.next_if(|e| e.0 == k) {
                op.apply(&mut state, *q);
            }
        }
        Ok(state)
    }

    /// The circuit with the sampled Pauli errors inserted as fixed gates. A
    /// phase flip is realised as `RZ(π) = −iZ`; the global phase is irrelevant.
    pub fn embed(&self, circuit: &Circuit) -> Result<Circuit> {
        if !self.channel.is_pauli() {
            return Err(Error::Config(format!(
                "{} events are not unitary",
                self.channel
            )));
        }
        let mut out = Circuit::new(circuit.n_qubits());
        for _ in 0..circuit.n_params() {
            out.add_param();
        }
        let mut ev = self.events.iter().peekable();
        for (k, g) in circuit.gates().iter().enumerate() {
            out.push(g.clone())?;
            while let Some((_, q, op)) = ev.next_if(|e| e.0 == k) {
                out.push(match op {
                    KrausOp::X => Gate::X(*q),
                    _ => Gate::Rz(*q, Angle::Fixed(std::f64::consts::PI)),
                })?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{run, run_noisy};

    fn one_gate() -> Circuit {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::H(0)).unwrap();
        c
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!(
            "bit-flip".parse::<NoiseChannel>().unwrap(),
            NoiseChannel::BitFlip
        );
        assert!("depolarizing".parse::<NoiseChannel>().is_err());
        assert!(NoiseModel::new(NoiseChannel::BitFlip, 1.5).is_err());
        assert!(NoiseModel::new(NoiseChannel::BitFlip, -0.1).is_err());
    }

    #[test]
    fn zero_probability_is_noiseless() {
        let c = one_gate();
        let init = StateVector::new(1).unwrap();
        let clean = run(&c, &[], &init).unwrap();
        for ch in NoiseChannel::ALL {
            let m = NoiseModel::new(ch, 0.0).unwrap();
            assert_eq!(run_noisy(&c, &[], &init, Some(&m), 5, 0).unwrap(), clean);
        }
    }

    #[test]
    fn forced_bit_flip() {
        let mut c = Circuit::new(1);
        c.push(Gate::Rz(0, Angle::Fixed(0.3))).unwrap();
        let m = NoiseModel::new(NoiseChannel::BitFlip, 1.0).unwrap();
        let out = run_noisy(&c, &[], &StateVector::new(1).unwrap(), Some(&m), 1, 0).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn damping_matches_channel_average() {
        // H then damping: ρ11 = γ-free branch weight ½(1−γ).
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        let gamma = 0.3;
        let m = NoiseModel::new(NoiseChannel::AmplitudeDamping, gamma).unwrap();
        let init = StateVector::new(1).unwrap();
        let n = 4000;
        let mut p1 = 0.0;
        let mut samples = Vec::with_capacity(n);
        for t in 0..n as u64 {
            let s = run_noisy(&c, &[], &init, Some(&m), 11, t).unwrap();
            samples.push(s.amplitudes()[1].norm_sqr());
            p1 += samples.last().unwrap();
        }
        p1 /= n as f64;
        let var = samples.iter().map(|x| (x - p1).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let sigma = (var / n as f64).sqrt();
        assert!(
            (p1 - 0.5 * (1.0 - gamma)).abs() < 3.0 * sigma + 1e-12,
            "{p1} ± {sigma}"
        );
    }

    #[test]
    fn pattern_reproduces_trajectory() {
        let mut c = Circuit::new(2);
        let s = c.add_param();
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Hop {
            a: 0,
            b: 1,
            angle: Angle::param(s),
        })
        .unwrap();
        c.push(Gate::CPhase {
            a: 0,
            b: 1,
            angle: Angle::Fixed(0.4),
        })
        .unwrap();
        let init = StateVector::new(2).unwrap();
        let m = NoiseModel::new(NoiseChannel::BitFlip, 0.4).unwrap();
        for t in 0..20 {
            let pat = NoisePattern::sample(&c, &m, 3, t).unwrap();
            let direct = run_noisy(&c, &[0.7], &init, Some(&m), 3, t).unwrap();
            let embedded = run(&pat.embed(&c).unwrap(), &[0.7], &init).unwrap();
            for (a, b) in direct.amplitudes().iter().zip(embedded.amplitudes()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
        let ad = NoiseModel::new(NoiseChannel::AmplitudeDamping, 0.1).unwrap();
        assert!(NoisePattern::sample(&c, &ad, 0, 0)
            .unwrap()
            .embed(&c)
            .is_err());
    }

    #[test]
    fn weighted_damping_is_unbiased() {
        // H then damping on |0⟩: exact ⟨Z⟩ = 1 − (1−γ) = γ.
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        let gamma = 0.3;
        let m = NoiseModel::new(NoiseChannel::AmplitudeDamping, gamma).unwrap();
        let init = StateVector::new(1).unwrap();
        let n = 4000;
        let z: Vec<f64> = (0..n as u64)
            .map(|t| {
                let s = NoisePattern::sample(&c, &m, 2, t)
                    .unwrap()
                    .run(&c, &[], &init)
                    .unwrap();
                s.amplitudes()[0].norm_sqr() - s.amplitudes()[1].norm_sqr()
            })
            .collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let sigma = (var / n as f64).sqrt();
        assert!((mean - gamma).abs() < 3.0 * sigma, "{mean} ± {sigma}");
    }

    #[test]
    fn kraus_adjoint_and_inverse() {
        let mut rng = rng_for(4, 0);
        let amps: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let v = StateVector::from_amplitudes(amps.clone()).unwrap();
        let w = StateVector::from_amplitudes(amps.iter().rev().copied().collect()).unwrap();
        for op in [
            KrausOp::X,
            KrausOp::Z,
            KrausOp::Keep { s0: 1.2, s1: 0.7 },
            KrausOp::Decay { s: 1.3 },
        ] {
            let (mut av, mut aw) = (v.clone(), w.clone());
            op.apply(&mut av, 1);
            op.apply_adjoint(&mut aw, 1);
            assert!((w.inner(&av).unwrap() - aw.inner(&v).unwrap()).norm() < 1e-14);
            if let Some(inv) = op.inverse() {
                inv.apply(&mut av, 1);
                assert!((av.inner(&v).unwrap() - v.inner(&v).unwrap()).norm() < 1e-14);
            }
        }
    }
}
