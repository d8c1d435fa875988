//! Statevector simulation engine.
//!
//! Qubit 0 is the least significant bit of the amplitude index. Bitstrings are
//! rendered most-significant qubit first, so index `1` on two qubits is `"01"`.

mod gate;
mod kernels;
mod noise;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::pauli::{PauliSum, PauliWord};

pub use gate::{Angle, Circuit, Gate};
pub use kernels::apply_exp_pauli_word;
pub(crate) use kernels::apply_generator;
pub use noise::{KrausOp, NoiseChannel, NoiseModel, NoisePattern};

/// Largest register the engine allocates (16 GiB of amplitudes).
pub const MAX_STATE_QUBITS: usize = 30;

/// Counter-based, platform-independent random stream for `(seed, stream)`.
///
/// ChaCha8 keyed by the seed with the stream id as nonce; streams never overlap.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                what: "statevector qubits",
                requested: n_qubits,
                limit: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index as usize >= dim {
            return Err(Error::IndexOutOfRange {
                index: index as usize,
                bound: dim,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Config(format!(
                "{dim} amplitudes is not a qubit register"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                what: "statevector qubits",
                requested: n_qubits,
                limit: MAX_STATE_QUBITS,
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `P|ψ⟩` for a bare letter pattern.
    pub fn apply_word(&self, word: &PauliWord) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        let yph = word.y_phase();
        let (x, z) = (word.x_mask(), word.z_mask());
        for (s, a) in self.amps.iter().enumerate() {
            let s = s as u64;
            let sign = if (s & z).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[(s ^ x) as usize] += a * yph * sign;
        }
        out
    }

    /// `H|ψ⟩` as a raw amplitude vector.
    pub fn apply_sum(&self, h: &PauliSum) -> Result<Vec<Complex64>> {
        check_dim(self.n_qubits, h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (w, c) in h.iter() {
            let yph = w.y_phase() * c;
            let (x, z) = (w.x_mask(), w.z_mask());
            for (s, a) in self.amps.iter().enumerate() {
                let s = s as u64;
                let sign = if (s & z).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                out[(s ^ x) as usize] += a * yph * sign;
            }
        }
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩` (complex; callers decide how to treat the imaginary part).
    pub fn expectation_complex(&self, h: &PauliSum) -> Result<Complex64> {
        check_dim(self.n_qubits, h.n_qubits())?;
        let mut total = Complex64::new(0.0, 0.0);
        for (w, c) in h.iter() {
            let yph = w.y_phase();
            let (x, z) = (w.x_mask(), w.z_mask());
            let mut acc = Complex64::new(0.0, 0.0);
            if x == 0 {
                for (s, a) in self.amps.iter().enumerate() {
                    let n = a.norm_sqr();
                    if (s as u64 & z).count_ones() % 2 == 1 {
                        acc.re -= n;
                    } else {
                        acc.re += n;
                    }
                }
            } else {
                // Σ_s conj(a_{s⊕x}) · phase(s) · a_s
                for (s, a) in self.amps.iter().enumerate() {
                    let s = s as u64;
                    let b = self.amps[(s ^ x) as usize];
                    let prod = b.conj() * a;
                    if (s & z).count_ones() % 2 == 1 {
                        acc -= prod;
                    } else {
                        acc += prod;
                    }
                }
                acc *= yph;
            }
            total += c * acc;
        }
        Ok(total)
    }

    /// Probability mass outside the given spin-resolved particle numbers.
    pub fn leakage(&self, up_mask: u64, up: u32, down_mask: u64, down: u32) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(s, _)| {
                let s = *s as u64;
                (s & up_mask).count_ones() != up || (s & down_mask).count_ones() != down
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        kernels::apply_gate(self, gate, params, false)
    }

    pub fn apply_gate_inverse(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        kernels::apply_gate(self, gate, params, true)
    }

    /// Applies `e^{−iθP}` for a Pauli string whose coefficient is folded into θ.
    pub fn apply_exp_pauli(&mut self, word: &PauliWord, theta: f64) -> Result<()> {
        if let Some(q) = word.max_qubit() {
            if q >= self.n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    bound: self.n_qubits,
                });
            }
        }
        apply_exp_pauli_word(&mut self.amps, word, theta);
        Ok(())
    }
}

/// Noiseless execution of `circuit` on a copy of `initial`.
pub fn run(circuit: &Circuit, params: &[f64], initial: &StateVector) -> Result<StateVector> {
    let mut state = initial.clone();
    run_in_place(circuit, params, &mut state)?;
    Ok(state)
}

pub fn run_in_place(circuit: &Circuit, params: &[f64], state: &mut StateVector) -> Result<()> {
    check_dim(circuit.n_qubits(), state.n_qubits())?;
    circuit.check_params(params)?;
    for g in circuit.gates() {
        state.apply_gate(g, params)?;
    }
    Ok(())
}

/// One Monte Carlo trajectory; without a noise model this equals [`run`].
///
/// The random stream is `(seed, trajectory)`, so trajectories are independent
/// and reproducible on any platform.
pub fn run_noisy(
    circuit: &Circuit,
    params: &[f64],
    initial: &StateVector,
    noise: Option<&NoiseModel>,
    seed: u64,
    trajectory: u64,
) -> Result<StateVector> {
    let Some(model) = noise else {
        return run(circuit, params, initial);
    };
    check_dim(circuit.n_qubits(), initial.n_qubits())?;
    circuit.check_params(params)?;
    let mut rng = rng_for(seed, trajectory);
    let mut state = initial.clone();
    for g in circuit.gates() {
        state.apply_gate(g, params)?;
        for q in g.qubits() {
            model.apply_event(&mut state, q, &mut rng);
        }
    }
    Ok(state)
}

/// Multinomial sample of `shots` computational-basis outcomes.
pub fn sample(state: &StateVector, shots: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    sample_with(state, shots, &mut rng_for(seed, 0))
}

pub fn sample_with<R: Rng>(
    state: &StateVector,
    shots: u64,
    rng: &mut R,
) -> Result<BTreeMap<u64, u64>> {
    if shots == 0 {
        return Err(Error::Config("shots must be positive".into()));
    }
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= r).min(cdf.len() - 1);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Renders a basis index as a bitstring, highest qubit first.
pub fn format_bitstring(index: u64, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}
