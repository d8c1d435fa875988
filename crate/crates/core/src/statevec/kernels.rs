//! In-place amplitude kernels.
//!
//! Every kernel touches amplitudes only inside aligned blocks of size
//! `2^{k+1}`, `k` the highest qubit involved, so blocks are processed
//! independently (in parallel for large registers).

use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::gate::{Angle, Gate};
use super::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliWord;

const PAR_MIN_LEN: usize = 1 << 15;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

type Block2 = [[C; 2]; 2];

fn for_blocks<F>(amps: &mut [C], block_bits: usize, f: F)
where
    F: Fn(usize, &mut [C]) + Send + Sync,
{
    let size = (1usize << block_bits).min(amps.len());
    if amps.len() >= PAR_MIN_LEN && amps.len() / size >= 2 {
        amps.par_chunks_mut(size)
            .enumerate()
            .for_each(|(k, chunk)| f(k * size, chunk));
    } else {
        amps.chunks_mut(size)
            .enumerate()
            .for_each(|(k, chunk)| f(k * size, chunk));
    }
}

fn one_qubit(amps: &mut [C], q: usize, m: Block2) {
    let bit = 1usize << q;
    for_blocks(amps, q + 1, |_, chunk| {
        for i in 0..bit {
            let a0 = chunk[i];
            let a1 = chunk[i | bit];
            chunk[i] = m[0][0] * a0 + m[0][1] * a1;
            chunk[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    });
}

fn pauli_x(amps: &mut [C], q: usize) {
    let bit = 1usize << q;
    for_blocks(amps, q + 1, |_, chunk| {
        for i in 0..bit {
            chunk.swap(i, i | bit);
        }
    });
}

fn cnot(amps: &mut [C], control: usize, target: usize) {
    let (cb, tb) = (1usize << control, 1usize << target);
    let hi = control.max(target);
    for_blocks(amps, hi + 1, |_, chunk| {
        for i in 0..chunk.len() {
            if i & cb != 0 && i & tb == 0 {
                chunk.swap(i, i | tb);
            }
        }
    });
}

/// Number-conserving two-qubit gate: phase `m00` on `|00⟩`, `blk` on
/// `(e1, e2) = (|1_a 0_b⟩, |0_a 1_b⟩)`, phase `m11` on `|11⟩`.
fn block_gate(amps: &mut [C], a: usize, b: usize, m00: C, blk: Block2, m11: C) {
    let (ab, bb) = (1usize << a, 1usize << b);
    let hi = a.max(b);
    for_blocks(amps, hi + 1, |_, chunk| {
        for i in 0..chunk.len() {
            if i & (ab | bb) != 0 {
                continue;
            }
            let e1 = chunk[i | ab];
            let e2 = chunk[i | bb];
            chunk[i] *= m00;
            chunk[i | ab] = blk[0][0] * e1 + blk[0][1] * e2;
            chunk[i | bb] = blk[1][0] * e1 + blk[1][1] * e2;
            chunk[i | ab | bb] *= m11;
        }
    });
}

fn between_mask(a: usize, b: usize) -> usize {
    let (lo, hi) = (a.min(b), a.max(b));
    ((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1)
}

fn givens(amps: &mut [C], a: usize, b: usize, theta: f64) {
    let (ab, bb) = (1usize << a, 1usize << b);
    let mask = between_mask(a, b);
    let (s, c) = theta.sin_cos();
    let hi = a.max(b);
    for_blocks(amps, hi + 1, |base, chunk| {
        for i in 0..chunk.len() {
            if i & (ab | bb) != 0 {
                continue;
            }
            let sign = if ((base + i) & mask).count_ones() % 2 == 1 {
                -s
            } else {
                s
            };
            let e1 = chunk[i | ab];
            let e2 = chunk[i | bb];
            chunk[i | ab] = e1 * c - e2 * sign;
            chunk[i | bb] = e2 * c + e1 * sign;
        }
    });
}

/// `e^{−iθP}` on raw amplitudes via paired rotations.
pub fn apply_exp_pauli_word(amps: &mut [C], word: &PauliWord, theta: f64) {
    let (x, z) = (word.x_mask() as usize, word.z_mask() as usize);
    let (s, c) = theta.sin_cos();
    if x == 0 {
        let plus = C::new(c, -s);
        let minus = C::new(c, s);
        let hi = if z == 0 {
            0
        } else {
            usize::BITS as usize - 1 - z.leading_zeros() as usize
        };
        for_blocks(amps, hi + 1, |base, chunk| {
            for (i, a) in chunk.iter_mut().enumerate() {
                *a *= if ((base + i) & z).count_ones() % 2 == 1 {
                    minus
                } else {
                    plus
                };
            }
        });
        return;
    }
    let h = usize::BITS as usize - 1 - x.leading_zeros() as usize;
    let hbit = 1usize << h;
    // −i sin θ · i^{#Y}
    let k = C::new(0.0, -s) * word.y_phase();
    for_blocks(amps, h + 1, |base, chunk| {
        for i in 0..hbit {
            let j = i ^ x;
            let (gi, gj) = (base + i, base + j);
            let si = if (gi & z).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            let sj = if (gj & z).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            let ai = chunk[i];
            let aj = chunk[j];
            // (Pψ)_i = i^{#Y} sign(j) a_j
            chunk[i] = ai * c + k * aj * sj;
            chunk[j] = aj * c + k * ai * si;
        }
    });
}

fn rx(theta: f64) -> Block2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C::new(c, 0.0), C::new(0.0, -s)],
        [C::new(0.0, -s), C::new(c, 0.0)],
    ]
}

fn rz(theta: f64) -> Block2 {
    [
        [C::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, C::from_polar(1.0, theta / 2.0)],
    ]
}

fn check_qubits(state: &StateVector, gate: &Gate) -> Result<()> {
    let qs = gate.qubits();
    if qs.is_empty() {
        return Err(Error::Config("Pauli exponential of the identity".into()));
    }
    for q in qs {
        if q >= state.n_qubits() {
            return Err(Error::IndexOutOfRange {
                index: q,
                bound: state.n_qubits(),
            });
        }
    }
    Ok(())
}

pub(super) fn apply_gate(
    state: &mut StateVector,
    gate: &Gate,
    params: &[f64],
    inverse: bool,
) -> Result<()> {
    check_qubits(state, gate)?;
    let sgn = if inverse { -1.0 } else { 1.0 };
    let angle = |a: &Angle| a.resolve(params).map(|v| v * sgn);
    let amps = state.amplitudes_mut();
    match gate {
        Gate::X(q) => pauli_x(amps, *q),
        Gate::H(q) => {
            let h = C::new(FRAC_1_SQRT_2, 0.0);
            one_qubit(amps, *q, [[h, h], [h, -h]]);
        }
        Gate::Rx(q, a) => one_qubit(amps, *q, rx(angle(a)?)),
        Gate::Rz(q, a) => one_qubit(amps, *q, rz(angle(a)?)),
        Gate::Cnot { control, target } => cnot(amps, *control, *target),
        Gate::SqrtISwap(a, b) => {
            let r = C::new(FRAC_1_SQRT_2, 0.0);
            let i = C::new(0.0, FRAC_1_SQRT_2 * sgn);
            block_gate(amps, *a, *b, ONE, [[r, i], [i, r]], ONE);
        }
        Gate::Fswap(a, b) => block_gate(amps, *a, *b, ONE, [[ZERO, ONE], [ONE, ZERO]], -ONE),
        Gate::HopBasis(a, b) => {
            let r = C::new(FRAC_1_SQRT_2, 0.0);
            block_gate(amps, *a, *b, ONE, [[r, r], [r, -r]], ONE);
        }
        Gate::Hop { a, b, angle: ang } => {
            let (s, c) = angle(ang)?.sin_cos();
            let (c, s) = (C::new(c, 0.0), C::new(0.0, -s));
            block_gate(amps, *a, *b, ONE, [[c, s], [s, c]], ONE);
        }
        Gate::CPhase { a, b, angle: ang } => {
            let ph = C::from_polar(1.0, -angle(ang)?);
            block_gate(amps, *a, *b, ONE, [[ONE, ZERO], [ZERO, ONE]], ph);
        }
        Gate::Givens { a, b, angle: ang } => givens(amps, *a, *b, angle(ang)?),
        Gate::ExpPauli { word, angle: ang } => apply_exp_pauli_word(amps, word, angle(ang)?),
    }
    Ok(())
}

/// `G|ψ⟩` for the Hermitian generator of a parameterised gate, `U = e^{−iθG}`.
pub(crate) fn apply_generator(state: &StateVector, gate: &Gate) -> Option<Vec<C>> {
    let amps = state.amplitudes();
    let dim = amps.len();
    let mut out = vec![ZERO; dim];
    match gate {
        Gate::Rx(q, _) => {
            let bit = 1usize << q;
            for i in 0..dim {
                out[i ^ bit] = amps[i] * 0.5;
            }
        }
        Gate::Rz(q, _) => {
            let bit = 1usize << q;
            for i in 0..dim {
                out[i] = if i & bit == 0 {
                    amps[i] * 0.5
                } else {
                    amps[i] * -0.5
                };
            }
        }
        Gate::ExpPauli { word, .. } => return Some(state.apply_word(word)),
        Gate::Hop { a, b, .. } => {
            let (ab, bb) = (1usize << a, 1usize << b);
            for i in 0..dim {
                if (i & ab == 0) != (i & bb == 0) {
                    out[i ^ ab ^ bb] = amps[i];
                }
            }
        }
        Gate::CPhase { a, b, .. } => {
            let m = (1usize << a) | (1usize << b);
            for i in 0..dim {
                if i & m == m {
                    out[i] = amps[i];
                }
            }
        }
        Gate::Givens { a, b, .. } => {
            let (ab, bb) = (1usize << a, 1usize << b);
            let mask = between_mask(*a, *b);
            for i in 0..dim {
                let s = if (i & mask).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                if i & ab != 0 && i & bb == 0 {
                    // G e1 = i·s·e2
                    out[i ^ ab ^ bb] += C::new(0.0, s) * amps[i];
                } else if i & bb != 0 && i & ab == 0 {
                    out[i ^ ab ^ bb] += C::new(0.0, -s) * amps[i];
                }
            }
        }
        _ => return None,
    }
    Some(out)
}
