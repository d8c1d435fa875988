use crate::error::{Error, Result};
use crate::pauli::PauliWord;

/// A gate angle: fixed, or `scale × params[slot]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { slot: usize, scale: f64 },
}

impl Angle {
    pub fn param(slot: usize) -> Self {
        Angle::Param { slot, scale: 1.0 }
    }

    pub fn resolve(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Angle::Fixed(v) => Ok(v),
            Angle::Param { slot, scale } => {
                params
                    .get(slot)
                    .map(|v| v * scale)
                    .ok_or(Error::UnboundParameter {
                        slot,
                        available: params.len(),
                    })
            }
        }
    }

    pub fn slot(&self) -> Option<(usize, f64)> {
        match *self {
            Angle::Fixed(_) => None,
            Angle::Param { slot, scale } => Some((slot, scale)),
        }
    }
}

/// Gate set of the engine. Two-qubit block gates act on the single-excitation
/// block `{|1_a 0_b⟩, |0_a 1_b⟩}` of their qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    /// `e^{−iθX/2}`.
    Rx(usize, Angle),
    /// `e^{−iθZ/2}`.
    Rz(usize, Angle),
    Cnot {
        control: usize,
        target: usize,
    },
    /// `|01⟩ → (|01⟩ + i|10⟩)/√2`, `|00⟩`, `|11⟩` fixed.
    SqrtISwap(usize, usize),
    /// Fermionic swap: exchange plus −1 on `|11⟩`.
    Fswap(usize, usize),
    /// Fermionic Givens rotation `e^{θ(c_b† c_a − c_a† c_b)}`, including the
    /// Jordan-Wigner parity of the qubits strictly between `a` and `b`.
    Givens {
        a: usize,
        b: usize,
        angle: Angle,
    },
    /// `e^{−iθP}`.
    ExpPauli {
        word: PauliWord,
        angle: Angle,
    },
    /// Rotates `(|10⟩ ± |01⟩)/√2` onto `|10⟩` / `|01⟩` (block Hadamard).
    HopBasis(usize, usize),
    /// `e^{−iβ(X_aX_b + Y_aY_b)/2}`.
    Hop {
        a: usize,
        b: usize,
        angle: Angle,
    },
    /// `e^{−iγ n_a n_b}` = diag(1, 1, 1, e^{−iγ}).
    CPhase {
        a: usize,
        b: usize,
        angle: Angle,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::SqrtISwap(a, b) | Gate::Fswap(a, b) | Gate::HopBasis(a, b) => vec![*a, *b],
            Gate::Givens { a, b, .. } | Gate::Hop { a, b, .. } | Gate::CPhase { a, b, .. } => {
                vec![*a, *b]
            }
            Gate::ExpPauli { word, .. } => word.qubits().collect(),
        }
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Gate::Rx(_, a) | Gate::Rz(_, a) => Some(a),
            Gate::Givens { angle, .. }
            | Gate::ExpPauli { angle, .. }
            | Gate::Hop { angle, .. }
            | Gate::CPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::H(_) => "H",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::Cnot { .. } => "CNOT",
            Gate::SqrtISwap(..) => "SQRT_ISWAP",
            Gate::Fswap(..) => "FSWAP",
            Gate::Givens { .. } => "GIVENS",
            Gate::ExpPauli { .. } => "EXP_PAULI",
            Gate::HopBasis(..) => "HOP_BASIS",
            Gate::Hop { .. } => "HOP",
            Gate::CPhase { .. } => "CPHASE",
        }
    }

    fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(Error::Config("Pauli exponential of the identity".into()));
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    bound: n_qubits,
                });
            }
            if qs[..i].contains(&q) {
                return Err(Error::Config(format!(
                    "{} acts twice on qubit {q}",
                    self.name()
                )));
            }
        }
        if let Some((slot, _)) = self.angle().and_then(Angle::slot) {
            if slot >= n_params {
                return Err(Error::UnboundParameter {
                    slot,
                    available: n_params,
                });
            }
        }
        Ok(())
    }
}

/// Ordered gate list over a fixed register with `n_params` parameter slots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            n_params: 0,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Allocates a fresh parameter slot.
    pub fn add_param(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits, self.n_params)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a fragment that uses no parameter slots of its own.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        crate::error::check_dim(self.n_qubits, other.n_qubits)?;
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() < self.n_params {
            return Err(Error::UnboundParameter {
                slot: params.len(),
                available: params.len(),
            });
        }
        Ok(())
    }

    /// Gate-name histogram in first-seen order.
    pub fn histogram(&self) -> Vec<(&'static str, usize)> {
        let mut out: Vec<(&'static str, usize)> = Vec::new();
        for g in &self.gates {
            match out.iter_mut().find(|(n, _)| *n == g.name()) {
                Some(e) => e.1 += 1,
                None => out.push((g.name(), 1)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;

    #[test]
    fn push_validates_targets_and_slots() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::X(2)).is_err());
        assert!(c
            .push(Gate::Cnot {
                control: 1,
                target: 1
            })
            .is_err());
        assert!(matches!(
            c.push(Gate::Rz(0, Angle::param(0))),
            Err(Error::UnboundParameter { .. })
        ));
        let slot = c.add_param();
        c.push(Gate::Rz(0, Angle::param(slot))).unwrap();
        assert!(c
            .push(Gate::ExpPauli {
                word: PauliWord::IDENTITY,
                angle: Angle::Fixed(0.1)
            })
            .is_err());
        c.push(Gate::ExpPauli {
            word: PauliWord::single(1, Letter::Y),
            angle: Angle::Fixed(0.1),
        })
        .unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.check_params(&[]).is_err());
        assert!(Angle::param(3).resolve(&[1.0]).is_err());
    }
}
