//! Nested-commutator gauge potentials and the counterdiabatic operator pool.
//!
//! For a linear sweep `H(λ) = H₀ + λH₁` the order-`l` gauge potential is
//! `A = Σ_k α_k O_k` with `O_k = i·ad_H^{2k−1}(∂_λH)`. The coefficients minimise
//! the action `S = Tr[G²]`, `G = ∂_λH − i[H, A]`, which is a linear
//! least-squares problem in the trace inner product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::evolve::Schedule;
use crate::pauli::{commutator, trace_product, Letter, PauliSum, PauliWord};

const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

/// Step count above which α_k is read from an interpolation table.
pub const ALPHA_TABLE_THRESHOLD: usize = 1000;
/// Grid points of the interpolation table over λ ∈ [0, 1].
pub const ALPHA_TABLE_POINTS: usize = 1024;

/// `H(λ) = h0 + λ·h1`.
#[derive(Debug, Clone)]
pub struct LinearSweep {
    pub h0: PauliSum,
    pub h1: PauliSum,
}

impl LinearSweep {
    pub fn new(h0: PauliSum, h1: PauliSum) -> Result<Self> {
        check_dim(h0.n_qubits(), h1.n_qubits())?;
        Ok(LinearSweep { h0, h1 })
    }

    pub fn n_qubits(&self) -> usize {
        self.h0.n_qubits()
    }

    pub fn hamiltonian(&self, lambda: f64) -> PauliSum {
        &self.h0 + &self.h1.scale_real(lambda)
    }

    /// `∂_λH`.
    pub fn derivative(&self) -> &PauliSum {
        &self.h1
    }
}

/// Gauge potential basis and solved coefficients at one value of λ.
#[derive(Debug, Clone)]
pub struct GaugePotential {
    pub order: usize,
    pub lambda: f64,
    pub basis: Vec<PauliSum>,
    pub alpha: Vec<f64>,
}

impl GaugePotential {
    /// `A = Σ_k α_k O_k`.
    pub fn operator(&self) -> PauliSum {
        let n = self.basis.first().map_or(1, PauliSum::n_qubits);
        self.basis
            .iter()
            .zip(&self.alpha)
            .fold(PauliSum::new(n), |acc, (o, &a)| &acc + &o.scale_real(a))
    }
}

/// `O_k = i·[H,[H,…[H, ∂H]]]` with `2k − 1` nested commutators, `k = 1..=order`.
pub fn gauge_basis(h: &PauliSum, dh: &PauliSum, order: usize) -> Result<Vec<PauliSum>> {
    check_dim(h.n_qubits(), dh.n_qubits())?;
    if order == 0 {
        return Err(Error::Config(
            "nested-commutator order must be at least 1".into(),
        ));
    }
    let mut basis = Vec::with_capacity(order);
    let mut nested = commutator(h, dh)?;
    for k in 1..=order {
        basis.push(nested.scale(I_UNIT));
        if k < order {
            nested = commutator(h, &commutator(h, &nested)?)?;
        }
    }
    Ok(basis)
}

/// Least-squares coefficients minimising `Tr[(∂H − Σ α_k C_k)²]`, `C_k = i[H, O_k]`.
///
/// Solves `M α = b` with `M_kj = Tr(C_k C_j)`, `b_k = Tr(∂H C_k)` (normalised
/// traces). When every `C_k` vanishes there is nothing to correct and α = 0.
pub fn solve_alpha(h: &PauliSum, dh: &PauliSum, basis: &[PauliSum]) -> Result<Vec<f64>> {
    if basis.is_empty() {
        return Err(Error::Config("gauge basis is empty".into()));
    }
    check_dim(h.n_qubits(), dh.n_qubits())?;
    let cs = basis
        .iter()
        .map(|o| Ok(commutator(h, o)?.scale(I_UNIT)))
        .collect::<Result<Vec<_>>>()?;
    let l = cs.len();
    let mut m = DMatrix::<f64>::zeros(l, l);
    let mut b = DVector::<f64>::zeros(l);
    for k in 0..l {
        b[k] = trace_product(dh, &cs[k])?.re;
        for j in 0..=k {
            let v = trace_product(&cs[k], &cs[j])?.re;
            m[(k, j)] = v;
            m[(j, k)] = v;
        }
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(vec![0.0; l]);
    }
    let svd = m.svd(true, true);
    let alpha = svd
        .solve(&b, scale * 1e-12)
        .map_err(|e| Error::Config(format!("least-squares solve failed: {e}")))?;
    Ok(alpha.iter().copied().collect())
}

/// Normalised action `Tr[G²] / 2^n` for a candidate gauge potential.
pub fn action(h: &PauliSum, dh: &PauliSum, a: &PauliSum) -> Result<f64> {
    let g = dh.try_sub(&commutator(h, a)?.scale(I_UNIT))?;
    Ok(trace_product(&g, &g)?.re)
}

/// Basis and coefficients of the order-`l` potential at `lambda`.
pub fn gauge_potential(sweep: &LinearSweep, order: usize, lambda: f64) -> Result<GaugePotential> {
    let h = sweep.hamiltonian(lambda);
    let basis = gauge_basis(&h, sweep.derivative(), order)?;
    let alpha = solve_alpha(&h, sweep.derivative(), &basis)?;
    Ok(GaugePotential {
        order,
        lambda,
        basis,
        alpha,
    })
}

/// Time-dependent counterdiabatic term `λ̇(t)·A(λ(t))`.
#[derive(Debug, Clone)]
pub struct CdDriver {
    sweep: LinearSweep,
    order: usize,
    schedule: Schedule,
    table: Option<Vec<Vec<f64>>>,
}

impl CdDriver {
    /// `steps` is the number of evaluations expected; long sweeps read α_k from
    /// a λ-grid instead of solving at every step.
    pub fn new(sweep: LinearSweep, order: usize, schedule: Schedule, steps: usize) -> Result<Self> {
        let mut driver = CdDriver {
            sweep,
            order,
            schedule,
            table: None,
        };
        if steps > ALPHA_TABLE_THRESHOLD {
            let grid = (0..ALPHA_TABLE_POINTS)
                .map(|i| {
                    let lambda = i as f64 / (ALPHA_TABLE_POINTS - 1) as f64;
                    Ok(gauge_potential(&driver.sweep, order, lambda)?.alpha)
                })
                .collect::<Result<Vec<_>>>()?;
            driver.table = Some(grid);
        }
        Ok(driver)
    }

    pub fn sweep(&self) -> &LinearSweep {
        &self.sweep
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn uses_table(&self) -> bool {
        self.table.is_some()
    }

    /// Gauge potential at `lambda`, from the table when one was built.
    pub fn potential(&self, lambda: f64) -> Result<GaugePotential> {
        let Some(table) = &self.table else {
            return gauge_potential(&self.sweep, self.order, lambda);
        };
        let h = self.sweep.hamiltonian(lambda);
        let basis = gauge_basis(&h, self.sweep.derivative(), self.order)?;
        let pos = lambda.clamp(0.0, 1.0) * (ALPHA_TABLE_POINTS - 1) as f64;
        let lo = (pos.floor() as usize).min(ALPHA_TABLE_POINTS - 2);
        let frac = pos - lo as f64;
        let alpha = table[lo]
            .iter()
            .zip(&table[lo + 1])
            .map(|(a, b)| a + frac * (b - a))
            .collect();
        Ok(GaugePotential {
            order: self.order,
            lambda,
            basis,
            alpha,
        })
    }

    /// `H_CD(t) = λ̇(t)·Σ_k α_k(λ(t)) O_k(λ(t))`.
    pub fn cd_hamiltonian(&self, t: f64) -> Result<PauliSum> {
        let lambda = self.schedule.lambda(t)?;
        let rate = self.schedule.lambda_dot(t)?;
        if rate == 0.0 {
            return Ok(PauliSum::new(self.sweep.n_qubits()));
        }
        Ok(self.potential(lambda)?.operator().scale_real(rate))
    }
}

/// One parameterised generator of the CD-inspired ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct CdGenerator {
    pub qubits: (usize, usize),
    /// Hermitian combination of the `XY`/`YX` strings on `qubits`, scaled so
    /// the coefficient moduli sum to one (unit spectral radius for a pair).
    pub op: PauliSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdPool {
    pub generators: Vec<CdGenerator>,
}

impl CdPool {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Total number of Pauli strings across generators.
    pub fn string_count(&self) -> usize {
        self.generators.iter().map(|g| g.op.len()).sum()
    }
}

impl std::fmt::Display for CdPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, g) in self.generators.iter().enumerate() {
            writeln!(f, "# generator {k} on qubits {} {}", g.qubits.0, g.qubits.1)?;
            write!(f, "{}", g.op)?;
        }
        Ok(())
    }
}

fn is_two_body_xy(w: &PauliWord) -> bool {
    if w.weight() != 2 {
        return false;
    }
    let letters: Vec<Letter> = w.qubits().map(|q| w.letter(q)).collect();
    matches!(
        letters.as_slice(),
        [Letter::X, Letter::Y] | [Letter::Y, Letter::X]
    )
}

/// Weight-two `XY`/`YX` content of the first-order operator, one generator per qubit pair.
pub fn two_body_pool(o1: &PauliSum) -> Result<CdPool> {
    let mut generators: Vec<CdGenerator> = Vec::new();
    for (w, c) in o1.iter().filter(|(w, _)| is_two_body_xy(w)) {
        let mut qs = w.qubits();
        let pair = (qs.next().unwrap(), qs.next().unwrap());
        match generators.iter_mut().find(|g| g.qubits == pair) {
            Some(g) => g.op.add_term(*w, *c),
            None => generators.push(CdGenerator {
                qubits: pair,
                op: PauliSum::from_terms(o1.n_qubits(), [(*w, *c)]),
            }),
        }
    }
    if generators.is_empty() {
        return Err(Error::Config(
            "first-order operator has no two-body XY terms (degenerate lattice?)".into(),
        ));
    }
    generators.sort_by_key(|g| g.qubits);
    for g in &mut generators {
        let l1: f64 = g.op.iter().map(|(_, c)| c.norm()).sum();
        g.op = g.op.scale_real(1.0 / l1);
    }
    Ok(CdPool { generators })
}
