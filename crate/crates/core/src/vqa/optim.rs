use crate::error::{check_dim, Error, Result};

pub const DEFAULT_ETA: f64 = 0.05;
pub const DEFAULT_EPS: f64 = 1e-8;

/// Adagrad: `G ← G + g²`, `θ ← θ − η·g/√(G + ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adagrad {
    pub eta: f64,
    pub eps: f64,
    accum: Vec<f64>,
    steps: usize,
}

impl Adagrad {
    pub fn new(n_params: usize, eta: f64, eps: f64) -> Result<Self> {
        if !(eta > 0.0) || !(eps >= 0.0) {
            return Err(Error::Config(format!(
                "invalid Adagrad settings eta={eta} eps={eps}"
            )));
        }
        Ok(Adagrad {
            eta,
            eps,
            accum: vec![0.0; n_params],
            steps: 0,
        })
    }

    pub fn accumulated(&self) -> &[f64] {
        &self.accum
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        check_dim(self.accum.len(), params.len())?;
        check_dim(self.accum.len(), grad.len())?;
        for ((p, g), acc) in params.iter_mut().zip(grad).zip(&mut self.accum) {
            *acc += g * g;
            if *g != 0.0 {
                *p -= self.eta * g / (*acc + self.eps).sqrt();
            }
        }
        self.steps += 1;
        Ok(())
    }
}
