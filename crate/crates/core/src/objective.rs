//! Squared marginal distance to a fixed target, with its gradient.

use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, Split, C64};
use crate::states::MarginalSet;

/// `f(ψ) = Σ_S ||Tr_{S̄}|ψ><ψ| - T_S||²` for an unnormalized amplitude
/// vector `ψ` of a fixed shape.
#[derive(Clone, Debug)]
pub struct MarginalObjective {
    splits: Vec<Split>,
    targets: Vec<CMatrix>,
    dim: usize,
}

impl MarginalObjective {
    pub fn new(labels: &[String], dims: &[usize], target: &MarginalSet) -> Result<Self> {
        let mut splits = Vec::new();
        let mut targets = Vec::new();
        for (set, rho) in target.entries() {
            let mut pos = Vec::new();
            for l in set.labels() {
                match labels.iter().position(|p| p == l) {
                    Some(p) => pos.push(p),
                    None => return Err(crate::Error::Label(l.clone())),
                }
            }
            pos.sort_unstable();
            let want: Vec<usize> = pos.iter().map(|&p| dims[p]).collect();
            let order: Vec<&String> = pos.iter().map(|&p| &labels[p]).collect();
            if rho.dims() != want.as_slice() || rho.labels().iter().ne(order.iter().copied()) {
                return arg(format!("target marginal {set} does not match the state's dims"));
            }
            splits.push(Split::new(dims, &pos));
            targets.push(rho.matrix().clone());
        }
        Ok(MarginalObjective { splits, targets, dim: dims.iter().product() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, psi: &[C64]) -> f64 {
        self.splits
            .iter()
            .zip(&self.targets)
            .map(|(s, t)| {
                let m = s.reshape(psi);
                linalg::frobenius_sq(&(&m * m.adjoint() - t))
            })
            .sum()
    }

    /// Value and gradient `G` with `df = Re <dψ, G>`.
    pub fn value_grad(&self, psi: &[C64]) -> (f64, Vec<C64>) {
        let mut value = 0.0;
        let mut grad = vec![linalg::ZERO; psi.len()];
        for (s, t) in self.splits.iter().zip(&self.targets) {
            let m = s.reshape(psi);
            let d = &m * m.adjoint() - t;
            value += linalg::frobenius_sq(&d);
            let dm = (&d * &m) * C64::new(4.0, 0.0);
            for (g, v) in grad.iter_mut().zip(s.flatten(&dm)) {
                *g += v;
            }
        }
        (value, grad)
    }
}
