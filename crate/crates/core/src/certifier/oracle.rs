use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, C64};
use crate::objective::MarginalObjective;
use crate::optim::{bfgs, BfgsOptions};
use crate::states::{schmidt_decompose, DensityOperator, MarginalSet, PureState, SchmidtDecomposition, SubsystemSet};

use super::resolve_config;

/// Angle reduced to `[-π, π]`.
pub fn wrap(phi: f64) -> f64 {
    phi - TAU * (phi / TAU).round()
}

/// `max_k |φ_k - φ_1|` modulo 2π: zero iff the phases differ by a global
/// phase only.
pub fn distance_from_equal(phases: &[f64]) -> f64 {
    phases.iter().map(|p| wrap(p - phases[0]).abs()).fold(0.0, f64::max)
}

fn phase_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| wrap(x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub residual_tol: f64,
    pub dedup: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { residual_tol: 1e-10, dedup: 1e-6, grad_tol: 1e-13, max_iter: 500 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleMinimizer {
    /// Phases with `φ_1 = 0`, reduced to `[-π, π]`.
    pub phases: Vec<f64>,
    pub residual: f64,
    /// `|<ψ|ψ(φ)>|` against the unphased state.
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub restarts: usize,
    /// Best minimizer found.
    pub phases: Vec<f64>,
    pub residual: f64,
    pub distance_from_equal: f64,
    /// Distinct minimizers with residual at most the tolerance.
    pub zero_residual_minimizers: Vec<OracleMinimizer>,
}

/// Third-marginal distance over the phase torus of a Schmidt decomposition.
struct TorusProblem {
    terms: Vec<Vec<C64>>,
    objective: MarginalObjective,
}

impl TorusProblem {
    fn new(sd: &SchmidtDecomposition, third: &SubsystemSet, target: &DensityOperator) -> Result<Self> {
        let terms = (0..sd.coefficients().len())
            .map(|k| {
                let w = sd.coefficients()[k].max(0.0).sqrt();
                sd.product_vector(k, k).into_iter().map(|z| z * w).collect()
            })
            .collect();
        let target = MarginalSet::new(vec![(third.clone(), target.clone())])?;
        let objective = MarginalObjective::new(sd.parent_labels(), sd.parent_dims(), &target)?;
        Ok(TorusProblem { terms, objective })
    }

    fn amplitudes(&self, phases: &[f64]) -> Vec<C64> {
        let mut psi = vec![linalg::ZERO; self.objective.dim()];
        for (t, &p) in self.terms.iter().zip(phases) {
            let e = C64::from_polar(1.0, p);
            for (a, v) in psi.iter_mut().zip(t) {
                *a += e * v;
            }
        }
        psi
    }

    fn full(free: &[f64]) -> Vec<f64> {
        std::iter::once(0.0).chain(free.iter().copied()).collect()
    }

    fn value_grad(&self, free: &[f64]) -> (f64, Vec<f64>) {
        let phases = Self::full(free);
        let (f, g) = self.objective.value_grad(&self.amplitudes(&phases));
        let grad = (1..phases.len())
            .map(|k| {
                let dpsi = C64::new(0.0, 1.0) * C64::from_polar(1.0, phases[k]);
                (dpsi.conj() * linalg::inner(&self.terms[k], &g)).re
            })
            .collect();
        (f, grad)
    }
}

/// Multi-start BFGS over the phase torus (`φ_1 = 0`), matching the
/// third-pair marginal of `Σ e^{iφ_i} sqrt(λ_i) |i>|i>` to `target`.
pub fn torus_oracle_target<R: Rng + ?Sized>(
    sd: &SchmidtDecomposition,
    third: &SubsystemSet,
    target: &DensityOperator,
    restarts: usize,
    rng: &mut R,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    let problem = TorusProblem::new(sd, third, target)?;
    let n = sd.coefficients().len();
    let reference = sd.reconstruct();
    let bopts = BfgsOptions { grad_tol: opts.grad_tol, max_iter: opts.max_iter };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut minimizers: Vec<OracleMinimizer> = Vec::new();
    for _ in 0..restarts.max(1) {
        let x0: Vec<f64> = (1..n).map(|_| rng.random_range(-PI..PI)).collect();
        let m = bfgs(|x| problem.value_grad(x), &x0, bopts, None);
        let phases: Vec<f64> = TorusProblem::full(&m.x).into_iter().map(wrap).collect();
        let residual = m.value.max(0.0).sqrt();
        if best.as_ref().is_none_or(|(_, r)| residual < *r) {
            best = Some((phases.clone(), residual));
        }
        if residual <= opts.residual_tol && minimizers.iter().all(|q| phase_distance(&q.phases, &phases) > opts.dedup) {
            let state = PureState::from_parts(sd.parent_labels().to_vec(), sd.parent_dims().to_vec(), problem.amplitudes(&phases));
            let fidelity = linalg::inner(reference.amplitudes(), state.amplitudes()).norm();
            minimizers.push(OracleMinimizer { phases, residual, fidelity });
        }
    }
    let (phases, residual) = best.expect("at least one restart");
    minimizers.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    Ok(OracleReport {
        restarts: restarts.max(1),
        distance_from_equal: distance_from_equal(&phases),
        phases,
        residual,
        zero_residual_minimizers: minimizers,
    })
}

/// Torus oracle for `state` and a configuration `{P, Q, X}`: the target is
/// the state's own `X` marginal.
pub fn torus_oracle<R: Rng + ?Sized>(
    state: &PureState,
    config: &[SubsystemSet],
    restarts: usize,
    rng: &mut R,
) -> Result<OracleReport> {
    let (p, q, x) = resolve_config(state, config)?;
    let sd = schmidt_decompose(state, &p, &q)?;
    let target = state.partial_trace(&x)?;
    torus_oracle_target(&sd, &x, &target, restarts, rng, &OracleOptions::default())
}
