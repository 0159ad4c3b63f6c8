//! Direct search for distinct pure states compatible with a marginal set,
//! the marginal survey, the `U_D` witness and the `n`-party reduction.

mod corollary;
mod fig2a;

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg::{self, C64};
use crate::objective::MarginalObjective;
use crate::optim::{bfgs, BfgsOptions};
use crate::sampling::{complex_gaussian, haar_state, RandomSource};
use crate::states::{config_string, fidelity, marginal_set, MarginalSet, PureState, SubsystemSet};

pub use corollary::{corollary_check, corollary_check_state, CorollaryOptions, CorollaryReport, CorollaryVerdict};
pub use fig2a::{fig2a_witness, fig2a_witness_with, Fig2aWitness};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Candidates at or below this mismatch count as compatible.
    pub mismatch_tol: f64,
    /// `DISTINCT_FOUND` needs fidelity at most `1 - distinct_gap`.
    pub distinct_gap: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { grad_tol: 1e-10, max_iter: 500, mismatch_tol: 1e-6, distinct_gap: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Gauge-fixed so that `<reference|best_state>` is real and non-negative.
    pub best_state: PureState,
    pub mismatch: f64,
    pub fidelity_to_reference: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

fn split_real(x: &[f64]) -> Vec<C64> {
    let n = x.len() / 2;
    (0..n).map(|k| C64::new(x[k], x[n + k])).collect()
}

fn join_real(z: &[C64]) -> Vec<f64> {
    z.iter().map(|v| v.re).chain(z.iter().map(|v| v.im)).collect()
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Objective on `R^{2N}` evaluated at `x / ||x||`, so that its gradient is
/// tangent to the sphere.
fn sphere_value_grad(obj: &MarginalObjective, x: &[f64]) -> (f64, Vec<f64>) {
    let z = split_real(x);
    let n2 = linalg::norm_sqr(&z);
    let n = n2.sqrt();
    let psi: Vec<C64> = z.iter().map(|v| v / n).collect();
    let (f, g) = obj.value_grad(&psi);
    let radial = linalg::inner(&z, &g).re / (n2 * n);
    let grad: Vec<C64> = g.iter().zip(&z).map(|(gk, zk)| gk / n - zk * radial).collect();
    (f, join_real(&grad))
}

/// Multi-start quasi-Newton on the unit sphere. Each restart begins at a
/// uniformly random state; `starts` are tried first. Among results with
/// mismatch at most `mismatch_tol` the one farthest from `reference` is
/// kept, otherwise the best fit.
pub fn compatibility_search_from<R: Rng + ?Sized>(
    target: &MarginalSet,
    reference: &PureState,
    starts: &[PureState],
    restarts: usize,
    rng: &mut R,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let obj = MarginalObjective::new(reference.labels(), reference.dims(), target)?;
    let dim = reference.dim();
    let bopts = BfgsOptions { grad_tol: opts.grad_tol, max_iter: opts.max_iter };
    let mut inits: Vec<Vec<f64>> = Vec::new();
    for s in starts {
        if s.dims() != reference.dims() {
            return arg("start state has the wrong shape");
        }
        inits.push(join_real(s.amplitudes()));
    }
    for _ in 0..restarts {
        inits.push(join_real(&(0..dim).map(|_| complex_gaussian(rng)).collect::<Vec<_>>()));
    }
    if inits.is_empty() {
        return arg("no restarts requested");
    }
    let mut best: Option<(f64, f64, Vec<f64>, bool)> = None;
    for x0 in &inits {
        let m = bfgs(|x| sphere_value_grad(&obj, x), x0, bopts, Some(&normalize));
        let z = split_real(&m.x);
        let mismatch = m.value.max(0.0).sqrt();
        let fid = linalg::inner(reference.amplitudes(), &z).norm();
        let better = match &best {
            None => true,
            Some((bm, bf, _, _)) => {
                let (ok, bok) = (mismatch <= opts.mismatch_tol, *bm <= opts.mismatch_tol);
                match (ok, bok) {
                    (true, true) => fid < *bf,
                    (true, false) => true,
                    (false, true) => false,
                    (false, false) => mismatch < *bm,
                }
            }
        };
        if better {
            best = Some((mismatch, fid, m.x, m.converged));
        }
    }
    let (mismatch, _, x, converged) = best.expect("non-empty");
    let z = split_real(&x);
    let overlap = linalg::inner(reference.amplitudes(), &z);
    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { linalg::ONE };
    let best_state = reference.with_amplitudes(z.iter().map(|v| v * phase).collect());
    let fidelity_to_reference = fidelity(reference, &best_state)?;
    Ok(SearchResult { best_state, mismatch, fidelity_to_reference, restarts_used: inits.len(), converged })
}

pub fn compatibility_search<R: Rng + ?Sized>(
    target: &MarginalSet,
    reference: &PureState,
    restarts: usize,
    rng: &mut R,
) -> Result<SearchResult> {
    compatibility_search_from(target, reference, &[], restarts, rng, &SearchOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SurveyVerdict {
    NoDistinctFound,
    DistinctFound,
}

pub const SURVEY_COLUMNS: [&str; 7] =
    ["seed", "config", "mismatch", "fidelity_gap", "verdict", "mismatch_tol", "distinct_gap"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub seed: u64,
    pub config: String,
    pub mismatch: f64,
    /// `1 - fidelity` of the reported candidate.
    pub fidelity_gap: f64,
    pub verdict: SurveyVerdict,
    pub mismatch_tol: f64,
    pub distinct_gap: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyTable {
    pub rows: Vec<SurveyRow>,
}

impl SurveyTable {
    pub fn distinct_count(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == SurveyVerdict::DistinctFound).count()
    }

    /// CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| crate::Error::Argument(e.to_string()))?;
        }
        if self.rows.is_empty() {
            w.write_record(SURVEY_COLUMNS)
                .map_err(|e| crate::Error::Argument(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One survey row: a Haar-random four-qubit state from stream 0 of `seed`,
/// searched with restarts from stream 1.
pub fn survey_row(config: &[SubsystemSet], seed: u64, restarts: usize, opts: &SearchOptions) -> Result<SurveyRow> {
    let state = haar_state(&[2; 4], &mut RandomSource::new(seed, 0))?;
    let target = marginal_set(&state, config)?;
    let mut rng = RandomSource::new(seed, 1);
    let r = compatibility_search_from(&target, &state, &[], restarts, &mut rng, opts)?;
    let distinct = r.mismatch <= opts.mismatch_tol && r.fidelity_to_reference <= 1.0 - opts.distinct_gap;
    Ok(SurveyRow {
        seed,
        config: config_string(config),
        mismatch: r.mismatch,
        fidelity_gap: 1.0 - r.fidelity_to_reference,
        verdict: if distinct { SurveyVerdict::DistinctFound } else { SurveyVerdict::NoDistinctFound },
        mismatch_tol: opts.mismatch_tol,
        distinct_gap: opts.distinct_gap,
    })
}

/// Rows for seeds `base_seed .. base_seed + num_states`, computed in
/// parallel and ordered by seed.
pub fn survey(
    config: &[SubsystemSet],
    num_states: usize,
    restarts: usize,
    base_seed: u64,
    opts: &SearchOptions,
) -> Result<SurveyTable> {
    let rows = (0..num_states as u64)
        .into_par_iter()
        .map(|k| survey_row(config, base_seed + k, restarts, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurveyTable { rows })
}

/// All `k`-element subsets of the six two-body marginals of `A, B, C, D`.
pub fn pair_configs(k: usize) -> Vec<Vec<SubsystemSet>> {
    let pairs = crate::states::all_pairs(&crate::states::default_labels(4));
    let mut out = Vec::new();
    let n = pairs.len();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|b| mask & (1 << b) != 0).map(|b| pairs[b].clone()).collect());
        }
    }
    out
}
