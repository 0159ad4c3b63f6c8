//! Reduction of an `n`-party state to four-party constituents:
//! `|ψ> = Σ_i sqrt(λ_i) |ψ_i>_ABCD |i>_E`. The marginals `ρ_ABE`, `ρ_CDE`,
//! `ρ_BDE` yield each constituent's `ρ_AB`, `ρ_CD`, `ρ_BD`; each constituent
//! is then fixed up to a phase, and the off-diagonal `E` blocks lock the
//! relative phases.

use serde::{Deserialize, Serialize};

use crate::certifier::{certify_with, coefficient_clusters, torus_oracle_target, CertifyOptions, OracleOptions, Verdict};
use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, Split, C64};
use crate::sampling::{haar_state, RandomSource, DEFAULT_GAP_TOL};
use crate::states::{
    default_labels, fidelity, marginal_distance, marginal_set, parse_config, schmidt_decompose, DensityOperator,
    PureState, SchmidtDecomposition, SubsystemSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryOptions {
    pub gap_tol: f64,
    /// Reconstruction must reach fidelity `1 - fidelity_tol`.
    pub fidelity_tol: f64,
    /// Phase injected on the second constituent.
    pub perturbation: f64,
    /// A perturbation counts as detected above this `ρ_ABE` distance.
    pub detection_tol: f64,
    pub oracle_restarts: usize,
    pub certify: CertifyOptions,
}

impl Default for CorollaryOptions {
    fn default() -> Self {
        CorollaryOptions {
            gap_tol: DEFAULT_GAP_TOL,
            fidelity_tol: 1e-8,
            perturbation: 0.3,
            detection_tol: 1e-6,
            oracle_restarts: 20,
            certify: CertifyOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CorollaryVerdict {
    Unique,
    NotGeneric,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub n: usize,
    pub verdict: CorollaryVerdict,
    /// Nonzero spectrum of `ρ_E`, decreasing.
    pub e_spectrum: Vec<f64>,
    pub constituent_verdicts: Vec<Verdict>,
    /// Fidelity of each reconstructed constituent to the actual one.
    pub constituent_fidelities: Vec<f64>,
    pub reconstruction_fidelity: f64,
    /// Distance between the reconstruction's and the original's
    /// `(n - 2)`-body marginals.
    pub marginal_mismatch: f64,
    /// `ρ_ABE` distance after injecting a relative phase; absent for a
    /// single constituent.
    pub perturbation_mismatch: Option<f64>,
    pub unique: bool,
}

/// `<i|_E ρ_XE |j>_E` for `ρ_XE` with `E` as the trailing factor.
fn e_block(rho: &DensityOperator, vi: &[C64], vj: &[C64]) -> CMatrix {
    let de = vi.len();
    let dx = rho.matrix().nrows() / de;
    let m = rho.matrix();
    CMatrix::from_fn(dx, dx, |x, y| {
        let mut acc = linalg::ZERO;
        for e in 0..de {
            for f in 0..de {
                acc += vi[e].conj() * m[(x * de + e, y * de + f)] * vj[f];
            }
        }
        acc
    })
}

fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Rebuilds a four-party state from its `AB`, `CD` and `BD` marginals.
fn reconstruct_constituent(
    shell: &PureState,
    ab: &CMatrix,
    cd: &CMatrix,
    bd: &DensityOperator,
    restarts: usize,
    rng: &mut RandomSource,
) -> Result<(PureState, f64)> {
    let (mu, u_ab) = linalg::hermitian_eigen_desc(ab);
    let (_, u_cd) = linalg::hermitian_eigen_desc(cd);
    let mu: Vec<f64> = mu.into_iter().map(|m| m.max(0.0)).collect();
    let sd = SchmidtDecomposition::from_parts(shell, &[0, 1], mu, u_ab, u_cd)?;
    let x: SubsystemSet = "BD".parse()?;
    let r = torus_oracle_target(&sd, &x, bd, restarts, rng, &OracleOptions::default())?;
    Ok((sd.phased_state(&r.phases), r.residual))
}

/// Runs the reduction on a given state whose first four parties are
/// `A, B, C, D` and whose remaining parties form `E`.
pub fn corollary_check_state(state: &PureState, opts: &CorollaryOptions) -> Result<CorollaryReport> {
    let n = state.party_count();
    if n < 5 || state.dims().iter().any(|&d| d != 2) {
        return arg("corollary check needs at least five qubits");
    }
    let labels = state.labels();
    let core = SubsystemSet::new(labels[..4].to_vec())?;
    let e = SubsystemSet::new(labels[4..].to_vec())?;
    let sd = schmidt_decompose(state, &core, &e)?;
    let rank = sd.rank();
    let spectrum: Vec<f64> = sd.coefficients()[..rank].to_vec();
    let mut report = CorollaryReport {
        n,
        verdict: CorollaryVerdict::Inconclusive,
        e_spectrum: spectrum.clone(),
        constituent_verdicts: Vec::new(),
        constituent_fidelities: Vec::new(),
        reconstruction_fidelity: 0.0,
        marginal_mismatch: f64::INFINITY,
        perturbation_mismatch: None,
        unique: false,
    };
    if coefficient_clusters(&spectrum, rank, opts.gap_tol).len() < rank {
        report.verdict = CorollaryVerdict::NotGeneric;
        return Ok(report);
    }

    let e_vecs: Vec<Vec<C64>> = (0..rank).map(|i| sd.right_basis().column(i).iter().copied().collect()).collect();
    let pairs = ["AB", "CD", "BD"];
    let xe_sets: Vec<SubsystemSet> = pairs
        .iter()
        .map(|p| SubsystemSet::new(p.chars().map(String::from).chain(labels[4..].iter().cloned())))
        .collect::<Result<_>>()?;
    let xe_marginals: Vec<DensityOperator> = xe_sets.iter().map(|s| state.partial_trace(s)).collect::<Result<_>>()?;
    let core_labels = default_labels(4);
    let shell = PureState::basis(core_labels.clone(), vec![2; 4], &[0; 4])?;
    let config = parse_config("AB,CD,BD")?;

    let mut rng = RandomSource::new(opts.certify.seed, opts.certify.stream + 10);
    let mut recon: Vec<PureState> = Vec::new();
    for i in 0..rank {
        let actual = PureState::from_parts(core_labels.clone(), vec![2; 4], sd.left_basis().column(i).iter().copied().collect());
        let cert = certify_with(&actual, &config, &opts.certify)?;
        report.constituent_verdicts.push(cert.verdict);

        let own: Vec<CMatrix> =
            xe_marginals.iter().map(|r| e_block(r, &e_vecs[i], &e_vecs[i]) / C64::new(spectrum[i], 0.0)).collect();
        let bd = DensityOperator::from_parts(vec!["B".into(), "D".into()], vec![2, 2], own[2].clone());
        let (psi_i, _) = reconstruct_constituent(&shell, &own[0], &own[1], &bd, opts.oracle_restarts, &mut rng)?;
        report.constituent_fidelities.push(fidelity(&actual, &psi_i)?);
        recon.push(psi_i);
    }

    // Relative phases: <i|ρ_XE|0> = e^{i(θ_i - θ_0)} sqrt(λ_i λ_0) Tr |ψ_i><ψ_0|.
    let mut thetas = vec![0.0; rank];
    for i in 1..rank {
        let mut acc = linalg::ZERO;
        for (k, p) in pairs.iter().enumerate() {
            let pos: Vec<usize> = p.chars().map(|c| (c as u8 - b'A') as usize).collect();
            let t = Split::new(&[2; 4], &pos).trace_outer(recon[i].amplitudes(), recon[0].amplitudes());
            let b = e_block(&xe_marginals[k], &e_vecs[i], &e_vecs[0]);
            acc += hs_inner(&t, &b);
        }
        thetas[i] = acc.arg();
    }

    let assemble = |thetas: &[f64]| -> PureState {
        let de = e_vecs.first().map_or(1, Vec::len);
        let mut amps = vec![linalg::ZERO; 16 * de];
        for i in 0..rank {
            let w = C64::from_polar(spectrum[i].sqrt(), thetas[i]);
            for (c, a) in recon[i].amplitudes().iter().enumerate() {
                for (k, v) in e_vecs[i].iter().enumerate() {
                    amps[c * de + k] += w * a * v;
                }
            }
        }
        state.with_amplitudes(amps)
    };
    let rebuilt = assemble(&thetas);
    report.reconstruction_fidelity = fidelity(state, &rebuilt)?;
    report.marginal_mismatch = marginal_distance(&marginal_set(&rebuilt, &xe_sets)?, &marginal_set(state, &xe_sets)?)?;

    if rank >= 2 {
        let mut shifted = thetas.clone();
        shifted[1] += opts.perturbation;
        let perturbed = assemble(&shifted);
        let abe = std::slice::from_ref(&xe_sets[0]);
        report.perturbation_mismatch =
            Some(marginal_distance(&marginal_set(&perturbed, abe)?, &marginal_set(state, abe)?)?);
    }

    let certified = report.constituent_verdicts.iter().all(|v| *v == Verdict::Unique);
    let rebuilt_ok = report.reconstruction_fidelity >= 1.0 - opts.fidelity_tol;
    let locked = report.perturbation_mismatch.is_none_or(|m| m > opts.detection_tol);
    report.unique = certified && rebuilt_ok && locked;
    report.verdict = if report.unique { CorollaryVerdict::Unique } else { CorollaryVerdict::Inconclusive };
    Ok(report)
}

/// Draws a Haar-random `n`-qubit state from stream 0 of `seed` and runs the
/// reduction, with certifier restarts seeded by `seed`.
pub fn corollary_check(n: usize, seed: u64) -> Result<CorollaryReport> {
    if !(5..=6).contains(&n) {
        return arg("corollary check supports n = 5 or 6");
    }
    let state = haar_state(&vec![2; n], &mut RandomSource::new(seed, 0))?;
    let opts = CorollaryOptions { certify: CertifyOptions { seed, ..CertifyOptions::default() }, ..Default::default() };
    corollary_check_state(&state, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_qubits_reconstruct_uniquely() {
        let r = corollary_check(5, 3).unwrap();
        assert_eq!(r.verdict, CorollaryVerdict::Unique, "{r:?}");
        assert!(r.reconstruction_fidelity >= 1.0 - 1e-8);
        assert!(r.perturbation_mismatch.unwrap() > 1e-6);
    }

    #[test]
    fn product_environment_has_one_term() {
        let core = haar_state(&[2; 4], &mut RandomSource::new(4, 0)).unwrap();
        let mut amps = vec![linalg::ZERO; 32];
        for (k, a) in core.amplitudes().iter().enumerate() {
            amps[2 * k] = *a;
        }
        let psi = PureState::new(default_labels(5), vec![2; 5], amps).unwrap();
        let r = corollary_check_state(&psi, &CorollaryOptions::default()).unwrap();
        assert_eq!(r.e_spectrum.len(), 1);
        assert_eq!(r.constituent_verdicts, vec![Verdict::Unique]);
        assert!(r.unique);
        assert!(r.perturbation_mismatch.is_none());
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(corollary_check(4, 0).is_err());
        assert!(corollary_check(7, 0).is_err());
    }
}
