//! Uniqueness certificate for four-party pure states given the marginals
//! `{P, Q, X}`, where `P` and `Q` are complementary pairs fixing a Schmidt
//! decomposition and `X` takes one party from each side.
//!
//! Every pure state sharing `ρ_P` and `ρ_Q` with a generic `ψ` is
//! `Σ e^{iφ_i} sqrt(λ_i) |i>|i>`. Matching `ρ_X` is linear in
//! `γ_ij = (1 - e^{i(φ_i - φ_j)}) sqrt(λ_i λ_j)`, which leaves a kernel of
//! dimension `d² - 1`; the quadratic compatibility of `γ` with some phase
//! vector then admits only `γ = 0`. A multi-start search over the phase torus
//! corroborates the algebra independently.

mod blocks;
mod compat;
mod oracle;
mod system;
mod witness;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::sampling::{genericity_check, GenericityReport, RandomSource, DEFAULT_GAP_TOL};
use crate::states::{
    config_string, fidelity, marginal_distance, marginal_set, schmidt_decompose, MarginalSet, PureState,
    StateJson, SubsystemSet,
};

pub use blocks::OperatorBlocks;
pub use compat::{
    modulus_defect, normalized_from_phases, solve_compatibility, triple_defect, CompatibilityOptions,
    CompatibilityReport, CompatibilityRoot, CompatibilitySystem,
};
pub use oracle::{
    distance_from_equal, torus_oracle, torus_oracle_target, wrap, OracleMinimizer, OracleOptions, OracleReport,
};
pub use system::{
    assemble_linear_system, gamma_from_phases, gamma_pairs, pack, solve_nullspace, unpack, GammaLinearSystem,
    NullspaceBasis,
};
pub use witness::{block_witness_search, coefficient_clusters, BlockWitness};

/// `Q_ij`, `R_ij` for `sd` and the third pair of the configuration.
pub fn build_operator_blocks(sd: &crate::states::SchmidtDecomposition, third_pair: &SubsystemSet) -> Result<OperatorBlocks> {
    OperatorBlocks::build(sd, third_pair)
}

/// Splits a configuration into `(P, Q, X)`: `P`, `Q` disjoint pairs covering
/// all four parties (in configuration order), `X` the remaining pair, which
/// must meet both.
pub fn resolve_config(state: &PureState, config: &[SubsystemSet]) -> Result<(SubsystemSet, SubsystemSet, SubsystemSet)> {
    if state.party_count() != 4 {
        return arg(format!("certifier needs four parties, got {}", state.party_count()));
    }
    for set in config {
        state.positions(set)?;
    }
    let unsupported = || Error::UnsupportedConfig(config_string(config));
    if config.len() != 3 || config.iter().any(|s| s.len() != 2) {
        return Err(unsupported());
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let (p, q) = (&config[i], &config[j]);
            if p.is_disjoint(q) {
                let x = &config[3 - i - j];
                if !x.is_disjoint(p) && !x.is_disjoint(q) {
                    return Ok((p.clone(), q.clone(), x.clone()));
                }
            }
        }
    }
    Err(unsupported())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Unique,
    NotGeneric,
    NonuniqueWitness,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Unique => "UNIQUE",
            Verdict::NotGeneric => "NOT_GENERIC",
            Verdict::NonuniqueWitness => "NONUNIQUE_WITNESS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub gap_tol: f64,
    pub span_tol: f64,
    pub kernel_tol: f64,
    pub compatibility: CompatibilityOptions,
    pub oracle: OracleOptions,
    /// Largest phase spread still counted as "all equal".
    pub phase_tol: f64,
    /// Marginal distance a witness must reach.
    pub witness_marginal: f64,
    /// A witness needs fidelity at most `1 - witness_fidelity`.
    pub witness_fidelity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gap_tol: DEFAULT_GAP_TOL,
            span_tol: 1e-8,
            kernel_tol: 1e-8,
            compatibility: CompatibilityOptions::default(),
            oracle: OracleOptions::default(),
            phase_tol: 1e-6,
            witness_marginal: 1e-10,
            witness_fidelity: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Seed of the restart streams; the run is a pure function of it.
    pub seed: u64,
    /// Newton restarts draw from `stream`, the oracle from `stream + 1`, the
    /// block search from `stream + 2`.
    pub stream: u64,
    pub restarts: usize,
    pub oracle_restarts: usize,
    pub tolerances: Tolerances,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { seed: 0, stream: 1, restarts: 50, oracle_restarts: 20, tolerances: Tolerances::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// `oracle`, `algebraic` or `block_search`.
    pub source: String,
    pub state: StateJson,
    pub fidelity: f64,
    pub marginal_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UdpCertificate {
    pub verdict: Verdict,
    pub config: String,
    pub bipartition: String,
    pub third_pair: String,
    pub local_dim: usize,
    pub schmidt_coefficients: Vec<f64>,
    pub genericity: GenericityReport,
    pub span_dim: Option<usize>,
    pub system_shape: Option<[usize; 2]>,
    pub nullspace_dim: Option<usize>,
    pub compatibility: Option<CompatibilityReport>,
    pub max_nontrivial_norm: f64,
    pub oracle: Option<OracleReport>,
    pub witness: Option<Witness>,
    pub options: CertifyOptions,
}

impl UdpCertificate {
    pub fn witness_state(&self) -> Option<PureState> {
        self.witness.as_ref().and_then(|w| w.state.clone().into_state(true).ok())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn check_witness(
    state: &PureState,
    candidate: PureState,
    config: &[SubsystemSet],
    target: &MarginalSet,
    tol: &Tolerances,
    source: &str,
) -> Result<Option<Witness>> {
    let dist = marginal_distance(&marginal_set(&candidate, config)?, target)?;
    let fid = fidelity(state, &candidate)?;
    if dist <= tol.witness_marginal && fid <= 1.0 - tol.witness_fidelity {
        Ok(Some(Witness { source: source.into(), state: (&candidate).into(), fidelity: fid, marginal_distance: dist }))
    } else {
        Ok(None)
    }
}

/// [`certify_with`] under default options.
pub fn certify(state: &PureState, config: &[SubsystemSet]) -> Result<UdpCertificate> {
    certify_with(state, config, &CertifyOptions::default())
}

/// Runs the full pipeline. Deterministic given `opts`.
pub fn certify_with(state: &PureState, config: &[SubsystemSet], opts: &CertifyOptions) -> Result<UdpCertificate> {
    let tol = &opts.tolerances;
    let dims = state.dims();
    if dims.len() != 4 || dims.iter().any(|&x| x != dims[0]) {
        return arg("certify needs four parties of equal local dimension");
    }
    let d = dims[0];
    let (p, q, x) = resolve_config(state, config)?;
    let sd = schmidt_decompose(state, &p, &q)?;
    let genericity = genericity_check(&sd, tol.gap_tol);
    let target = marginal_set(state, config)?;
    let target_x = state.partial_trace(&x)?;
    let mut cert = UdpCertificate {
        verdict: Verdict::Inconclusive,
        config: config_string(config),
        bipartition: format!("{p}|{q}"),
        third_pair: x.to_string(),
        local_dim: d,
        schmidt_coefficients: sd.coefficients().to_vec(),
        genericity: genericity.clone(),
        span_dim: None,
        system_shape: None,
        nullspace_dim: None,
        compatibility: None,
        max_nontrivial_norm: 0.0,
        oracle: None,
        witness: None,
        options: *opts,
    };

    if !genericity.is_generic {
        let mut rng = RandomSource::new(opts.seed, opts.stream + 2);
        let found = block_witness_search(
            &sd,
            &x,
            target_x.matrix(),
            tol.gap_tol,
            opts.oracle_restarts,
            tol.witness_marginal,
            tol.witness_fidelity,
            &mut rng,
        );
        if let Some(w) = found {
            cert.witness = check_witness(state, w.state, config, &target, tol, "block_search")?;
        }
        cert.verdict = if cert.witness.is_some() { Verdict::NonuniqueWitness } else { Verdict::NotGeneric };
        return Ok(cert);
    }

    let blocks = OperatorBlocks::build(&sd, &x)?;
    cert.span_dim = Some(blocks.span_dim(tol.span_tol));
    let system = assemble_linear_system(&blocks);
    let (rows, cols) = system.shape();
    cert.system_shape = Some([rows, cols]);
    let kernel = solve_nullspace(&system, tol.kernel_tol);
    cert.nullspace_dim = Some(kernel.dim());

    let compat_sys = CompatibilitySystem::new(&kernel, sd.coefficients());
    let report = if kernel.dim() > 0 {
        let mut rng = RandomSource::new(opts.seed, opts.stream);
        solve_compatibility(&compat_sys, opts.restarts, &mut rng, &tol.compatibility)
    } else {
        CompatibilityReport { restarts: 0, converged: 0, roots: Vec::new() }
    };
    cert.max_nontrivial_norm = report.max_nontrivial_norm();
    log::debug!(
        "compatibility: {} of {} restarts converged, {} distinct roots",
        report.converged,
        report.restarts,
        report.roots.len()
    );

    let mut rng = RandomSource::new(opts.seed, opts.stream + 1);
    let oracle = torus_oracle_target(&sd, &x, &target_x, opts.oracle_restarts, &mut rng, &tol.oracle)?;

    for m in &oracle.zero_residual_minimizers {
        if cert.witness.is_some() {
            break;
        }
        if distance_from_equal(&m.phases) > tol.phase_tol {
            cert.witness = check_witness(state, sd.phased_state(&m.phases), config, &target, tol, "oracle")?;
        }
    }
    for root in report.genuine_nontrivial() {
        if cert.witness.is_some() {
            break;
        }
        let phases = compat_sys.phases(&root.x);
        cert.witness = check_witness(state, sd.phased_state(&phases), config, &target, tol, "algebraic")?;
    }

    let algebra_unique = kernel.dim() + 1 == d * d && report.genuine_nontrivial().next().is_none();
    let oracle_unique = oracle.residual <= tol.oracle.residual_tol && oracle.distance_from_equal <= tol.phase_tol;
    cert.verdict = if cert.witness.is_some() {
        Verdict::NonuniqueWitness
    } else if algebra_unique && oracle_unique {
        Verdict::Unique
    } else {
        Verdict::Inconclusive
    };
    cert.compatibility = Some(report);
    cert.oracle = Some(oracle);
    Ok(cert)
}

/// Convenience for callers holding their own generator: draws the option
/// seed from `rng`.
pub fn certify_seeded<R: Rng + ?Sized>(state: &PureState, config: &[SubsystemSet], rng: &mut R) -> Result<UdpCertificate> {
    let opts = CertifyOptions { seed: rng.next_u64(), ..CertifyOptions::default() };
    certify_with(state, config, &opts)
}
