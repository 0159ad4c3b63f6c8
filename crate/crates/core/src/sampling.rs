//! Haar-random unitaries and states, and generic four-party states drawn
//! directly in Schmidt form.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::states::{default_labels, PureState, SchmidtDecomposition, SubsystemSet, SCHMIDT_RANK_TOL};

/// Default minimum gap between Schmidt coefficients of a generic state.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Seeded ChaCha stream. Identical `(seed, stream)` pairs produce identical
/// draws; distinct stream ids are independent and may run concurrently.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh source on the same seed with another stream id.
    pub fn fork(&self, stream: u64) -> Self {
        RandomSource::new(self.seed, stream)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Standard complex normal: real and imaginary parts with variance 1/2.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Haar-random `dim x dim` unitary: QR of a complex Ginibre matrix with the
/// diagonal of `R` rotated to positive reals.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim == 0 {
        return arg("unitary dimension must be at least 1");
    }
    let z = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(q)
}

/// Haar-random pure state: first column of a Haar-random unitary.
pub fn haar_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    haar_state_labeled(default_labels(dims.len()), dims, rng)
}

pub fn haar_state_labeled<R: Rng + ?Sized>(labels: Vec<String>, dims: &[usize], rng: &mut R) -> Result<PureState> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return arg("every subsystem dimension must be at least 2");
    }
    let total: usize = dims.iter().product();
    let u = haar_unitary(total, rng)?;
    PureState::normalized(labels, dims.to_vec(), u.column(0).iter().copied().collect())
}

/// Generic four-party state of local dimension `d`, built in Schmidt form
/// along `AB|CD`: independent Haar bases on each side, and coefficients
/// given by the spectrum of the `AB` marginal of a Haar-random state on
/// `C^{d²} ⊗ C^{d²}`.
pub fn generic_schmidt_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<(PureState, SchmidtDecomposition)> {
    if d < 2 {
        return arg("local dimension must be at least 2");
    }
    let n = d * d;
    let u_ab = haar_unitary(n, rng)?;
    let u_cd = haar_unitary(n, rng)?;
    let bipartite = haar_state_labeled(vec!["L".into(), "R".into()], &[n, n], rng)?;
    let rho = bipartite.partial_trace(&SubsystemSet::parse("L")?)?;
    let lambdas: Vec<f64> = rho.eigenvalues().into_iter().map(|l| l.max(0.0)).collect();
    let sum: f64 = lambdas.iter().sum();
    let lambdas: Vec<f64> = lambdas.into_iter().map(|l| l / sum).collect();

    let shell = PureState::basis(default_labels(4), vec![d; 4], &[0; 4])?;
    let sd = SchmidtDecomposition::from_parts(&shell, &[0, 1], lambdas, u_ab, u_cd)?;
    Ok((sd.reconstruct(), sd))
}

/// Genericity diagnostics of a Schmidt spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub schmidt_rank: usize,
    pub full_rank: usize,
    pub min_coefficient: f64,
    pub min_pairwise_gap: f64,
    pub gap_tol: f64,
    pub is_generic: bool,
}

/// Full Schmidt rank and pairwise gaps above `gap_tol`.
pub fn genericity_check(sd: &SchmidtDecomposition, gap_tol: f64) -> GenericityReport {
    let lambdas = sd.coefficients();
    let max = lambdas.first().copied().unwrap_or(0.0);
    let min_coefficient = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    // Sorted, so the closest pair is adjacent.
    let min_pairwise_gap = lambdas.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    let schmidt_rank = sd.rank();
    let rank_floor = SCHMIDT_RANK_TOL * SCHMIDT_RANK_TOL * max;
    GenericityReport {
        schmidt_rank,
        full_rank: lambdas.len(),
        min_coefficient,
        min_pairwise_gap,
        gap_tol,
        is_generic: schmidt_rank == lambdas.len() && min_coefficient > rank_floor && min_pairwise_gap > gap_tol,
    }
}
