//! Witness search for states with degenerate or vanishing Schmidt
//! coefficients. Every pure state sharing both Schmidt-side marginals is
//! `Σ_i sqrt(λ_i) |i> ⊗ Σ_j W_ji |j>` with `W` block-unitary over clusters of
//! equal coefficients; singleton clusters reduce to the phase torus.

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::{self, CMatrix, Split, C64};
use crate::optim::{levenberg_marquardt, LmOptions};
use crate::sampling::haar_unitary;
use crate::states::{PureState, SchmidtDecomposition, SubsystemSet};

/// Groups the first `rank` coefficients into runs whose consecutive gaps are
/// at most `gap_tol`.
pub fn coefficient_clusters(lambdas: &[f64], rank: usize, gap_tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..rank.min(lambdas.len()) {
        match out.last_mut() {
            Some(c) if (lambdas[c[c.len() - 1]] - lambdas[i]).abs() <= gap_tol => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct BlockWitness {
    pub state: PureState,
    pub fidelity: f64,
    pub residual: f64,
}

struct BlockProblem {
    clusters: Vec<Vec<usize>>,
    /// `sqrt(λ_i) |i>_left |j>_right` per cluster, indexed `[c][a * m + b]`
    /// for local indices `a` (left) and `b` (right).
    products: Vec<Vec<Vec<C64>>>,
    split: Split,
    target: CMatrix,
    dim: usize,
}

/// Real coordinates of a Hermitian `m × m` matrix.
fn hermitian_generators(m: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in a..m {
            let mut g = CMatrix::zeros(m, m);
            if a == b {
                g[(a, a)] = linalg::ONE;
                out.push(g);
            } else {
                g[(a, b)] = linalg::ONE;
                g[(b, a)] = linalg::ONE;
                out.push(g.clone());
                g[(a, b)] = C64::new(0.0, -1.0);
                g[(b, a)] = C64::new(0.0, 1.0);
                out.push(g);
            }
        }
    }
    out
}

impl BlockProblem {
    fn amplitudes(&self, w: &[CMatrix]) -> Vec<C64> {
        let mut psi = vec![linalg::ZERO; self.dim];
        for (c, cl) in self.clusters.iter().enumerate() {
            let m = cl.len();
            for a in 0..m {
                for b in 0..m {
                    let coef = w[c][(b, a)];
                    for (p, v) in psi.iter_mut().zip(&self.products[c][a * m + b]) {
                        *p += coef * v;
                    }
                }
            }
        }
        psi
    }

    fn eval(&self, w: &[CMatrix], gens: &[Vec<CMatrix>]) -> (Vec<f64>, DMatrix<f64>) {
        let psi = self.amplitudes(w);
        let diff = self.split.trace_outer(&psi, &psi) - &self.target;
        let r: Vec<f64> = diff.iter().flat_map(|z| [z.re, z.im]).collect();
        let cols: usize = gens.iter().map(Vec::len).sum();
        let mut jac = DMatrix::zeros(r.len(), cols);
        let mut col = 0;
        for (c, gs) in gens.iter().enumerate() {
            for g in gs {
                let dw = &w[c] * g * C64::new(0.0, 1.0);
                let mut tangent: Vec<CMatrix> = w.iter().map(|m| CMatrix::zeros(m.nrows(), m.ncols())).collect();
                tangent[c] = dw;
                let dpsi = self.amplitudes(&tangent);
                let t = self.split.trace_outer(&dpsi, &psi);
                let drho = &t + t.adjoint();
                for (k, z) in drho.iter().enumerate() {
                    jac[(2 * k, col)] = z.re;
                    jac[(2 * k + 1, col)] = z.im;
                }
                col += 1;
            }
        }
        (r, jac)
    }
}

/// Levenberg–Marquardt over block unitaries from `restarts` Haar-random
/// starts. Returns the first state reproducing the third marginal within
/// `residual_tol` at fidelity at most `1 - fidelity_tol` to the original.
#[allow(clippy::too_many_arguments)]
pub fn block_witness_search<R: Rng + ?Sized>(
    sd: &SchmidtDecomposition,
    third: &SubsystemSet,
    target: &CMatrix,
    gap_tol: f64,
    restarts: usize,
    residual_tol: f64,
    fidelity_tol: f64,
    rng: &mut R,
) -> Option<BlockWitness> {
    let labels = sd.parent_labels();
    let mut keep: Vec<usize> =
        third.labels().iter().filter_map(|l| labels.iter().position(|p| p == l)).collect();
    keep.sort_unstable();
    let clusters = coefficient_clusters(sd.coefficients(), sd.rank(), gap_tol);
    let products = clusters
        .iter()
        .map(|cl| {
            let mut v = Vec::new();
            for &i in cl {
                for &j in cl {
                    let w = sd.coefficients()[i].max(0.0).sqrt();
                    v.push(sd.product_vector(i, j).into_iter().map(|z| z * w).collect());
                }
            }
            v
        })
        .collect();
    let problem = BlockProblem {
        products,
        split: Split::new(sd.parent_dims(), &keep),
        target: target.clone(),
        dim: sd.parent_dims().iter().product(),
        clusters,
    };
    let gens: Vec<Vec<CMatrix>> = problem.clusters.iter().map(|c| hermitian_generators(c.len())).collect();
    let reference = sd.reconstruct();

    for _ in 0..restarts {
        let w0: Vec<CMatrix> =
            problem.clusters.iter().map(|c| haar_unitary(c.len(), rng).expect("positive size")).collect();
        let step = |w: &Vec<CMatrix>, delta: &[f64]| {
            let mut out = w.clone();
            let mut k = 0;
            for (c, gs) in gens.iter().enumerate() {
                let m = problem.clusters[c].len();
                let mut h = CMatrix::zeros(m, m);
                for g in gs {
                    h += g * C64::new(delta[k], 0.0);
                    k += 1;
                }
                out[c] = &w[c] * linalg::expi_hermitian(&h);
            }
            out
        };
        let fit = levenberg_marquardt(w0, |w| problem.eval(w, &gens), step, LmOptions::default());
        if fit.residual > residual_tol {
            continue;
        }
        let amps = problem.amplitudes(&fit.state);
        let fidelity = linalg::inner(reference.amplitudes(), &amps).norm();
        if fidelity <= 1.0 - fidelity_tol {
            let state = PureState::from_parts(labels.to_vec(), sd.parent_dims().to_vec(), amps);
            return Some(BlockWitness { state, fidelity, residual: fit.residual });
        }
    }
    None
}
