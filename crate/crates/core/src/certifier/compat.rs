use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, C64};
use crate::optim::{damped_newton, NewtonOptions};

use super::system::{gamma_pairs, NullspaceBasis};

/// `c_ij = 1 - e^{i(φ_i - φ_j)}` over the pairs `i < j`.
pub fn normalized_from_phases(phases: &[f64]) -> Vec<C64> {
    gamma_pairs(phases.len())
        .into_iter()
        .map(|(i, j)| linalg::ONE - C64::from_polar(1.0, phases[i] - phases[j]))
        .collect()
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // Position of (i, j), i < j, in lexicographic order.
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Largest violation of `c_ij c_jk = c_ij + c_jk - c_ik` over `i < j < k`.
pub fn triple_defect(c: &[C64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (cij, cjk, cik) = (c[pair_index(n, i, j)], c[pair_index(n, j, k)], c[pair_index(n, i, k)]);
                worst = worst.max((cij * cjk - cij - cjk + cik).norm());
            }
        }
    }
    worst
}

/// Largest violation of `|c|² = c + conj(c)`.
pub fn modulus_defect(c: &[C64]) -> f64 {
    c.iter().map(|z| (z.norm_sqr() - 2.0 * z.re).abs()).fold(0.0, f64::max)
}

/// Quadratic constraints on the kernel coordinates `x`:
/// with `γ = Σ_a x_a v^a` and `c = γ / sqrt(λ_i λ_j)`, every pair must obey
/// `|c|² = 2 Re c`. Newton works on the pairs with `i = 1`; the rest, plus
/// the triple identity, serve as a check.
#[derive(Clone, Debug)]
pub struct CompatibilitySystem {
    n: usize,
    weights: Vec<f64>,
    /// Row `p`: `v^a_p / sqrt(λ_i λ_j)` for each kernel vector `a`.
    vectors: DMatrix<C64>,
    selected: Vec<usize>,
}

impl CompatibilitySystem {
    pub fn new(basis: &NullspaceBasis, lambdas: &[f64]) -> Self {
        let n = lambdas.len();
        let pairs = gamma_pairs(n);
        let weights: Vec<f64> = pairs.iter().map(|&(i, j)| (lambdas[i] * lambdas[j]).sqrt()).collect();
        let m = basis.dim();
        let vectors = DMatrix::from_fn(pairs.len(), m, |p, a| {
            C64::new(basis.basis[(2 * p, a)], basis.basis[(2 * p + 1, a)]) / weights[p]
        });
        let selected = pairs.iter().enumerate().filter(|(_, &(i, _))| i == 0).map(|(p, _)| p).collect();
        CompatibilitySystem { n, weights, vectors, selected }
    }

    pub fn unknowns(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn terms(&self) -> usize {
        self.n
    }

    /// Normalized variables of all pairs.
    pub fn normalized(&self, x: &[f64]) -> Vec<C64> {
        (0..self.vectors.nrows())
            .map(|p| (0..x.len()).map(|a| self.vectors[(p, a)] * x[a]).sum())
            .collect()
    }

    /// `γ` of all pairs.
    pub fn gamma(&self, x: &[f64]) -> Vec<C64> {
        self.normalized(x).into_iter().zip(&self.weights).map(|(c, w)| c * *w).collect()
    }

    /// Selected equations and their Jacobian.
    pub fn eval(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let c = self.normalized(x);
        let f = self.selected.iter().map(|&p| c[p].norm_sqr() - 2.0 * c[p].re).collect();
        let j = DMatrix::from_fn(self.selected.len(), x.len(), |r, a| {
            let p = self.selected[r];
            let v = self.vectors[(p, a)];
            2.0 * (c[p].conj() * v).re - 2.0 * v.re
        });
        (f, j)
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        self.eval(x).0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max violation over every pair and every triple.
    pub fn full_residual(&self, x: &[f64]) -> f64 {
        let c = self.normalized(x);
        modulus_defect(&c).max(triple_defect(&c, self.n))
    }

    /// Phases (with `φ_1 = 0`) from the `c_1j` of a root.
    pub fn phases(&self, x: &[f64]) -> Vec<f64> {
        let c = self.normalized(x);
        let mut phases = vec![0.0];
        phases.extend((1..self.n).map(|j| -(linalg::ONE - c[pair_index(self.n, 0, j)]).arg()));
        phases
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityOptions {
    pub start_box: f64,
    pub newton_tol: f64,
    pub root_tol: f64,
    pub dedup: f64,
    pub trivial_norm: f64,
    pub full_check_tol: f64,
}

impl Default for CompatibilityOptions {
    fn default() -> Self {
        CompatibilityOptions {
            start_box: 2.0,
            newton_tol: 1e-12,
            root_tol: 1e-10,
            dedup: 1e-6,
            trivial_norm: 1e-6,
            full_check_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityRoot {
    pub x: Vec<f64>,
    pub norm: f64,
    pub residual: f64,
    pub full_residual: f64,
    pub trivial: bool,
    /// Satisfies every pair and triple identity, not only the `i = 1` rows.
    pub genuine: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub restarts: usize,
    pub converged: usize,
    pub roots: Vec<CompatibilityRoot>,
}

impl CompatibilityReport {
    pub fn nontrivial(&self) -> impl Iterator<Item = &CompatibilityRoot> {
        self.roots.iter().filter(|r| !r.trivial)
    }

    pub fn genuine_nontrivial(&self) -> impl Iterator<Item = &CompatibilityRoot> {
        self.nontrivial().filter(|r| r.genuine)
    }

    pub fn max_nontrivial_norm(&self) -> f64 {
        self.nontrivial().map(|r| r.norm).fold(0.0, f64::max)
    }
}

/// Damped Newton from `restarts` uniform starts in `||x||_∞ ≤ start_box`.
/// Converged roots are deduplicated and returned in lexicographic order.
pub fn solve_compatibility<R: Rng + ?Sized>(
    sys: &CompatibilitySystem,
    restarts: usize,
    rng: &mut R,
    opts: &CompatibilityOptions,
) -> CompatibilityReport {
    let m = sys.unknowns();
    let newton = NewtonOptions { tol: opts.newton_tol, max_iter: 100 };
    let mut roots: Vec<CompatibilityRoot> = Vec::new();
    let mut converged = 0;
    for _ in 0..restarts {
        let x0: Vec<f64> = (0..m).map(|_| rng.random_range(-opts.start_box..=opts.start_box)).collect();
        let root = damped_newton(|x| sys.eval(x), &x0, newton);
        if root.residual > opts.root_tol {
            continue;
        }
        converged += 1;
        let x = root.x;
        if roots.iter().any(|r| r.x.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= opts.dedup) {
            continue;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let full_residual = sys.full_residual(&x);
        roots.push(CompatibilityRoot {
            norm,
            residual: root.residual,
            full_residual,
            trivial: norm <= opts.trivial_norm,
            genuine: full_residual <= opts.full_check_tol,
            x,
        });
    }
    roots.sort_by(|a, b| {
        a.x.iter().zip(&b.x).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    CompatibilityReport { restarts, converged, roots }
}
