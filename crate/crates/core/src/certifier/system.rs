use nalgebra::DMatrix;

use crate::linalg::{self, C64};

use super::blocks::OperatorBlocks;

/// Index pairs `(i, j)`, `i < j`, in lexicographic order. Pair `p` owns
/// unknown columns `2p` (real part) and `2p + 1` (imaginary part).
pub fn gamma_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// `γ_ij = (1 - e^{i(φ_i - φ_j)}) sqrt(λ_i λ_j)` over [`gamma_pairs`].
pub fn gamma_from_phases(lambdas: &[f64], phases: &[f64]) -> Vec<C64> {
    gamma_pairs(lambdas.len())
        .into_iter()
        .map(|(i, j)| (linalg::ONE - C64::from_polar(1.0, phases[i] - phases[j])) * (lambdas[i] * lambdas[j]).sqrt())
        .collect()
}

/// Interleaves real and imaginary parts.
pub fn pack(gamma: &[C64]) -> Vec<f64> {
    gamma.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn unpack(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// Real linear system `M x = 0` for the packed `γ`, expressing that
/// `Σ_ij γ_ij O_ij` vanishes. Redundant entries (implied by Hermiticity and
/// by `Tr Q_ij = Tr R_ij = δ_ij`) are omitted, leaving `(d² - 1)²` rows.
#[derive(Clone, Debug)]
pub struct GammaLinearSystem {
    d: usize,
    lambdas: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    matrix: DMatrix<f64>,
}

pub fn assemble_linear_system(blocks: &OperatorBlocks) -> GammaLinearSystem {
    let d = blocks.local_dim();
    let n = blocks.terms();
    let pairs = gamma_pairs(n);
    let cols = 2 * pairs.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();

    // Entry (b k, b' l) of Σ_{i<j} γ O_ij + conj(γ) O_ij^†.
    let entry = |b: usize, bp: usize, k: usize, l: usize| {
        let mut re = vec![0.0; cols];
        let mut im = vec![0.0; cols];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let alpha = blocks.q(i, j)[(b, bp)] * blocks.r(i, j)[(k, l)];
            let beta = (blocks.q(i, j)[(bp, b)] * blocks.r(i, j)[(l, k)]).conj();
            re[2 * p] = alpha.re + beta.re;
            re[2 * p + 1] = -alpha.im + beta.im;
            im[2 * p] = alpha.im + beta.im;
            im[2 * p + 1] = alpha.re - beta.re;
        }
        (re, im)
    };

    for b in 0..d {
        for bp in b..d {
            if b == bp && b == d - 1 {
                continue;
            }
            for k in 0..d {
                for l in 0..d {
                    if k == d - 1 && l == d - 1 {
                        continue;
                    }
                    if b == bp && l < k {
                        continue;
                    }
                    let (re, im) = entry(b, bp, k, l);
                    rows.push(re);
                    if !(b == bp && k == l) {
                        rows.push(im);
                    }
                }
            }
        }
    }
    let matrix = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    GammaLinearSystem { d, lambdas: blocks.lambdas().to_vec(), pairs, matrix }
}

impl GammaLinearSystem {
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    /// `||M x||`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (&self.matrix * nalgebra::DVector::from_column_slice(x)).norm()
    }

    /// Residual of the `γ` induced by a phase vector. Zero for equal phases;
    /// for a generic state, non-zero otherwise.
    pub fn phase_residual(&self, phases: &[f64]) -> f64 {
        self.residual(&pack(&gamma_from_phases(&self.lambdas, phases)))
    }
}

/// Orthonormal real kernel basis of a [`GammaLinearSystem`].
#[derive(Clone, Debug)]
pub struct NullspaceBasis {
    pub basis: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rel_tol: f64,
}

impl NullspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Kernel vector `a` as complex `γ` over the pairs.
    pub fn complex_vector(&self, a: usize) -> Vec<C64> {
        unpack(self.basis.column(a).as_slice())
    }
}

/// Kernel via SVD with threshold `rel_tol × σ_max`.
pub fn solve_nullspace(sys: &GammaLinearSystem, rel_tol: f64) -> NullspaceBasis {
    let (basis, singular_values) = linalg::real_kernel(sys.matrix(), rel_tol);
    NullspaceBasis { basis, singular_values, rel_tol }
}
