use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Split};
use crate::states::{SchmidtDecomposition, SubsystemSet};

/// `Q_ij` and `R_ij`: partial traces of `|i><j|` on each Schmidt side,
/// keeping the party that belongs to the third marginal.
#[derive(Clone, Debug)]
pub struct OperatorBlocks {
    d: usize,
    n: usize,
    lambdas: Vec<f64>,
    left_keep: usize,
    right_keep: usize,
    /// Kept left party comes first in the parent ordering.
    left_first: bool,
    q: Vec<CMatrix>,
    r: Vec<CMatrix>,
}

fn side_blocks(basis: &CMatrix, d: usize, keep: usize) -> Vec<CMatrix> {
    let n = d * d;
    let split = Split::new(&[d, d], &[keep]);
    let cols: Vec<Vec<_>> = (0..n).map(|i| basis.column(i).iter().copied().collect()).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(split.trace_outer(&cols[i], &cols[j]));
        }
    }
    out
}

impl OperatorBlocks {
    /// Builds the blocks for a two-versus-two decomposition and a third pair
    /// taking one party from each side.
    pub fn build(sd: &SchmidtDecomposition, third_pair: &SubsystemSet) -> Result<Self> {
        let (left, right) = (sd.left(), sd.right());
        let dims = sd.parent_dims();
        if left.len() != 2 || right.len() != 2 || dims.len() != 4 || dims.iter().any(|&x| x != dims[0]) {
            return Err(Error::UnsupportedConfig("blocks need four parties of equal dimension split two|two".into()));
        }
        let d = dims[0];
        let n = d * d;
        let on = |side: &SubsystemSet| -> Vec<usize> {
            (0..2).filter(|&k| third_pair.contains(&side.labels()[k])).collect()
        };
        let (lk, rk) = (on(left), on(right));
        if third_pair.len() != 2 || lk.len() != 1 || rk.len() != 1 {
            return Err(Error::UnsupportedConfig(format!(
                "third pair {third_pair} must take one party from {left} and one from {right}"
            )));
        }
        if sd.rank() < n {
            return Err(Error::NotGeneric(format!("Schmidt rank {} < {n}", sd.rank())));
        }
        let pos = |l: &str| sd.parent_labels().iter().position(|p| p == l).unwrap();
        let left_first = pos(&left.labels()[lk[0]]) < pos(&right.labels()[rk[0]]);
        Ok(OperatorBlocks {
            d,
            n,
            lambdas: sd.coefficients().to_vec(),
            left_keep: lk[0],
            right_keep: rk[0],
            left_first,
            q: side_blocks(sd.left_basis(), d, lk[0]),
            r: side_blocks(sd.right_basis(), d, rk[0]),
        })
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// Schmidt rank `d²`.
    pub fn terms(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Index (0 or 1) of the kept party within each Schmidt side.
    pub fn kept(&self) -> (usize, usize) {
        (self.left_keep, self.right_keep)
    }

    pub fn q(&self, i: usize, j: usize) -> &CMatrix {
        &self.q[i * self.n + j]
    }

    pub fn r(&self, i: usize, j: usize) -> &CMatrix {
        &self.r[i * self.n + j]
    }

    /// `O_ij` with tensor factors in the parent ordering of the third pair,
    /// so that `ρ_X = Σ_ij sqrt(λ_i λ_j) O_ij`.
    pub fn o(&self, i: usize, j: usize) -> CMatrix {
        if self.left_first {
            self.q(i, j).kronecker(self.r(i, j))
        } else {
            self.r(i, j).kronecker(self.q(i, j))
        }
    }

    /// Dimension of the complex span of all `O_ij`.
    pub fn span_dim(&self, rel_tol: f64) -> usize {
        let side = self.d * self.d;
        let mut m = CMatrix::zeros(side * side, self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let o = self.o(i, j);
                m.column_mut(i * self.n + j).copy_from_slice(o.as_slice());
            }
        }
        linalg::numerical_rank(&linalg::singular_values(&m), rel_tol)
    }

    /// Largest deviation from `Tr Q_ij = δ_ij`, `Q_ij^† = Q_ji` (and the same
    /// for `R`).
    pub fn block_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for blocks in [&self.q, &self.r] {
            for i in 0..self.n {
                for j in 0..self.n {
                    let b = &blocks[i * self.n + j];
                    let delta = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((b.trace() - linalg::C64::new(delta, 0.0)).norm());
                    worst = worst.max(linalg::max_abs(&(b.adjoint() - &blocks[j * self.n + i])));
                }
            }
        }
        worst
    }
}
