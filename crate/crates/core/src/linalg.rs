//! Dense complex linear algebra shared by every module.
//!
//! Amplitude vectors follow one index convention: the flat index is the
//! lexicographic multi-index over subsystems with the last subsystem varying
//! fastest. All reshaping below derives from that convention.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Strides of a row-major multi-index (last axis fastest).
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Precomputed map from flat amplitude index to `(row, col)` of the matrix
/// whose rows run over the `keep` subsystems (in the given order) and whose
/// columns run over the remaining subsystems (in parent order).
#[derive(Clone, Debug)]
pub struct Split {
    pub rows: usize,
    pub cols: usize,
    map: Vec<(usize, usize)>,
}

impl Split {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let st = strides(dims);
        let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
        let rows: usize = keep.iter().map(|&p| dims[p]).product();
        let cols: usize = rest.iter().map(|&p| dims[p]).product();
        let map = (0..total)
            .map(|flat| {
                let digit = |p: usize| (flat / st[p]) % dims[p];
                let row = keep.iter().fold(0, |acc, &p| acc * dims[p] + digit(p));
                let col = rest.iter().fold(0, |acc, &p| acc * dims[p] + digit(p));
                (row, col)
            })
            .collect();
        Split { rows, cols, map }
    }

    /// `(row, col)` of a flat amplitude index.
    pub fn index(&self, flat: usize) -> (usize, usize) {
        self.map[flat]
    }

    pub fn reshape(&self, amps: &[C64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (a, &(r, c)) in amps.iter().zip(&self.map) {
            m[(r, c)] = *a;
        }
        m
    }

    pub fn flatten(&self, m: &CMatrix) -> Vec<C64> {
        self.map.iter().map(|&(r, c)| m[(r, c)]).collect()
    }

    /// `Tr_rest |u><v|` as an operator on the kept subsystems.
    pub fn trace_outer(&self, u: &[C64], v: &[C64]) -> CMatrix {
        let mu = self.reshape(u);
        let mv = self.reshape(v);
        &mu * mv.adjoint()
    }

    /// `(op ⊗ 1_rest) |amps>`.
    pub fn apply(&self, op: &CMatrix, amps: &[C64]) -> Vec<C64> {
        self.flatten(&(op * self.reshape(amps)))
    }
}

/// Hermitian eigen-decomposition with eigenvalues in decreasing order.
pub fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Thin SVD `m = U diag(s) V^†` with singular values sorted decreasingly.
/// Returns `(U, s, V)`, `V` holding right singular vectors as columns.
pub fn svd_desc(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").adjoint();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    let v = CMatrix::from_fn(v.nrows(), k, |r, c| v[(r, order[c])]);
    (u, s, v)
}

/// Singular values of a complex matrix, decreasing.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values strictly above `rel_tol * s_max`.
pub fn numerical_rank(sv: &[f64], rel_tol: f64) -> usize {
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Real kernel of `m` from a full SVD.
///
/// A wide matrix is padded with zero rows so the SVD yields a complete set of
/// right singular vectors. Singular values `<= rel_tol * s_max` count as zero.
/// Returns the orthonormal kernel basis (as columns) and all singular values
/// in decreasing order (length = column count).
pub fn real_kernel(m: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, Vec<f64>) {
    let (rows, cols) = m.shape();
    let n = rows.max(cols);
    let mut padded = DMatrix::<f64>::zeros(n, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let max = sv.first().copied().unwrap_or(0.0);
    let kernel: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| max == 0.0 || svd.singular_values[i] <= rel_tol * max)
        .collect();
    let basis = DMatrix::from_fn(cols, kernel.len(), |r, c| v_t[(kernel[c], r)]);
    (basis, sv)
}

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |U^† U - 1|` elementwise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs(&(u.adjoint() * u - id))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `exp(i H)` for Hermitian `H`, via its eigen-decomposition.
pub fn expi_hermitian(h: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|t| C64::from_polar(1.0, t)));
    v * phases * v.adjoint()
}

/// Sum of `conj(a_k) b_k`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
