use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, Split, C64};

use super::{PureState, SubsystemSet};

/// Singular values below this fraction of the largest count as zero.
pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

/// `|ψ> = Σ_i sqrt(λ_i) |i>_left ⊗ |i>_right` with decreasing `λ_i`.
///
/// Basis columns are written in the computational basis of the left (right)
/// block, whose parties appear in parent order. Phase convention: the first
/// entry of largest magnitude of each left column is real and non-negative;
/// the matching right column absorbs the compensating phase.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    parent_labels: Vec<String>,
    parent_dims: Vec<usize>,
    left: SubsystemSet,
    right: SubsystemSet,
    left_positions: Vec<usize>,
    coefficients: Vec<f64>,
    left_basis: CMatrix,
    right_basis: CMatrix,
}

fn block_set(labels: &[String], pos: &[usize]) -> SubsystemSet {
    SubsystemSet { labels: pos.iter().map(|&p| labels[p].clone()).collect() }
}

/// Decomposes `state` along `left | right`, which must partition its labels.
pub fn schmidt_decompose(
    state: &PureState,
    left: &SubsystemSet,
    right: &SubsystemSet,
) -> Result<SchmidtDecomposition> {
    let lp = state.positions(left)?;
    let rp = state.positions(right)?;
    if !left.is_disjoint(right) || lp.len() + rp.len() != state.party_count() {
        return arg(format!("{left}|{right} is not a bipartition of the state"));
    }
    let m = Split::new(state.dims(), &lp).reshape(state.amplitudes());
    let (u, s, v) = linalg::svd_desc(&m);
    let lambdas: Vec<f64> = s.iter().map(|x| x * x).collect();
    // M = Σ σ_i u_i v_i^†, so the right Schmidt vector is conj(v_i).
    let right_basis = v.map(|z| z.conj());
    SchmidtDecomposition::from_parts(state, &lp, lambdas, u, right_basis)
}

impl SchmidtDecomposition {
    /// Assembles a decomposition of a state over `state`'s parties from given
    /// coefficients and bases, applying the phase convention. Coefficients
    /// must be decreasing.
    pub(crate) fn from_parts(
        state: &PureState,
        left_positions: &[usize],
        coefficients: Vec<f64>,
        mut left_basis: CMatrix,
        mut right_basis: CMatrix,
    ) -> Result<Self> {
        if coefficients.windows(2).any(|w| w[0] < w[1]) {
            return arg("Schmidt coefficients must be decreasing");
        }
        let right_positions: Vec<usize> =
            (0..state.party_count()).filter(|p| !left_positions.contains(p)).collect();
        for i in 0..left_basis.ncols() {
            let col = left_basis.column(i);
            let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if max == 0.0 {
                continue;
            }
            let pivot = col.iter().position(|z| z.norm() == max).unwrap();
            let phase = col[pivot] / max;
            for z in left_basis.column_mut(i).iter_mut() {
                *z *= phase.conj();
            }
            for z in right_basis.column_mut(i).iter_mut() {
                *z *= phase;
            }
        }
        Ok(SchmidtDecomposition {
            parent_labels: state.labels().to_vec(),
            parent_dims: state.dims().to_vec(),
            left: block_set(state.labels(), left_positions),
            right: block_set(state.labels(), &right_positions),
            left_positions: left_positions.to_vec(),
            coefficients,
            left_basis,
            right_basis,
        })
    }

    pub fn left(&self) -> &SubsystemSet {
        &self.left
    }

    pub fn right(&self) -> &SubsystemSet {
        &self.right
    }

    pub fn parent_labels(&self) -> &[String] {
        &self.parent_labels
    }

    pub fn parent_dims(&self) -> &[usize] {
        &self.parent_dims
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_basis(&self) -> &CMatrix {
        &self.left_basis
    }

    pub fn right_basis(&self) -> &CMatrix {
        &self.right_basis
    }

    /// Number of coefficients whose singular value exceeds
    /// [`SCHMIDT_RANK_TOL`] times the largest.
    pub fn rank(&self) -> usize {
        let sv: Vec<f64> = self.coefficients.iter().map(|l| l.max(0.0).sqrt()).collect();
        linalg::numerical_rank(&sv, SCHMIDT_RANK_TOL)
    }

    /// `Σ_i e^{iφ_i} sqrt(λ_i) |i>|i>`; missing trailing phases count as zero.
    pub fn phased_state(&self, phases: &[f64]) -> PureState {
        let k = self.coefficients.len();
        let weights: Vec<C64> = (0..k)
            .map(|i| C64::from_polar(self.coefficients[i].max(0.0).sqrt(), phases.get(i).copied().unwrap_or(0.0)))
            .collect();
        let m = &self.left_basis * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(weights)) * self.right_basis.transpose();
        let amps = Split::new(&self.parent_dims, &self.left_positions).flatten(&m);
        PureState::from_parts(self.parent_labels.clone(), self.parent_dims.clone(), amps)
    }

    /// The state the decomposition describes.
    pub fn reconstruct(&self) -> PureState {
        self.phased_state(&[])
    }

    /// Amplitudes of `|i>_left ⊗ |j>_right` embedded in the parent ordering.
    pub fn product_vector(&self, i: usize, j: usize) -> Vec<C64> {
        let m = self.left_basis.column(i) * self.right_basis.column(j).transpose();
        Split::new(&self.parent_dims, &self.left_positions).flatten(&m)
    }

    /// Positions (in the parent) of the left block.
    pub fn left_positions(&self) -> &[usize] {
        &self.left_positions
    }
}
