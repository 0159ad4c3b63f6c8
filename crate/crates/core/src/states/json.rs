//! JSON state format:
//! `{"labels":["A","B","C","D"],"dims":[2,2,2,2],"re":[...],"im":[...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::linalg::{self, CMatrix, C64};

use super::{DensityOperator, MarginalSet, PureState};

/// Largest squared-norm deviation the reader accepts without `renormalize`.
pub const READ_NORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        StateJson {
            labels: s.labels().to_vec(),
            dims: s.dims().to_vec(),
            re: s.amplitudes().iter().map(|z| z.re).collect(),
            im: s.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl StateJson {
    /// Converts to a state. Inputs whose norm deviates from one by more than
    /// [`READ_NORM_TOL`] are rejected unless `renormalize` is set; accepted
    /// inputs are rescaled to unit norm unless already within [`super::NORM_TOL`].
    pub fn into_state(self, renormalize: bool) -> Result<PureState> {
        if self.re.len() != self.im.len() {
            return arg("`re` and `im` differ in length");
        }
        let amps: Vec<C64> = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        let n = linalg::norm_sqr(&amps).sqrt();
        if !renormalize && (n - 1.0).abs() > READ_NORM_TOL {
            return arg(format!("state norm {n} deviates from 1; pass --renormalize to accept"));
        }
        if ((n * n) - 1.0).abs() <= super::NORM_TOL {
            // Already unit norm: keep the amplitudes bit for bit.
            return PureState::new(self.labels, self.dims, amps);
        }
        PureState::normalized(self.labels, self.dims, amps)
    }
}

impl PureState {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateJson::from(self)).expect("state serializes")
    }

    pub fn from_json(s: &str, renormalize: bool) -> Result<Self> {
        serde_json::from_str::<StateJson>(s)?.into_state(renormalize)
    }
}

/// A density operator as nested row arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityOperator> for MarginalJson {
    fn from(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
        MarginalJson { labels: rho.labels().to_vec(), dims: rho.dims().to_vec(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl MarginalJson {
    pub fn into_density(self) -> Result<DensityOperator> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return arg("marginal matrix must be square");
        }
        let m = CMatrix::from_fn(n, n, |r, c| C64::new(self.re[r][c], self.im[r][c]));
        DensityOperator::new(self.labels, self.dims, m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalSetJson {
    pub marginals: Vec<MarginalJson>,
}

impl From<&MarginalSet> for MarginalSetJson {
    fn from(m: &MarginalSet) -> Self {
        MarginalSetJson { marginals: m.entries().iter().map(|(_, r)| r.into()).collect() }
    }
}
