use rand::Rng;

use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::sampling::haar_unitary;
use crate::states::{fidelity, schmidt_decompose, PureState, SubsystemSet};

/// A state rotated on one party, which keeps every marginal not involving
/// that party.
#[derive(Clone, Debug)]
pub struct Fig2aWitness {
    pub witness: PureState,
    pub unitary: CMatrix,
    pub fidelity: f64,
    /// Largest elementwise deviation over the marginals of party pairs not
    /// containing the rotated party.
    pub max_marginal_deviation: f64,
    /// The rotated party is in a product with the rest (Schmidt rank 1), so
    /// no rotation yields a genuinely different entangled configuration.
    pub product_across: bool,
}

/// Applies `unitary` to `party` and reports the witness data.
pub fn fig2a_witness_with(state: &PureState, party: &str, unitary: &CMatrix) -> Result<Fig2aWitness> {
    let witness = state.apply_local_unitaries(&[(party, unitary)])?;
    let mut max_dev: f64 = 0.0;
    let others: Vec<String> = state.labels().iter().filter(|l| *l != party).cloned().collect();
    for i in 0..others.len() {
        for j in i + 1..others.len() {
            let set = SubsystemSet::new([others[i].clone(), others[j].clone()])?;
            let a = state.partial_trace(&set)?;
            let b = witness.partial_trace(&set)?;
            max_dev = max_dev.max(linalg::max_abs(&(a.matrix() - b.matrix())));
        }
    }
    let one = SubsystemSet::new([party.to_string()])?;
    let rest = SubsystemSet::new(others)?;
    let product_across = schmidt_decompose(state, &rest, &one)?.rank() == 1;
    Ok(Fig2aWitness {
        fidelity: fidelity(state, &witness)?,
        witness,
        unitary: unitary.clone(),
        max_marginal_deviation: max_dev,
        product_across,
    })
}

/// Haar-random unitary on party `D`.
pub fn fig2a_witness<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> Result<Fig2aWitness> {
    let p = state.position("D")?;
    let u = haar_unitary(state.dims()[p], rng)?;
    fig2a_witness_with(state, "D", &u)
}
