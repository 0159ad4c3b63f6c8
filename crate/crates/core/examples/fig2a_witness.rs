//! A unitary on `D` changes the state but keeps `ρ_AB`, `ρ_AC`, `ρ_BC`.

use marginal_udp::sampling::{haar_state, RandomSource};
use marginal_udp::search::fig2a_witness;

fn main() -> marginal_udp::Result<()> {
    for seed in 0..5 {
        let psi = haar_state(&[2; 4], &mut RandomSource::new(seed, 0))?;
        let w = fig2a_witness(&psi, &mut RandomSource::new(seed, 1))?;
        println!("seed {seed}: fidelity {:.4}, marginal deviation {:.1e}", w.fidelity, w.max_marginal_deviation);
    }
    Ok(())
}
