//! Sample a four-qubit state, take marginals and a Schmidt decomposition.

use marginal_udp::sampling::{genericity_check, haar_state, RandomSource, DEFAULT_GAP_TOL};
use marginal_udp::states::{marginal_set, parse_config, schmidt_decompose};

fn main() -> marginal_udp::Result<()> {
    let psi = haar_state(&[2; 4], &mut RandomSource::new(1, 0))?;
    println!("{}", psi.to_json());

    let config = parse_config("AB,CD,BD")?;
    for (set, rho) in marginal_set(&psi, &config)?.entries() {
        println!("rho_{set}: trace {:.12}, purity {:.6}", rho.trace(), rho.purity());
    }

    let sd = schmidt_decompose(&psi, &"AB".parse()?, &"CD".parse()?)?;
    println!("Schmidt coefficients AB|CD: {:?}", sd.coefficients());
    let g = genericity_check(&sd, DEFAULT_GAP_TOL);
    println!("generic: {} (min gap {:.3e})", g.is_generic, g.min_pairwise_gap);
    Ok(())
}
