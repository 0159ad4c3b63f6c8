//! Certify that a random two-qubit-per-side state is the only pure state
//! with its `AB`, `CD` and `BD` marginals. Pass `3` for qutrits.

use marginal_udp::certifier::{certify_with, CertifyOptions};
use marginal_udp::sampling::{haar_state, RandomSource};
use marginal_udp::states::parse_config;

fn main() -> marginal_udp::Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let seed = 7;
    let psi = haar_state(&[d; 4], &mut RandomSource::new(seed, 0))?;
    let opts = CertifyOptions { seed, ..CertifyOptions::default() };
    let cert = certify_with(&psi, &parse_config("AB,CD,BD")?, &opts)?;

    println!("verdict        {}", cert.verdict);
    println!("span dim       {:?}", cert.span_dim);
    println!("system shape   {:?}", cert.system_shape);
    println!("kernel dim     {:?}", cert.nullspace_dim);
    if let Some(o) = &cert.oracle {
        println!("oracle         residual {:.2e}, spread {:.2e}", o.residual, o.distance_from_equal);
    }
    Ok(())
}
