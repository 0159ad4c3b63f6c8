//! Four-qubit states that share all two-body marginals with a different
//! state, and what the certifier says about them.

use marginal_udp::certifier::certify;
use marginal_udp::families::{default_verification, family_a, family_b};
use marginal_udp::states::parse_config;
use marginal_udp::C64;

fn main() -> marginal_udp::Result<()> {
    for row in default_verification(20)? {
        println!("{:<10} {:<60} dev {:.1e}  min fidelity {:.4}", row.family, row.parameters, row.max_deviation, row.min_fidelity);
    }

    let config = parse_config("AB,CD,BD")?;
    let t = 1.0 / 3f64.sqrt();
    for (name, psi) in [("A", family_a(t, t, C64::new(t, 0.0), 0.7)?), ("B", family_b(0.4))] {
        let cert = certify(&psi, &config)?;
        let fid = cert.witness.as_ref().map(|w| w.fidelity);
        println!("family {name}: {} (witness fidelity {fid:?})", cert.verdict);
    }
    Ok(())
}
