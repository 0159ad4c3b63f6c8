//! Look for distinct pure states sharing a set of two-body marginals.
//! Usage: `survey [CONFIG] [STATES] [RESTARTS]`.

use marginal_udp::search::{survey, SearchOptions};
use marginal_udp::states::parse_config;

fn main() -> marginal_udp::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let config = parse_config(args.get(1).map_or("AB,AC,AD", String::as_str))?;
    let states = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);
    let restarts = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(20);

    let table = survey(&config, states, restarts, 0, &SearchOptions::default())?;
    table.write_csv(std::io::stdout())?;
    eprintln!("{}/{} rows with a distinct compatible state", table.distinct_count(), table.rows.len());
    Ok(())
}
