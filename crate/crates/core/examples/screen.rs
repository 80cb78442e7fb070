//! Two-stage design screen: reject collapsing candidates, rank the rest.

use cauchy_constellations::catalog::catalog_get;
use cauchy_constellations::descriptors::{screen, Candidate, PowerReference};

fn main() -> cauchy_constellations::Result<()> {
    let names = ["pentagon5", "cross5", "rect4", "kite4", "qam4"];
    let candidates = names
        .iter()
        .map(|n| Ok(Candidate::new(*n, catalog_get(n)?.constellation)))
        .collect::<cauchy_constellations::Result<Vec<_>>>()?;
    for lambda in [0.0, 0.5, 1.0] {
        let r = screen(&candidates, lambda, &PowerReference::Own)?;
        println!("lambda {lambda}{}", if r.unequal_power_warning { " (candidate powers differ)" } else { "" });
        for (k, c) in r.ranked.iter().enumerate() {
            println!("  {}. {:<10} J = {:+.6}", k + 1, c.id, c.j_lambda);
        }
        for c in &r.rejected {
            println!("  -- {:<10} {}", c.id, c.reason);
        }
    }
    Ok(())
}
