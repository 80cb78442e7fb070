//! Union bound and its small-noise asymptote for asym4.

use cauchy_constellations::bounds::bound_report;
use cauchy_constellations::catalog::catalog_get;

fn main() -> cauchy_constellations::Result<()> {
    let c = catalog_get("asym4")?.constellation;
    println!("{:>8} {:>12} {:>12}", "gamma", "union", "asymptotic");
    for gamma in [0.001, 0.01, 0.03, 0.1, 0.3, 1.0] {
        let b = bound_report(&c, gamma)?;
        println!("{gamma:>8} {:>12.6e} {:>12.6e}", b.avg_exact_bound, b.avg_asymptotic.value);
    }
    let b = bound_report(&c, 0.01)?;
    for (i, a) in b.per_symbol_asymptotic.iter().enumerate() {
        println!("{}: coefficient {:.12}", c.label(i), a.coefficient);
    }
    Ok(())
}
