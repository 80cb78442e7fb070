//! Seeded Monte Carlo error rates for asym4 in both noise regimes.
//!
//! `cargo run --release --example monte_carlo -- 200000`

use cauchy_constellations::bounds::union_bound_average;
use cauchy_constellations::catalog::catalog_get;
use cauchy_constellations::descriptors::report;
use cauchy_constellations::detector::{sweep, McConfig};

fn main() -> cauchy_constellations::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let cfg = McConfig::new(n, 50_000, 2026);
    let c = catalog_get("asym4")?.constellation;

    println!("small noise: MC error vs union bound");
    for p in sweep(&c, &[0.01, 0.02, 0.04], &cfg)? {
        let e = &p.estimate;
        println!(
            "  gamma {:<5} error {:.5} ± {:.5}  bound {:.5}",
            p.gamma,
            e.avg_error,
            e.ci95_halfwidth.avg,
            union_bound_average(&c, p.gamma)?
        );
    }

    let limits = report(&c)?.large_noise_correct_limit;
    println!("large noise: per-symbol correct-decision probability vs limit");
    for p in sweep(&c, &[3.0, 30.0], &cfg)? {
        let e = &p.estimate;
        for (i, limit) in limits.iter().enumerate() {
            println!("  gamma {:<4} {} {:.4} (limit {limit:.4})", p.gamma, c.label(i), e.per_symbol_correct[i]);
        }
    }
    Ok(())
}
