//! Writes the validation and comparison CSV tables.
//!
//! `cargo run --release --example reproduce -- out-dir 500000`

use cauchy_constellations::detector::McConfig;
use cauchy_constellations::reproduce::{reproduce, Experiment};

fn main() -> cauchy_constellations::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "ccl-reproduce".into());
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(50_000);
    let cfg = McConfig { n_samples: n, ..McConfig::default() };
    for e in Experiment::ALL {
        let r = reproduce(e, &cfg)?;
        for path in r.write_csv(&dir)? {
            println!("{e}: {}", path.display());
        }
    }
    Ok(())
}
