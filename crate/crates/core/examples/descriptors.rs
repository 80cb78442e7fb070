//! Angular robustness, burdens, and collapse flags of the catalog entries.

use cauchy_constellations::catalog::catalog;
use cauchy_constellations::descriptors::report;

fn main() -> cauchy_constellations::Result<()> {
    for entry in catalog() {
        let r = report(&entry.constellation)?;
        println!("{} ({})", entry.name, entry.provenance);
        for i in 0..r.len() {
            let flag = if r.collapse[i] { "  collapse" } else { "" };
            println!("  {:<3} A = {:.6}  B = {:.6}{flag}", r.labels[i], r.a_i[i], r.b_i[i]);
        }
        println!("  A_min = {:.6}  B_max = {:.6}  sqrt(P) B_max = {:.6}", r.a_min, r.b_max, r.normalized_b_max);
    }
    Ok(())
}
