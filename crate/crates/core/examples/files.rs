//! Saving and loading constellation files.

use cauchy_constellations::catalog::catalog_get;
use cauchy_constellations::io::{constellation_to_string, load_constellation, save_constellation};

fn main() -> cauchy_constellations::Result<()> {
    let c = catalog_get("rect4")?.constellation.with_priors(vec![0.4, 0.1, 0.4, 0.1])?;
    print!("{}", constellation_to_string(&c, Some("rect4-weighted")));
    let path = std::env::temp_dir().join("rect4-weighted.json");
    save_constellation(&path, &c, Some("rect4-weighted"))?;
    let (name, back) = load_constellation(&path)?;
    println!("reloaded {:?}, identical: {}", name, back == c);
    Ok(())
}
