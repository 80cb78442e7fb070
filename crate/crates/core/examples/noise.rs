//! Drawing isotropic Cauchy noise and checking its one-dimensional projection.

use cauchy_constellations::noise::{projection_ks, NoiseModel};
use cauchy_constellations::rng::RngStream;

fn main() -> cauchy_constellations::Result<()> {
    let model = NoiseModel::new(0.5, 3)?;
    println!("log normalizer {:.12}", model.log_normalizer());
    for draw in model.sampler(RngStream::new(2026, 0)).take(3) {
        println!("draw {draw:?}  log density {:.6}", model.log_density(&draw)?);
    }
    let u = [0.6, 0.0, 0.8];
    let ks = projection_ks(&model, &u, 100_000, RngStream::new(2026, 1))?;
    println!("KS distance of u·N against Cauchy(0, 0.5): {ks:.5}");
    Ok(())
}
