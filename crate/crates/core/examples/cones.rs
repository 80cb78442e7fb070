//! Recession-cone patches and hull classification of a planar set.

use cauchy_constellations::catalog::catalog_get;
use cauchy_constellations::geometry::{angular_patch_2d, cone_contains, hull_classify, Constellation};

fn main() -> cauchy_constellations::Result<()> {
    let asym = catalog_get("asym4")?.constellation;
    let hull = hull_classify(&asym)?;
    for i in 0..asym.len() {
        let p = angular_patch_2d(&asym, i)?;
        println!(
            "{}: {:?} start {:.4} length {:.4} fraction {:.4}  hull {:?}",
            asym.label(i),
            p.kind,
            p.start_angle,
            p.arc_length,
            p.fraction(),
            hull.tags[i]
        );
    }
    println!("(-1, 0) in cone of P3: {}", cone_contains(&asym, 2, &[-1.0, 0.0])?);

    let line = Constellation::new([vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]])?;
    let mid = angular_patch_2d(&line, 1)?;
    println!("middle of a line: {:?} rays {:.4} and {:?}", mid.kind, mid.start_angle, mid.second_ray);
    Ok(())
}
