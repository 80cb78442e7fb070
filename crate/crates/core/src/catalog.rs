//! Built-in reference constellations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Constellation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    #[serde(skip)]
    pub constellation: Constellation,
    pub provenance: &'static str,
}

pub const NAMES: [&str; 6] = ["asym4", "qam4", "pentagon5", "cross5", "rect4", "kite4"];

pub fn catalog_get(name: &str) -> Result<CatalogEntry> {
    let (points, labels, provenance): (Vec<[f64; 2]>, [&str; 5], &'static str) = match name {
        "asym4" => (
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
            ["P1", "P2", "P3", "P4", ""],
            "asymmetric four-point set; P1 sits on the hull boundary and collapses at large noise",
        ),
        "qam4" => (
            vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]],
            ["Q1", "Q2", "Q3", "Q4", ""],
            "standard 4QAM square, fully symmetric",
        ),
        "pentagon5" => {
            let pts = (0..5)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / 5.0;
                    [t.cos(), t.sin()]
                })
                .collect();
            (pts, ["V1", "V2", "V3", "V4", "V5"], "regular pentagon on the unit circle, average power 1")
        }
        "cross5" => {
            let r = 1.25f64.sqrt();
            (
                vec![[0.0, 0.0], [r, 0.0], [-r, 0.0], [0.0, r], [0.0, -r]],
                ["C", "E", "W", "N", "S"],
                "cross with a center point, average power 1",
            )
        }
        "rect4" => {
            let h = 0.375f64.sqrt();
            (
                vec![[0.5, h], [-0.5, h], [-0.5, -h], [0.5, -h]],
                ["R1", "R2", "R3", "R4", ""],
                "rectangle with unit minimum distance, average power 5/8",
            )
        }
        "kite4" => (
            vec![[0.0, 1.0], [0.5, 0.0], [0.0, -1.0], [-0.5, 0.0]],
            ["K1", "K2", "K3", "K4", ""],
            "kite with unit minimum distance, average power 5/8",
        ),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    let m = points.len();
    let constellation = Constellation::new(points.into_iter().map(|p| p.to_vec()))?
        .with_labels(labels[..m].iter().map(|s| s.to_string()).collect())?;
    let name = NAMES.iter().copied().find(|n| *n == name).expect("listed");
    Ok(CatalogEntry { name, constellation, provenance })
}

pub fn catalog() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| catalog_get(n).expect("built-in entries are valid")).collect()
}
