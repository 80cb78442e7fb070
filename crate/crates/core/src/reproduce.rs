//! Data behind the reference validation and design-comparison plots.
//!
//! Each experiment runs seeded Monte Carlo sweeps on a fixed noise grid and
//! produces one CSV table per plot panel. Numbers are written with 17
//! significant digits, so a fixed seed gives byte-identical files.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    asymptotic_coefficient_average, asymptotic_coefficient_symbol, burden_max, union_bound_average, union_bound_symbol,
};
use crate::catalog::catalog_get;
use crate::descriptors::report;
use crate::detector::{sweep, McConfig, SweepPoint};
use crate::error::{Error, Result};
use crate::geometry::Constellation;
use crate::io::fmt_f64;

pub const SMALL_NOISE_GRID: [f64; 9] = [0.01, 0.012, 0.015, 0.02, 0.03, 0.04, 0.06, 0.08, 0.12];
pub const LARGE_NOISE_GRID: [f64; 13] = [0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0];
pub const PENTAGON_CROSS_GRID: [f64; 12] = [0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0];
pub const RECT_KITE_GRID: [f64; 9] = SMALL_NOISE_GRID;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// asym4 error probability against the union bound and its small-noise
    /// asymptote.
    SmallNoise,
    /// asym4 correct-decision probability against the angular limits.
    LargeNoise,
    /// pentagon5 vs cross5 correct-decision probability.
    PentagonCross,
    /// rect4 vs kite4 error probability with burden surrogates.
    RectKite,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::SmallNoise, Experiment::LargeNoise, Experiment::PentagonCross, Experiment::RectKite];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SmallNoise => "small-noise",
            Experiment::LargeNoise => "large-noise",
            Experiment::PentagonCross => "pentagon-cross",
            Experiment::RectKite => "rect-kite",
        }
    }

    pub fn grid(self) -> &'static [f64] {
        match self {
            Experiment::SmallNoise => &SMALL_NOISE_GRID,
            Experiment::LargeNoise => &LARGE_NOISE_GRID,
            Experiment::PentagonCross => &PENTAGON_CROSS_GRID,
            Experiment::RectKite => &RECT_KITE_GRID,
        }
    }

    pub fn constellations(self) -> &'static [&'static str] {
        match self {
            Experiment::SmallNoise | Experiment::LargeNoise => &["asym4"],
            Experiment::PentagonCross => &["pentagon5", "cross5"],
            Experiment::RectKite => &["rect4", "kite4"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// One CSV panel: a header row and numeric rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    pub file_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedSweep {
    pub constellation: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reproduction {
    pub experiment: Experiment,
    pub sweeps: Vec<NamedSweep>,
    pub panels: Vec<Panel>,
}

impl Reproduction {
    pub fn sweep(&self, name: &str) -> Option<&[SweepPoint]> {
        self.sweeps.iter().find(|s| s.constellation == name).map(|s| s.points.as_slice())
    }

    pub fn panel(&self, file_name: &str) -> Option<&Panel> {
        self.panels.iter().find(|p| p.file_name == file_name)
    }

    /// Writes every panel under `dir` and returns the paths written.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.panels
            .iter()
            .map(|p| {
                let path = dir.join(&p.file_name);
                std::fs::write(&path, p.to_csv())?;
                Ok(path)
            })
            .collect()
    }
}

pub fn reproduce(experiment: Experiment, cfg: &McConfig) -> Result<Reproduction> {
    let mut named = Vec::new();
    for name in experiment.constellations() {
        let c = catalog_get(name)?.constellation;
        let points = sweep(&c, experiment.grid(), cfg)?;
        named.push((c, NamedSweep { constellation: name.to_string(), points }));
    }
    let panels = match experiment {
        Experiment::SmallNoise => small_noise_panels(&named[0].0, &named[0].1.points)?,
        Experiment::LargeNoise => large_noise_panels(&named[0].0, &named[0].1.points)?,
        Experiment::PentagonCross => pentagon_cross_panels(&named)?,
        Experiment::RectKite => rect_kite_panels(&named)?,
    };
    Ok(Reproduction { experiment, sweeps: named.into_iter().map(|(_, s)| s).collect(), panels })
}

fn small_noise_panels(c: &Constellation, points: &[SweepPoint]) -> Result<Vec<Panel>> {
    let avg_coef = asymptotic_coefficient_average(c)?;
    let mut avg = Vec::new();
    let mut per = Vec::new();
    for p in points {
        let e = &p.estimate;
        avg.push(vec![
            p.gamma,
            e.avg_error,
            e.ci95_halfwidth.avg,
            union_bound_average(c, p.gamma)?,
            avg_coef * p.gamma,
        ]);
        let mut row = vec![p.gamma];
        for i in 0..c.len() {
            row.extend([
                e.per_symbol_error[i],
                e.ci95_halfwidth.per_symbol[i],
                union_bound_symbol(c, i, p.gamma)?,
                asymptotic_coefficient_symbol(c, i)? * p.gamma,
            ]);
        }
        per.push(row);
    }
    Ok(vec![
        Panel {
            file_name: "small_noise_avg.csv".into(),
            columns: cols(&["gamma", "mc_avg_err", "ci", "union_bound", "asymptotic"]),
            rows: avg,
        },
        Panel {
            file_name: "small_noise_symbol.csv".into(),
            columns: symbol_cols(c, &["mc_err", "ci", "union_bound", "asymptotic"]),
            rows: per,
        },
    ])
}

fn large_noise_panels(c: &Constellation, points: &[SweepPoint]) -> Result<Vec<Panel>> {
    let r = report(c)?;
    let mut avg = Vec::new();
    let mut per = Vec::new();
    for p in points {
        let e = &p.estimate;
        avg.push(vec![p.gamma, e.avg_correct, e.ci95_halfwidth.avg, r.avg_large_noise_correct_limit]);
        let mut row = vec![p.gamma];
        for i in 0..c.len() {
            row.extend([e.per_symbol_correct[i], e.ci95_halfwidth.per_symbol[i], r.large_noise_correct_limit[i]]);
        }
        per.push(row);
    }
    Ok(vec![
        Panel {
            file_name: "large_noise_avg.csv".into(),
            columns: cols(&["gamma", "mc_avg_correct", "ci", "limit"]),
            rows: avg,
        },
        Panel {
            file_name: "large_noise_symbol.csv".into(),
            columns: symbol_cols(c, &["mc_correct", "ci", "limit"]),
            rows: per,
        },
    ])
}

fn pentagon_cross_panels(named: &[(Constellation, NamedSweep)]) -> Result<Vec<Panel>> {
    let reports = named.iter().map(|(c, _)| report(c)).collect::<Result<Vec<_>>>()?;
    let grid = &named[0].1.points;
    let mut avg = Vec::new();
    let mut worst = Vec::new();
    for (g, point) in grid.iter().enumerate() {
        let mut a = vec![point.gamma];
        let mut w = vec![point.gamma];
        for ((_, s), r) in named.iter().zip(&reports) {
            let e = &s.points[g].estimate;
            a.extend([e.avg_correct, e.ci95_halfwidth.avg, r.avg_large_noise_correct_limit]);
            w.extend([e.worst_symbol_correct(), e.worst_symbol_halfwidth(), r.a_min]);
        }
        avg.push(a);
        worst.push(w);
    }
    Ok(vec![
        Panel {
            file_name: "pentagon_cross_avg.csv".into(),
            columns: pair_cols(named, &["avg_correct", "ci", "limit"]),
            rows: avg,
        },
        Panel {
            file_name: "pentagon_cross_worst.csv".into(),
            columns: pair_cols(named, &["worst_correct", "ci", "limit"]),
            rows: worst,
        },
    ])
}

fn rect_kite_panels(named: &[(Constellation, NamedSweep)]) -> Result<Vec<Panel>> {
    let b_max = named.iter().map(|(c, _)| burden_max(c)).collect::<Result<Vec<_>>>()?;
    let grid = &named[0].1.points;
    let mut avg = Vec::new();
    let mut worst = Vec::new();
    for (g, point) in grid.iter().enumerate() {
        let gamma = point.gamma;
        let mut a = vec![gamma];
        let mut w = vec![gamma];
        for ((c, s), b) in named.iter().zip(&b_max) {
            let e = &s.points[g].estimate;
            a.extend([e.avg_error, e.ci95_halfwidth.avg, union_bound_average(c, gamma)?]);
            w.extend([e.worst_symbol_error(), e.worst_symbol_halfwidth(), 2.0 * gamma / PI * b]);
        }
        avg.push(a);
        worst.push(w);
    }
    Ok(vec![
        Panel {
            file_name: "rect_kite_avg.csv".into(),
            columns: pair_cols(named, &["avg_err", "ci", "union_bound"]),
            rows: avg,
        },
        Panel {
            file_name: "rect_kite_worst.csv".into(),
            columns: pair_cols(named, &["worst_err", "ci", "surrogate"]),
            rows: worst,
        },
    ])
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn symbol_cols(c: &Constellation, fields: &[&str]) -> Vec<String> {
    let mut out = vec!["gamma".to_string()];
    for i in 0..c.len() {
        let l = c.label(i);
        out.extend(fields.iter().map(|f| format!("{f}_{l}")));
    }
    out
}

fn pair_cols(named: &[(Constellation, NamedSweep)], fields: &[&str]) -> Vec<String> {
    let mut out = vec!["gamma".to_string()];
    for (_, s) in named {
        out.extend(fields.iter().map(|f| format!("{}_{f}", s.constellation)));
    }
    out
}
