//! Small-noise union bounds and reciprocal-distance burdens.
//!
//! Each pairwise term is the exact probability that the projected noise
//! crosses the bisecting hyperplane between two symbols,
//! `1/2 − arctan(d_ij / 2γ)/π`. Summed over competitors it bounds the
//! conditional symbol error; its slope at `γ → 0` is `(2/π)·B_i` with
//! `B_i = Σ_{j≠i} 1/d_ij`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_spectrum, Constellation, DistanceSpectrum};

pub fn pairwise_error_term(distance: f64, gamma: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::NonpositiveInput { name: "distance", value: distance });
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::NonpositiveInput { name: "gamma", value: gamma });
    }
    Ok(term(distance, gamma))
}

#[inline]
fn term(distance: f64, gamma: f64) -> f64 {
    0.5 - (distance / (2.0 * gamma)).atan() / PI
}

fn spectrum_for_bounds(c: &Constellation) -> Result<DistanceSpectrum> {
    c.require_points(2)?;
    distance_spectrum(c)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveInput { name: "gamma", value: gamma })
    }
}

/// `Σ_{j≠i} [1/2 − arctan(d_ij/2γ)/π]`, reported unclamped.
pub fn union_bound_symbol(c: &Constellation, i: usize, gamma: f64) -> Result<f64> {
    c.check_index(i)?;
    check_gamma(gamma)?;
    let s = spectrum_for_bounds(c)?;
    Ok(s.row(i).map(|d| term(d, gamma)).sum())
}

/// Equiprobable average of the per-symbol bounds, computed as the pair sum
/// `(2/M) Σ_{i<j} term(d_ij, γ)`.
pub fn union_bound_average(c: &Constellation, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let s = spectrum_for_bounds(c)?;
    let pair_sum: f64 = s.entries.iter().map(|e| term(e.distance, gamma)).sum();
    Ok(2.0 * pair_sum / c.len() as f64)
}

/// Reciprocal-distance burden `B_i = Σ_{j≠i} 1/d_ij`.
pub fn burden(c: &Constellation, i: usize) -> Result<f64> {
    c.check_index(i)?;
    let s = spectrum_for_bounds(c)?;
    Ok(s.row(i).map(|d| 1.0 / d).sum())
}

pub fn burdens(c: &Constellation) -> Result<Vec<f64>> {
    let s = spectrum_for_bounds(c)?;
    Ok((0..c.len()).map(|i| s.row(i).map(|d| 1.0 / d).sum()).collect())
}

pub fn burden_max(c: &Constellation) -> Result<f64> {
    Ok(burdens(c)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Slope `(2/π) B_i` of the leading-order small-noise bound for symbol `i`.
pub fn asymptotic_coefficient_symbol(c: &Constellation, i: usize) -> Result<f64> {
    Ok(2.0 / PI * burden(c, i)?)
}

/// `(4/(Mπ)) Σ_{i<j} 1/d_ij`.
pub fn asymptotic_coefficient_average(c: &Constellation) -> Result<f64> {
    let s = spectrum_for_bounds(c)?;
    let recip: f64 = s.entries.iter().map(|e| 1.0 / e.distance).sum();
    Ok(4.0 / (c.len() as f64 * PI) * recip)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub coefficient: f64,
    pub value: f64,
}

/// Union bounds and their leading-order approximations at one `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub gamma: f64,
    pub per_symbol_exact_bound: Vec<f64>,
    pub avg_exact_bound: f64,
    /// `min(bound, 1)`, for plotting only.
    pub per_symbol_clamped: Vec<f64>,
    pub avg_clamped: f64,
    pub per_symbol_asymptotic: Vec<Asymptotic>,
    pub avg_asymptotic: Asymptotic,
}

pub fn bound_report(c: &Constellation, gamma: f64) -> Result<BoundReport> {
    check_gamma(gamma)?;
    let s = spectrum_for_bounds(c)?;
    let m = c.len();
    let per_symbol: Vec<f64> = (0..m).map(|i| s.row(i).map(|d| term(d, gamma)).sum()).collect();
    let avg = union_bound_average(c, gamma)?;
    let per_symbol_asymptotic = (0..m)
        .map(|i| {
            let coefficient = 2.0 / PI * s.row(i).map(|d| 1.0 / d).sum::<f64>();
            Asymptotic { coefficient, value: coefficient * gamma }
        })
        .collect();
    let coefficient = asymptotic_coefficient_average(c)?;
    Ok(BoundReport {
        gamma,
        per_symbol_clamped: per_symbol.iter().map(|b| b.min(1.0)).collect(),
        per_symbol_exact_bound: per_symbol,
        avg_clamped: avg.min(1.0),
        avg_exact_bound: avg,
        per_symbol_asymptotic,
        avg_asymptotic: Asymptotic { coefficient, value: coefficient * gamma },
    })
}
