//! Design descriptors and the two-stage candidate screen.
//!
//! Large-noise side: the angular robustness `A_i` (normalized measure of the
//! recession cone) is the limit of the conditional correct-decision
//! probability, so `A_i = 0` flags geometric collapse. Small-noise side: the
//! burden `B_i` sets the slope of the union bound. The screen rejects every
//! collapsing candidate, then ranks survivors by
//! `J_λ = λ √P0 · B_max − (1 − λ) · A_min`.

use serde::{Deserialize, Serialize};

use crate::bounds::burdens;
use crate::error::{Error, Result};
use crate::geometry::{angular_fraction, AngularMethod, Constellation};

/// `A_i` below this counts as zero.
pub const COLLAPSE_TOL: f64 = 1e-12;
/// Upper confidence bound on a sampled `A_i` below which it counts as zero.
pub const MC_COLLAPSE_BOUND: f64 = 1e-3;
/// One-sided 99% normal quantile.
const Z99_ONE_SIDED: f64 = 2.326_347_874_040_841;

pub const COLLAPSE_REASON: &str = "geometric collapse";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularSource {
    Exact2d,
    SphereMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Directions sampled per point when the constellation is not planar.
    pub sphere_samples: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { sphere_samples: 100_000, seed: 2026 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub labels: Vec<String>,
    pub angular_source: AngularSource,
    /// Angular robustness `A_i`, the large-noise correct-decision limit.
    pub a_i: Vec<f64>,
    pub a_std_error: Vec<f64>,
    pub a_min: f64,
    /// Reciprocal-distance burden `B_i`.
    pub b_i: Vec<f64>,
    pub b_max: f64,
    /// `√P · B_max` with `P` the constellation's own average power.
    pub normalized_b_max: f64,
    pub collapse: Vec<bool>,
    pub large_noise_correct_limit: Vec<f64>,
    pub large_noise_error_limit: Vec<f64>,
    pub avg_large_noise_correct_limit: f64,
    pub avg_large_noise_error_limit: f64,
    pub power: f64,
    pub d_min: f64,
}

impl ReliabilityReport {
    pub fn len(&self) -> usize {
        self.a_i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_i.is_empty()
    }

    pub fn normalized_b_max_at(&self, p0: f64) -> Result<f64> {
        check_power(p0)?;
        Ok(p0.sqrt() * self.b_max)
    }

    pub fn joint_objective(&self, lambda: f64, p0: f64) -> Result<f64> {
        check_lambda(lambda)?;
        Ok(lambda * self.normalized_b_max_at(p0)? - (1.0 - lambda) * self.a_min)
    }
}

fn check_power(p0: f64) -> Result<()> {
    if p0.is_finite() && p0 > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositivePower(p0))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::LambdaOutOfRange(lambda))
    }
}

pub fn report(c: &Constellation) -> Result<ReliabilityReport> {
    report_with(c, ReportOptions::default())
}

pub fn report_with(c: &Constellation, opts: ReportOptions) -> Result<ReliabilityReport> {
    c.require_points(2)?;
    let m = c.len();
    let (source, method) = if c.dim() == 2 {
        (AngularSource::Exact2d, AngularMethod::Exact2d)
    } else {
        (AngularSource::SphereMc, AngularMethod::SphereMc { samples: opts.sphere_samples, seed: opts.seed })
    };
    let fractions = (0..m).map(|i| angular_fraction(c, i, method)).collect::<Result<Vec<_>>>()?;
    let a_i: Vec<f64> = fractions.iter().map(|f| f.value).collect();
    let collapse: Vec<bool> = fractions
        .iter()
        .map(|f| match (f.samples, f.hits) {
            (Some(n), Some(h)) => {
                let upper = crate::detector::WilsonInterval::with_z(h as u64, n as u64, Z99_ONE_SIDED).upper;
                upper < MC_COLLAPSE_BOUND
            }
            _ => f.value < COLLAPSE_TOL,
        })
        .collect();
    let b_i = burdens(c)?;
    let b_max = b_i.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let power = c.average_power();
    let priors = c.priors();
    let avg_pc: f64 = priors.iter().zip(&a_i).map(|(p, a)| p * a).sum();
    Ok(ReliabilityReport {
        labels: (0..m).map(|i| c.label(i)).collect(),
        angular_source: source,
        a_std_error: fractions.iter().map(|f| f.std_error).collect(),
        a_min: a_i.iter().copied().fold(f64::INFINITY, f64::min),
        b_max,
        normalized_b_max: power.sqrt() * b_max,
        collapse,
        large_noise_correct_limit: a_i.clone(),
        large_noise_error_limit: a_i.iter().map(|a| 1.0 - a).collect(),
        avg_large_noise_correct_limit: avg_pc,
        avg_large_noise_error_limit: 1.0 - avg_pc,
        power,
        d_min: c.min_distance()?,
        a_i,
        b_i,
    })
}

/// `√p0 · B_max`.
pub fn normalized_burden_max(c: &Constellation, p0: f64) -> Result<f64> {
    check_power(p0)?;
    Ok(p0.sqrt() * crate::bounds::burden_max(c)?)
}

/// `λ · √p0 · B_max − (1 − λ) · A_min`.
pub fn joint_objective(c: &Constellation, lambda: f64, p0: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_power(p0)?;
    report(c)?.joint_objective(lambda, p0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub constellation: Constellation,
}

impl Candidate {
    pub fn new(id: impl Into<String>, constellation: Constellation) -> Self {
        Self { id: id.into(), constellation }
    }
}

/// Reference power used to normalize the burden of each candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerReference {
    /// Each candidate's own average power.
    Own,
    Common(f64),
    PerCandidate(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejected {
    pub id: String,
    pub reason: String,
    pub a_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub id: String,
    pub j_lambda: f64,
    pub p0: f64,
    pub report: ReliabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult {
    pub lambda: f64,
    pub rejected: Vec<Rejected>,
    /// Ascending in `j_lambda`; ties keep input order.
    pub ranked: Vec<Ranked>,
    /// Set when candidate average powers differ by more than 1e-9 relative.
    pub unequal_power_warning: bool,
}

pub fn screen(candidates: &[Candidate], lambda: f64, p0: &PowerReference) -> Result<ScreenResult> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidateList);
    }
    check_lambda(lambda)?;
    if let PowerReference::PerCandidate(v) = p0 {
        if v.len() != candidates.len() {
            return Err(Error::Parse {
                path: "p0".into(),
                message: format!("expected {} per-candidate powers, got {}", candidates.len(), v.len()),
            });
        }
    }
    let reports: Vec<ReliabilityReport> = candidates.iter().map(|c| report(&c.constellation)).collect::<Result<_>>()?;

    let powers: Vec<f64> = reports.iter().map(|r| r.power).collect();
    let (lo, hi) = powers.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    let unequal_power_warning = hi - lo > 1e-9 * hi.abs();

    let mut rejected = Vec::new();
    let mut ranked = Vec::new();
    for (k, (cand, rep)) in candidates.iter().zip(reports).enumerate() {
        if rep.collapse.iter().any(|&f| f) {
            rejected.push(Rejected { id: cand.id.clone(), reason: COLLAPSE_REASON.into(), a_min: rep.a_min });
            continue;
        }
        let p = match p0 {
            PowerReference::Own => rep.power,
            PowerReference::Common(p) => *p,
            PowerReference::PerCandidate(v) => v[k],
        };
        let j_lambda = rep.joint_objective(lambda, p)?;
        ranked.push(Ranked { id: cand.id.clone(), j_lambda, p0: p, report: rep });
    }
    ranked.sort_by(|a, b| a.j_lambda.total_cmp(&b.j_lambda));
    Ok(ScreenResult { lambda, rejected, ranked, unequal_power_warning })
}
