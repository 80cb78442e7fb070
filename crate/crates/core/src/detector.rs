//! Maximum-likelihood detection and seeded Monte Carlo estimation of symbol
//! error probabilities.
//!
//! Trials are grouped in batches; batch `k` at grid point `g` consumes the
//! substream `(seed, g << 32 | k)` and draws, per trial, one uniform for the
//! transmitted symbol followed by the noise vector. Batches run in parallel
//! and merge by integer summation, so an estimate depends only on the inputs
//! and the seed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Constellation;
use crate::noise::NoiseModel;
use crate::rng::RngStream;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Nearest symbol to `y`; ties go to the lowest index.
pub fn ml_decode(c: &Constellation, y: &[f64]) -> Result<usize> {
    if y.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: y.len() });
    }
    Ok(nearest(c, y))
}

#[inline]
fn nearest(c: &Constellation, y: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in c.points().iter().enumerate() {
        let d: f64 = p.coords().iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Maximizer of the Cauchy log-likelihood `log f(y − x_i)`; ties go to the
/// lowest index.
pub fn ml_decode_via_likelihood(c: &Constellation, y: &[f64], m: &NoiseModel) -> Result<usize> {
    if y.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: y.len() });
    }
    if m.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: m.dim() });
    }
    let mut best = 0;
    let mut best_ll = f64::NEG_INFINITY;
    let mut diff = vec![0.0; c.dim()];
    for (i, p) in c.points().iter().enumerate() {
        for ((d, a), b) in diff.iter_mut().zip(y).zip(p.coords()) {
            *d = a - b;
        }
        let ll = m.log_density(&diff)?;
        if ll > best_ll {
            best_ll = ll;
            best = i;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Overrides the constellation's own priors when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { n_samples: 500_000, batch_size: 100_000, seed: 2026, priors: None }
    }
}

impl McConfig {
    pub fn new(n_samples: usize, batch_size: usize, seed: u64) -> Self {
        Self { n_samples, batch_size, seed, priors: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidSampleCount { min: 1, found: 0 });
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidSampleCount { min: 1, found: 0 });
        }
        Ok(())
    }
}

/// 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64) -> Self {
        Self::with_z(successes, trials, Z95)
    }

    pub fn with_z(successes: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self { lower: 0.0, upper: 1.0 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self { lower: (center - half).max(0.0), upper: (center + half).min(1.0) }
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiHalfwidths {
    pub avg: f64,
    pub per_symbol: Vec<f64>,
}

/// Monte Carlo estimate of average and per-symbol error / correct-decision
/// probabilities at one noise scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub gamma: f64,
    pub n_samples: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub avg_error: f64,
    pub avg_correct: f64,
    pub per_symbol_error: Vec<f64>,
    pub per_symbol_correct: Vec<f64>,
    pub per_symbol_trials: Vec<u64>,
    pub per_symbol_errors: Vec<u64>,
    pub avg_error_ci: WilsonInterval,
    pub per_symbol_error_ci: Vec<WilsonInterval>,
    /// Wilson half-widths; the correct-decision intervals mirror the error
    /// intervals and share these widths.
    pub ci95_halfwidth: CiHalfwidths,
}

impl McEstimate {
    fn from_counts(gamma: f64, cfg: &McConfig, trials: Vec<u64>, errors: Vec<u64>) -> Self {
        let total: u64 = trials.iter().sum();
        let total_err: u64 = errors.iter().sum();
        let avg_error = total_err as f64 / total as f64;
        let per_symbol_error: Vec<f64> =
            trials.iter().zip(&errors).map(|(&t, &e)| if t == 0 { 0.0 } else { e as f64 / t as f64 }).collect();
        let per_symbol_error_ci: Vec<WilsonInterval> =
            trials.iter().zip(&errors).map(|(&t, &e)| WilsonInterval::new(e, t)).collect();
        let avg_error_ci = WilsonInterval::new(total_err, total);
        Self {
            gamma,
            n_samples: cfg.n_samples,
            batch_size: cfg.batch_size,
            seed: cfg.seed,
            avg_error,
            avg_correct: 1.0 - avg_error,
            per_symbol_correct: per_symbol_error.iter().map(|e| 1.0 - e).collect(),
            per_symbol_error,
            ci95_halfwidth: CiHalfwidths {
                avg: avg_error_ci.halfwidth(),
                per_symbol: per_symbol_error_ci.iter().map(WilsonInterval::halfwidth).collect(),
            },
            per_symbol_trials: trials,
            per_symbol_errors: errors,
            avg_error_ci,
            per_symbol_error_ci,
        }
    }

    /// Index and value of the largest conditional error probability.
    pub fn worst_symbol(&self) -> (usize, f64) {
        self.per_symbol_error.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, e)| {
            if e > acc.1 {
                (i, e)
            } else {
                acc
            }
        })
    }

    pub fn worst_symbol_error(&self) -> f64 {
        self.worst_symbol().1
    }

    pub fn worst_symbol_correct(&self) -> f64 {
        1.0 - self.worst_symbol_error()
    }

    pub fn worst_symbol_halfwidth(&self) -> f64 {
        self.ci95_halfwidth.per_symbol[self.worst_symbol().0]
    }
}

fn cumulative(priors: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    priors
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn run_batch(c: &Constellation, m: &NoiseModel, cum: &[f64], stream: RngStream, trials: usize) -> (Vec<u64>, Vec<u64>) {
    let mm = c.len();
    let mut sent = vec![0u64; mm];
    let mut wrong = vec![0u64; mm];
    let mut rng = stream.rng();
    let mut noise = vec![0.0; c.dim()];
    let mut y = vec![0.0; c.dim()];
    for _ in 0..trials {
        let u: f64 = rng.random();
        let t = cum.iter().position(|&c| u < c).unwrap_or(mm - 1);
        m.sample_into(&mut rng, &mut noise);
        for ((yk, xk), nk) in y.iter_mut().zip(c.point(t)).zip(&noise) {
            *yk = xk + nk;
        }
        sent[t] += 1;
        if nearest(c, &y) != t {
            wrong[t] += 1;
        }
    }
    (sent, wrong)
}

fn estimate_at(c: &Constellation, m: &NoiseModel, cfg: &McConfig, grid_index: u32) -> Result<McEstimate> {
    cfg.validate()?;
    if m.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: m.dim() });
    }
    let priors = match &cfg.priors {
        Some(p) => c.clone().with_priors(p.clone())?.priors(),
        None => c.priors(),
    };
    let cum = cumulative(&priors);
    let n_batches = cfg.n_samples.div_ceil(cfg.batch_size);
    let parts: Vec<(Vec<u64>, Vec<u64>)> = (0..n_batches)
        .into_par_iter()
        .map(|k| {
            let size = cfg.batch_size.min(cfg.n_samples - k * cfg.batch_size);
            run_batch(c, m, &cum, RngStream::for_batch(cfg.seed, grid_index, k as u32), size)
        })
        .collect();
    let mut trials = vec![0u64; c.len()];
    let mut errors = vec![0u64; c.len()];
    for (t, e) in parts {
        for i in 0..c.len() {
            trials[i] += t[i];
            errors[i] += e[i];
        }
    }
    Ok(McEstimate::from_counts(m.gamma(), cfg, trials, errors))
}

pub fn estimate(c: &Constellation, m: &NoiseModel, cfg: &McConfig) -> Result<McEstimate> {
    estimate_at(c, m, cfg, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub estimate: McEstimate,
}

/// Independent estimates over a grid of noise scales; grid point `g` uses
/// substreams `(seed, g << 32 | batch)`.
pub fn sweep(c: &Constellation, gammas: &[f64], cfg: &McConfig) -> Result<Vec<SweepPoint>> {
    if gammas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    gammas
        .iter()
        .enumerate()
        .map(|(g, &gamma)| {
            let m = NoiseModel::new(gamma, c.dim())?;
            Ok(SweepPoint { gamma, estimate: estimate_at(c, &m, cfg, g as u32)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_get;
    use crate::geometry::angular_patch_2d;
    use approx::assert_abs_diff_eq;

    fn asym4() -> Constellation {
        catalog_get("asym4").unwrap().constellation
    }

    #[test]
    fn decode_examples() {
        let c = asym4();
        assert_eq!(ml_decode(&c, &[0.6, 0.0]).unwrap(), 1);
        assert_eq!(ml_decode(&c, &[0.5, 0.0]).unwrap(), 0);
        // squared distances: P1 25.01, P2 36.01, P3 25.81, P4 26.21
        assert_eq!(ml_decode(&c, &[-5.0, 0.1]).unwrap(), 0);
        assert!(matches!(ml_decode(&c, &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn likelihood_decoder_agrees() {
        let c = asym4();
        for gamma in [0.1, 1.0, 10.0] {
            let m = NoiseModel::new(gamma, 2).unwrap();
            assert_eq!(ml_decode_via_likelihood(&c, &[0.6, 0.0], &m).unwrap(), 1);
            assert_eq!(ml_decode_via_likelihood(&c, &[0.5, 0.0], &m).unwrap(), 0);
        }
        let mut rng = RngStream::new(99, 0).rng();
        let gammas = [0.1, 1.0, 10.0];
        for _ in 0..10_000 {
            let y = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let m = NoiseModel::new(gammas[rng.random_range(0..3)], 2).unwrap();
            assert_eq!(ml_decode(&c, &y).unwrap(), ml_decode_via_likelihood(&c, &y, &m).unwrap());
        }
    }

    #[test]
    fn wilson_interval() {
        let w = WilsonInterval::new(0, 100);
        assert!(w.lower.abs() < 1e-15);
        assert!(w.upper > 0.0 && w.upper < 0.05);
        // Reference values from the closed-form score interval.
        let w = WilsonInterval::new(50, 100);
        assert_abs_diff_eq!(w.lower, 0.4038315303659956, epsilon = 1e-12);
        assert_abs_diff_eq!(w.upper, 0.5961684696340044, epsilon = 1e-12);
        assert_eq!(WilsonInterval::new(0, 0), WilsonInterval { lower: 0.0, upper: 1.0 });
    }

    #[test]
    fn single_point_never_errs() {
        let c = Constellation::new(vec![vec![0.3, -0.2]]).unwrap();
        let m = NoiseModel::new(50.0, 2).unwrap();
        let e = estimate(&c, &m, &McConfig::new(10_000, 3_000, 1)).unwrap();
        assert_eq!(e.avg_error, 0.0);
        assert_eq!(e.per_symbol_trials, vec![10_000]);
    }

    #[test]
    fn estimate_invariants_and_determinism() {
        let c = asym4();
        let m = NoiseModel::new(0.7, 2).unwrap();
        let cfg = McConfig::new(40_000, 7_000, 3);
        let a = estimate(&c, &m, &cfg).unwrap();
        let b = estimate(&c, &m, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.avg_correct, 1.0 - a.avg_error);
        assert_eq!(a.per_symbol_trials.iter().sum::<u64>(), 40_000);
        let weighted: f64 =
            a.per_symbol_trials.iter().zip(&a.per_symbol_error).map(|(&t, e)| t as f64 / 40_000.0 * e).sum();
        assert_abs_diff_eq!(weighted, a.avg_error, epsilon = 1e-12);
        // nominal priors: within the CI
        let nominal: f64 = a.per_symbol_error.iter().sum::<f64>() / 4.0;
        assert!((nominal - a.avg_error).abs() <= 2.0 * a.ci95_halfwidth.avg);
        for p in a.per_symbol_error.iter().chain(&a.per_symbol_correct) {
            assert!((0.0..=1.0).contains(p));
        }
    }

    #[test]
    fn priors_drive_symbol_draws() {
        let c = asym4();
        let m = NoiseModel::new(0.1, 2).unwrap();
        let mut cfg = McConfig::new(20_000, 5_000, 8);
        cfg.priors = Some(vec![0.7, 0.1, 0.1, 0.1]);
        let e = estimate(&c, &m, &cfg).unwrap();
        let frac = e.per_symbol_trials[0] as f64 / 20_000.0;
        assert!((frac - 0.7).abs() < 0.02, "{frac}");
        cfg.priors = Some(vec![0.7, 0.1, 0.1]);
        assert!(estimate(&c, &m, &cfg).is_err());
    }

    #[test]
    fn sweep_matches_single_estimate() {
        let c = asym4();
        let cfg = McConfig::new(20_000, 6_000, 5);
        let s = sweep(&c, &[0.4], &cfg).unwrap();
        let e = estimate(&c, &NoiseModel::new(0.4, 2).unwrap(), &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].estimate, e);
        assert!(matches!(sweep(&c, &[], &cfg), Err(Error::EmptyGrid)));
        assert!(sweep(&c, &[0.1, -1.0], &cfg).is_err());
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = RngStream::new(17, 0).rng();
        for trial in 0..4 {
            let pts: Vec<Vec<f64>> =
                (0..5).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
            let c = Constellation::new(pts).unwrap();
            for s in [0.5, 2.0] {
                let cfg = McConfig::new(50_000, 10_000, 100 + trial);
                let a = estimate(&c, &NoiseModel::new(0.8, 2).unwrap(), &cfg).unwrap();
                let mut cfg_b = cfg.clone();
                cfg_b.seed += 1000;
                let b = estimate(&c.scaled(s).unwrap(), &NoiseModel::new(0.8 * s, 2).unwrap(), &cfg_b).unwrap();
                let se = |e: &McEstimate| (e.avg_error * (1.0 - e.avg_error) / e.n_samples as f64).sqrt();
                let combined = (se(&a).powi(2) + se(&b).powi(2)).sqrt();
                assert!((a.avg_error - b.avg_error).abs() < 4.0 * combined, "{} vs {}", a.avg_error, b.avg_error);
            }
        }
    }

    #[test]
    fn far_field_decisions_follow_recession_cones() {
        let c = asym4();
        let patches: Vec<_> = (0..4).map(|i| angular_patch_2d(&c, i).unwrap()).collect();
        let m = NoiseModel::new(1.0, 2).unwrap();
        let threshold = 1e3 * c.diameter();
        let mut rng = RngStream::new(4, 0).rng();
        let mut checked = 0;
        for _ in 0..200_000 {
            let t = rng.random_range(0..4);
            let n = m.sample(&mut rng);
            let r = (n[0] * n[0] + n[1] * n[1]).sqrt();
            if r <= threshold {
                continue;
            }
            let y = [c.point(t)[0] + n[0], c.point(t)[1] + n[1]];
            let i = ml_decode(&c, &y).unwrap();
            let theta = n[1].atan2(n[0]);
            assert!(patches[i].angular_distance(theta) < 1e-2, "decoded {i} at angle {theta}");
            checked += 1;
        }
        assert!(checked > 50, "only {checked} far-field draws");
    }
}
