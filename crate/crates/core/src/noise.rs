//! The isotropic multivariate Cauchy law.
//!
//! Density:
//!
//! ```text
//! f(n) = c_d γ^{-d} (1 + ‖n‖²/γ²)^{-(d+1)/2},   c_d = Γ((d+1)/2) / π^{(d+1)/2}
//! ```
//!
//! Samples are drawn as `γ·G/H` with `G ~ N(0, I_d)` and `H ~ N(0, 1)`
//! independent. Every one-dimensional projection `uᵀN` onto a unit vector is
//! a scalar Cauchy variable with the same scale, which [`projection_ks`]
//! checks empirically.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    gamma: f64,
    dim: usize,
}

impl NoiseModel {
    pub fn new(gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::NonpositiveInput { name: "gamma", value: gamma });
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Self { gamma, dim })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `log c_d`.
    pub fn log_normalizer(&self) -> f64 {
        let k = self.dim + 1;
        ln_gamma_half(k) - (k as f64 / 2.0) * PI.ln()
    }

    pub fn log_density(&self, n: &[f64]) -> Result<f64> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n.len() });
        }
        let r2: f64 = n.iter().map(|v| v * v).sum();
        let d = self.dim as f64;
        Ok(self.log_normalizer() - d * self.gamma.ln() - 0.5 * (d + 1.0) * (r2 / (self.gamma * self.gamma)).ln_1p())
    }

    /// Maps one Gaussian draw `(g, h)` to a noise vector; `None` when `h == 0`.
    pub fn from_draws(&self, g: &[f64], h: f64, out: &mut [f64]) -> Option<()> {
        if h == 0.0 {
            return None;
        }
        let s = self.gamma / h;
        for (o, gi) in out.iter_mut().zip(g) {
            *o = s * gi;
        }
        Some(())
    }

    /// Draws one noise vector into `out` (length `dim`), redrawing on `H == 0`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        loop {
            for o in out.iter_mut() {
                *o = rng.sample(StandardNormal);
            }
            let h: f64 = rng.sample(StandardNormal);
            if h != 0.0 {
                let s = self.gamma / h;
                out.iter_mut().for_each(|o| *o *= s);
                return;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(rng, &mut out);
        out
    }

    pub fn sampler(&self, stream: RngStream) -> NoiseSampler {
        NoiseSampler { model: *self, rng: stream.rng() }
    }
}

/// Iterator of noise vectors from a fixed substream.
pub struct NoiseSampler {
    model: NoiseModel,
    rng: ChaCha12Rng,
}

impl Iterator for NoiseSampler {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        Some(self.model.sample(&mut self.rng))
    }
}

/// `ln Γ(k/2)` for a positive integer `k`, via the half-integer closed forms.
pub fn ln_gamma_half(k: usize) -> f64 {
    assert!(k >= 1);
    if k.is_multiple_of(2) {
        (1..k / 2).map(|j| (j as f64).ln()).sum()
    } else {
        0.5 * PI.ln() + (1..=(k - 1) / 2).map(|j| (j as f64 - 0.5).ln()).sum::<f64>()
    }
}

/// CDF of the scalar Cauchy law with location 0 and scale `gamma`.
pub fn cauchy_cdf(z: f64, gamma: f64) -> f64 {
    0.5 + (z / gamma).atan() / PI
}

/// One-sample Kolmogorov–Smirnov statistic; sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |acc, (k, &x)| {
        let f = cdf(x);
        let lo = f - k as f64 / n;
        let hi = (k + 1) as f64 / n - f;
        acc.max(lo).max(hi)
    })
}

/// Two-sample Kolmogorov–Smirnov statistic; sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance between the empirical law of `uᵀN` over `n_samples` draws and
/// the Cauchy(0, γ) CDF.
pub fn projection_ks(model: &NoiseModel, u: &[f64], n_samples: usize, stream: RngStream) -> Result<f64> {
    if u.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: u.len() });
    }
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitVector(norm));
    }
    if n_samples < 100 {
        return Err(Error::InvalidSampleCount { min: 100, found: n_samples });
    }
    let mut proj: Vec<f64> =
        model.sampler(stream).take(n_samples).map(|n| n.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
    let gamma = model.gamma();
    Ok(ks_statistic(&mut proj, |z| cauchy_cdf(z, gamma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn density_values() {
        let m2 = NoiseModel::new(1.0, 2).unwrap();
        assert_abs_diff_eq!(m2.log_density(&[0.0, 0.0]).unwrap(), (1.0 / (2.0 * PI)).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(m2.log_density(&[0.0, 0.0]).unwrap(), -1.837877066409345, epsilon = 1e-12);
        let m1 = NoiseModel::new(1.0, 1).unwrap();
        assert_abs_diff_eq!(m1.log_density(&[0.0]).unwrap(), (1.0 / PI).ln(), epsilon = 1e-14);
        let m = NoiseModel::new(2.0, 2).unwrap();
        let want = (1.0 / (2.0 * PI)).ln() - 2.0 * 2f64.ln() - 1.5 * 2f64.ln();
        assert_abs_diff_eq!(m.log_density(&[2.0, 0.0]).unwrap(), want, epsilon = 1e-14);
        assert!(matches!(m.log_density(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gamma_half_values() {
        assert_abs_diff_eq!(ln_gamma_half(1), 0.5 * PI.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(ln_gamma_half(2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ln_gamma_half(3), (PI.sqrt() / 2.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(ln_gamma_half(8), 6f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma_half(7), (15.0 * PI.sqrt() / 8.0).ln(), epsilon = 1e-14);
    }

    /// Radial mass `σ_{d−1} ∫_0^∞ c_d (1+r²)^{-(d+1)/2} r^{d−1} dr` by
    /// composite Simpson after the substitution `r = tan t`.
    fn radial_mass(d: usize) -> f64 {
        let m = NoiseModel::new(1.0, d).unwrap();
        let cd = m.log_normalizer().exp();
        let sphere_area = 2.0 * PI.powf(d as f64 / 2.0) / ln_gamma_half(d).exp();
        // (1 + tan²t)^{-(d+1)/2} tan^{d-1}t sec²t = sin^{d-1}t
        let f = |t: f64| t.sin().powi(d as i32 - 1);
        let n = 20_000;
        let h = (PI / 2.0) / n as f64;
        let mut s = f(0.0) + f(PI / 2.0);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sphere_area * cd * s * h / 3.0
    }

    #[test]
    fn density_normalizes() {
        for d in 1..=3 {
            assert_abs_diff_eq!(radial_mass(d), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn forced_draws() {
        let m = NoiseModel::new(2.0, 2).unwrap();
        let mut out = [0.0; 2];
        assert!(m.from_draws(&[1.0, 2.0], 0.5, &mut out).is_some());
        assert_eq!(out, [4.0, 8.0]);
        m.from_draws(&[0.0, 0.0], -3.0, &mut out).unwrap();
        assert_eq!(out, [0.0, 0.0]);
        assert!(m.from_draws(&[1.0, 1.0], 0.0, &mut out).is_none());
    }

    #[test]
    fn sampler_reproducible() {
        let m = NoiseModel::new(1.5, 3).unwrap();
        let a: Vec<Vec<f64>> = m.sampler(RngStream::new(11, 4)).take(100).collect();
        let b: Vec<Vec<f64>> = m.sampler(RngStream::new(11, 4)).take(100).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_linear_in_gamma() {
        let unit = NoiseModel::new(1.0, 2).unwrap();
        let wide = NoiseModel::new(3.0, 2).unwrap();
        let s = RngStream::new(5, 0);
        for (a, b) in unit.sampler(s).zip(wide.sampler(s)).take(1000) {
            for k in 0..2 {
                assert_abs_diff_eq!(b[k] / 3.0, a[k], epsilon = 1e-12 * a[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn projections_are_cauchy() {
        let m = NoiseModel::new(1.0, 2).unwrap();
        let ks = projection_ks(&m, &[1.0, 0.0], 100_000, RngStream::new(2026, 0)).unwrap();
        assert!(ks < 0.01, "ks {ks}");
        let m = NoiseModel::new(3.0, 2).unwrap();
        let r = 0.5f64.sqrt();
        let ks = projection_ks(&m, &[r, r], 100_000, RngStream::new(2026, 1)).unwrap();
        assert!(ks < 0.01, "ks {ks}");
    }

    #[test]
    fn projection_preconditions() {
        let m = NoiseModel::new(1.0, 2).unwrap();
        assert!(matches!(projection_ks(&m, &[1.0, 1.0], 1000, RngStream::new(0, 0)), Err(Error::NotUnitVector(_))));
        assert!(matches!(
            projection_ks(&m, &[1.0, 0.0], 10, RngStream::new(0, 0)),
            Err(Error::InvalidSampleCount { .. })
        ));
        assert!(NoiseModel::new(0.0, 2).is_err());
        assert!(NoiseModel::new(1.0, 0).is_err());
    }

    #[test]
    fn radius_law_is_rotation_invariant() {
        // Rotating G before dividing by H must not change the law of ‖N‖.
        let gamma = 1.0;
        let (sn, cs) = 0.7f64.sin_cos();
        let draw = |seed: u64, rotate: bool| -> Vec<f64> {
            let mut rng = RngStream::new(seed, 0).rng();
            (0..100_000)
                .map(|_| {
                    let g: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
                    let g = if rotate { [cs * g[0] - sn * g[1], sn * g[0] + cs * g[1]] } else { g };
                    let h: f64 = rng.sample(StandardNormal);
                    gamma * (g[0] * g[0] + g[1] * g[1]).sqrt() / h.abs()
                })
                .collect()
        };
        let mut a = draw(1, false);
        let mut b = draw(2, true);
        assert!(ks_two_sample(&mut a, &mut b) < 0.01);
    }

    #[test]
    fn ks_helpers() {
        let mut xs = vec![0.0];
        assert_abs_diff_eq!(ks_statistic(&mut xs, |z| cauchy_cdf(z, 1.0)), 0.5, epsilon = 1e-15);
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
    }
}
