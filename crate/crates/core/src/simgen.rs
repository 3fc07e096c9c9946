//! Synthetic sinusoid dyads with phase-dispersed channels, plus closed-form
//! expectations and a direct-sampling oracle for the transform statistics.
//!
//! Channel `k` of X is `A_x cos(2π f0 t + α_x + β_xk)` with
//! `β_xk ~ N(0, σ_x²)`, and likewise for Y. Randomness comes from ChaCha20
//! seeded with the 64-bit `seed`; normal deviates use the ziggurat sampler of
//! `rand_distr::StandardNormal`, drawn in the order β_x0..β_x(N-1), then
//! β_y0..β_y(N-1).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gxwt::fold_half_turn;
use crate::series::MultiChannelSeries;

/// Stream used by [`mc_oracle_tau`], kept apart from the generator's stream.
const ORACLE_STREAM: u64 = 0x6f72_6163_6c65;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n_channels: usize,
    /// Hz.
    pub f0: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub amp_x: f64,
    pub amp_y: f64,
    /// Phase variance σ_x² (rad²).
    pub var_x: f64,
    pub var_y: f64,
    pub sample_rate: f64,
    /// Seconds.
    pub duration: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    /// Two-versus-one amplitude dyad at 1 Hz, three channels each.
    fn default() -> Self {
        Self {
            n_channels: 3,
            f0: 1.0,
            alpha_x: 0.0,
            alpha_y: PI / 2.0,
            amp_x: 2.0,
            amp_y: 1.0,
            var_x: 0.25,
            var_y: 0.5,
            sample_rate: 100.0,
            duration: 128.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadConfig(m.to_owned()));
        let all_finite = [
            self.f0,
            self.alpha_x,
            self.alpha_y,
            self.amp_x,
            self.amp_y,
            self.var_x,
            self.var_y,
            self.sample_rate,
            self.duration,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("parameters must be finite");
        }
        if self.n_channels == 0 {
            return bad("n_channels must be >= 1");
        }
        if self.sample_rate <= 0.0 || self.f0 <= 0.0 || self.f0 >= self.sample_rate / 2.0 {
            return bad("need 0 < f0 < sample_rate / 2");
        }
        if self.amp_x <= 0.0 || self.amp_y <= 0.0 {
            return bad("amplitudes must be positive");
        }
        if self.var_x < 0.0 || self.var_y < 0.0 {
            return bad("phase variances must be nonnegative");
        }
        if self.duration * self.sample_rate < 2.0 {
            return bad("duration * sample_rate must be >= 2");
        }
        Ok(())
    }

    pub fn n_times(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    /// Mean pairwise phase difference `α_x - α_y`.
    pub fn alpha(&self) -> f64 {
        self.alpha_x - self.alpha_y
    }

    fn offsets(&self, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
        let (sx, sy) = (self.var_x.sqrt(), self.var_y.sqrt());
        let bx = (0..self.n_channels)
            .map(|_| sx * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let by = (0..self.n_channels)
            .map(|_| sy * rng.sample::<f64, _>(StandardNormal))
            .collect();
        (bx, by)
    }
}

/// Generated dyad plus the phase offsets that were drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct Dyad {
    pub x: MultiChannelSeries,
    pub y: MultiChannelSeries,
    pub beta_x: Vec<f64>,
    pub beta_y: Vec<f64>,
}

pub fn simulate_dyad(cfg: &SimConfig) -> Result<Dyad> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let (beta_x, beta_y) = cfg.offsets(&mut rng);
    let n_t = cfg.n_times();
    let make = |amp: f64, alpha: f64, betas: &[f64], prefix: &str| {
        let mut samples = Vec::with_capacity(n_t * betas.len());
        for i in 0..n_t {
            let phase = 2.0 * PI * cfg.f0 * (i as f64 / cfg.sample_rate) + alpha;
            samples.extend(betas.iter().map(|b| amp * (phase + b).cos()));
        }
        let names = (0..betas.len()).map(|k| format!("{prefix}{k}")).collect();
        MultiChannelSeries::new(samples, cfg.sample_rate, names)
    };
    Ok(Dyad {
        x: make(cfg.amp_x, cfg.alpha_x, &beta_x, "x")?,
        y: make(cfg.amp_y, cfg.alpha_y, &beta_y, "y")?,
        beta_x,
        beta_y,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedModulus {
    /// `A_x A_y exp(-(σ_x² + σ_y²))`.
    pub exact: f64,
    /// `A_x A_y (1 - σ_x² - σ_y²)`.
    pub small_dispersion_approx: f64,
}

/// `|√⟨τ⟩|` at `f0`. The exact form follows from `⟨e^{2iδ}⟩ = e^{-2σ²}` for
/// `δ ~ N(0, σ²)`.
pub fn expected_modulus(cfg: &SimConfig) -> ExpectedModulus {
    let amp = cfg.amp_x * cfg.amp_y;
    let dispersion = cfg.var_x + cfg.var_y;
    ExpectedModulus {
        exact: amp * (-dispersion).exp(),
        small_dispersion_approx: amp * (1.0 - dispersion),
    }
}

/// `α_x - α_y` folded modulo π into `(-π/2, π/2]`.
pub fn expected_phase(cfg: &SimConfig) -> f64 {
    fold_half_turn(cfg.alpha())
}

/// Average of `(1/N²) Σ_jk m_jk²` over `n_draws` independent phase draws, with
/// `m_jk = A_x A_y e^{i(α + β_xj - β_yk)}` formed directly (no wavelets).
pub fn mc_oracle_tau(cfg: &SimConfig, n_draws: usize) -> Complex64 {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(ORACLE_STREAM);
    let amp2 = (cfg.amp_x * cfg.amp_y).powi(2);
    let n2 = (cfg.n_channels * cfg.n_channels) as f64;
    let alpha = cfg.alpha();
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..n_draws.max(1) {
        let (bx, by) = cfg.offsets(&mut rng);
        let mut draw = Complex64::new(0.0, 0.0);
        for x in &bx {
            for y in &by {
                draw += Complex64::from_polar(amp2, 2.0 * (alpha + x - y));
            }
        }
        total += draw / n2;
    }
    total / n_draws.max(1) as f64
}
