//! Generalized cross-wavelet transform.
//!
//! At every time-frequency point the N×M products `m_jk = u_j · conj(v_k)`
//! are summarized by their sample pseudo-variance
//! `τ = (1 / (N·M)) Σ_jk m_jk²`, and the transform value is the principal
//! square root `c = √τ`. `|c|` measures size and elongation of the product
//! cloud in the complex plane, `arg(c)` its orientation, i.e. the mutual phase
//! difference modulo π.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cwt::{FrequencyGrid, WaveletTensor};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cross-wavelet products of all channel pairs at one point, row-major N×M.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSpectrumMatrix {
    entries: Vec<Complex64>,
    n_rows: usize,
    n_cols: usize,
    pub f_index: usize,
    pub t_index: usize,
}

impl CrossSpectrumMatrix {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.n_cols + k]
    }

    pub fn at(mut self, f_index: usize, t_index: usize) -> Self {
        self.f_index = f_index;
        self.t_index = t_index;
        self
    }
}

/// Outer product `u · v^H`.
pub fn cross_spectrum(u: &[Complex64], v: &[Complex64]) -> Result<CrossSpectrumMatrix> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyFiber);
    }
    let entries = u.iter().flat_map(|a| v.iter().map(move |b| a * b.conj())).collect();
    Ok(CrossSpectrumMatrix {
        entries,
        n_rows: u.len(),
        n_cols: v.len(),
        f_index: 0,
        t_index: 0,
    })
}

/// `(1 / (N·M)) Σ_jk m_jk²`, summed in row-major order.
pub fn pseudo_variance(m: &CrossSpectrumMatrix) -> Complex64 {
    let sum = m.entries.iter().fold(ZERO, |acc, z| acc + z * z);
    sum / m.entries.len() as f64
}

/// Argument in `(-π, π]`; the negative real axis maps to `+π`.
fn principal_arg(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// Principal square root with `arg ∈ (-π/2, π/2]`; `√0 = 0`.
pub fn principal_sqrt(tau: Complex64) -> Complex64 {
    if tau == ZERO {
        return ZERO;
    }
    Complex64::from_polar(tau.norm().sqrt(), principal_arg(tau) / 2.0)
}

/// Folds an angle modulo π into `(-π/2, π/2]`.
pub fn fold_half_turn(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r > FRAC_PI_2 {
        r - PI
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// All N×M channel pairs.
    Full,
    /// Corresponding channels only (N = M).
    Pairwise,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Pairwise => "pairwise",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Variant::Full),
            "pairwise" => Ok(Variant::Pairwise),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// Complex F×T transform values, row-major by frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct GxwtGrid {
    values: Vec<Complex64>,
    grid: FrequencyGrid,
    sample_rate: f64,
    n_times: usize,
    n_x: usize,
    n_y: usize,
    variant: Variant,
    cycles: f64,
}

impl GxwtGrid {
    /// Assembles a grid from stored values, enforcing the output contract
    /// (finite, nonnegative real part).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        values: Vec<Complex64>,
        grid: FrequencyGrid,
        sample_rate: f64,
        n_times: usize,
        n_x: usize,
        n_y: usize,
        variant: Variant,
        cycles: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() * n_times {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {}x{} grid",
                values.len(),
                grid.len(),
                n_times
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()) || c.re < 0.0)
        {
            return Err(Error::ShapeMismatch(format!(
                "value {} at index {i} violates Re(c) >= 0",
                values[i]
            )));
        }
        if n_x == 0 || n_y == 0 || (variant == Variant::Pairwise && n_x != n_y) {
            return Err(Error::DimensionMismatch { n_x, n_y });
        }
        Ok(Self {
            values,
            grid,
            sample_rate,
            n_times,
            n_x,
            n_y,
            variant,
            cycles,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, f: usize, t: usize) -> Complex64 {
        self.values[f * self.n_times + t]
    }

    pub fn row(&self, f: usize) -> &[Complex64] {
        &self.values[f * self.n_times..(f + 1) * self.n_times]
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn n_freqs(&self) -> usize {
        self.grid.len()
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn cycles(&self) -> f64 {
        self.cycles
    }

    /// `τ = c²` at every point.
    pub fn pseudo_variances(&self) -> Vec<Complex64> {
        self.values.iter().map(|c| c * c).collect()
    }
}

fn build_grid(
    u: &WaveletTensor,
    v: &WaveletTensor,
    variant: Variant,
    point: impl Fn(&[Complex64], &[Complex64]) -> Complex64 + Sync,
) -> GxwtGrid {
    let (n_f, n_t) = (u.n_freqs(), u.n_times());
    let mut values = vec![ZERO; n_f * n_t];
    values.par_chunks_mut(n_t).enumerate().for_each(|(f, row)| {
        for (t, out) in row.iter_mut().enumerate() {
            *out = principal_sqrt(point(u.fiber(f, t), v.fiber(f, t)));
        }
    });
    GxwtGrid {
        values,
        grid: u.grid().clone(),
        sample_rate: u.sample_rate(),
        n_times: n_t,
        n_x: u.n_channels(),
        n_y: v.n_channels(),
        variant,
        cycles: u.cycles(),
    }
}

/// Full transform over all channel pairs.
///
/// Uses `Σ_jk (u_j v̄_k)² = (Σ_j u_j²)(Σ_k v̄_k²)`, so each point costs
/// O(N + M) and no N×M matrix is stored.
pub fn gxwt(u: &WaveletTensor, v: &WaveletTensor) -> Result<GxwtGrid> {
    u.check_compatible(v)?;
    let scale = 1.0 / (u.n_channels() * v.n_channels()) as f64;
    Ok(build_grid(u, v, Variant::Full, |uf, vf| {
        let su = uf.iter().fold(ZERO, |acc, z| acc + z * z);
        let sv = vf.iter().fold(ZERO, |acc, z| acc + (z * z).conj());
        su * sv * scale
    }))
}

/// Pairwise-coupling variant, `τ° = (1/N) Σ_j (u_j v̄_j)²`.
pub fn pairwise_gxwt(u: &WaveletTensor, v: &WaveletTensor) -> Result<GxwtGrid> {
    if u.n_channels() != v.n_channels() {
        return Err(Error::DimensionMismatch {
            n_x: u.n_channels(),
            n_y: v.n_channels(),
        });
    }
    u.check_compatible(v)?;
    let scale = 1.0 / u.n_channels() as f64;
    Ok(build_grid(u, v, Variant::Pairwise, |uf, vf| {
        // Same per-pair arithmetic as the full transform, so N = 1 agrees bitwise.
        let sum = uf.iter().zip(vf).fold(ZERO, |acc, (a, b)| acc + a * a * (b * b).conj());
        sum * scale
    }))
}

/// Size, elongation and orientation of the product cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributionShape {
    /// Sample variance `S² = mean |m_jk|²`.
    pub variance: f64,
    /// `ε = √(|τ| / S²)`, in `[0, 1]`.
    pub eccentricity: f64,
    /// Major-axis angle `arg(τ) / 2`, in `(-π/2, π/2]`.
    pub orientation: f64,
}

pub fn distribution_shape(m: &CrossSpectrumMatrix) -> DistributionShape {
    let tau = pseudo_variance(m);
    let variance = m.entries.iter().map(|z| z.norm_sqr()).sum::<f64>() / m.entries.len() as f64;
    let eccentricity = if variance > 0.0 {
        (tau.norm() / variance).sqrt().min(1.0)
    } else {
        0.0
    };
    let orientation = if tau == ZERO { 0.0 } else { principal_arg(tau) / 2.0 };
    DistributionShape {
        variance,
        eccentricity,
        orientation,
    }
}
