//! Per-channel contributions to the global interaction.
//!
//! Each cross-spectrum entry is projected onto the major axis of the product
//! cloud (direction `arg(c)`); the absolute projections are averaged along
//! rows for the X side and along columns for the Y side.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cwt::{CoiMask, FrequencyGrid, WaveletTensor};
use crate::error::{Error, Result};
use crate::gxwt::{cross_spectrum, CrossSpectrumMatrix, GxwtGrid, Variant};

/// Absolute major-axis projections `p_jk`, row-major N×M.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl ProjectionMatrix {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n_cols + k]
    }

    /// `(1/M) Σ_k p_jk` for every row `j`.
    pub fn row_means(&self) -> Vec<f64> {
        self.values
            .chunks(self.n_cols)
            .map(|r| r.iter().sum::<f64>() / self.n_cols as f64)
            .collect()
    }

    /// `(1/N) Σ_j p_jk` for every column `k`.
    pub fn col_means(&self) -> Vec<f64> {
        (0..self.n_cols)
            .map(|k| (0..self.n_rows).map(|j| self.get(j, k)).sum::<f64>() / self.n_rows as f64)
            .collect()
    }
}

/// `p_jk = |Re(m_jk · e^{-i·arg c})|`; with `c = 0` the axis is the real line.
pub fn projection_matrix(m: &CrossSpectrumMatrix, c: Complex64) -> ProjectionMatrix {
    let rot = if c == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -c.im.atan2(c.re))
    };
    ProjectionMatrix {
        values: m.entries().iter().map(|z| (z * rot).re.abs()).collect(),
        n_rows: m.n_rows(),
        n_cols: m.n_cols(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Nonnegative F×T×K contributions, stored `[f][t][channel]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContributionTensor {
    values: Vec<f64>,
    side: Side,
    channel_names: Vec<String>,
    grid: FrequencyGrid,
    n_times: usize,
}

impl ContributionTensor {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn get(&self, f: usize, t: usize, channel: usize) -> f64 {
        self.values[(f * self.n_times + t) * self.n_channels() + channel]
    }

    /// One channel's F×T plane, row-major.
    pub fn channel_plane(&self, channel: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(channel)
            .step_by(self.n_channels())
            .copied()
            .collect()
    }

    /// Temporal mean of one channel per frequency, optionally restricted to
    /// points inside `mask`. Rows without admitted points are `None`.
    pub fn mean_over_time(&self, channel: usize, mask: Option<&CoiMask>) -> Vec<Option<f64>> {
        (0..self.grid.len())
            .map(|f| {
                let (mut sum, mut n) = (0.0, 0usize);
                for t in 0..self.n_times {
                    if mask.is_none_or(|m| m.is_inside(f, t)) {
                        sum += self.get(f, t, channel);
                        n += 1;
                    }
                }
                (n > 0).then(|| sum / n as f64)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContributionOptions {
    /// Points with `|c| <= validity_floor` are flagged invalid.
    pub validity_floor: f64,
}

impl Default for ContributionOptions {
    fn default() -> Self {
        Self { validity_floor: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contributions {
    pub x: ContributionTensor,
    pub y: ContributionTensor,
    /// F×T flags, true where `|c|` exceeds the validity floor.
    pub valid: Vec<bool>,
}

/// Row- and column-wise mean projections at every point of a full transform.
///
/// Channel weighting, when wanted, is applied beforehand with
/// [`WaveletTensor::weighted`] on both the tensors and the transform inputs.
pub fn channel_contributions(
    u: &WaveletTensor,
    v: &WaveletTensor,
    g: &GxwtGrid,
    opts: ContributionOptions,
) -> Result<Contributions> {
    if g.variant() != Variant::Full {
        return Err(Error::VariantMismatch);
    }
    u.check_compatible(v)?;
    if u.grid() != g.grid() || u.sample_rate() != g.sample_rate() || u.n_times() != g.n_times() {
        return Err(Error::GridMismatch);
    }
    if g.n_x() != u.n_channels() || g.n_y() != v.n_channels() {
        return Err(Error::ShapeMismatch(format!(
            "transform built from {}x{} channels, tensors have {}x{}",
            g.n_x(),
            g.n_y(),
            u.n_channels(),
            v.n_channels()
        )));
    }
    let (n_f, n_t, n_x, n_y) = (g.n_freqs(), g.n_times(), u.n_channels(), v.n_channels());
    let mut x_vals = vec![0.0; n_f * n_t * n_x];
    let mut y_vals = vec![0.0; n_f * n_t * n_y];
    x_vals
        .par_chunks_mut(n_t * n_x)
        .zip(y_vals.par_chunks_mut(n_t * n_y))
        .enumerate()
        .try_for_each(|(f, (xr, yr))| -> Result<()> {
            for t in 0..n_t {
                let m = cross_spectrum(u.fiber(f, t), v.fiber(f, t))?;
                let p = projection_matrix(&m, g.get(f, t));
                xr[t * n_x..(t + 1) * n_x].copy_from_slice(&p.row_means());
                yr[t * n_y..(t + 1) * n_y].copy_from_slice(&p.col_means());
            }
            Ok(())
        })?;
    let valid = g.values().iter().map(|c| c.norm() > opts.validity_floor).collect();
    let tensor = |values, side, names: &[String]| ContributionTensor {
        values,
        side,
        channel_names: names.to_vec(),
        grid: g.grid().clone(),
        n_times: n_t,
    };
    Ok(Contributions {
        x: tensor(x_vals, Side::X, u.channel_names()),
        y: tensor(y_vals, Side::Y, v.channel_names()),
        valid,
    })
}
