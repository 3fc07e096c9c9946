//! Analytic Morlet continuous wavelet transform and cone of influence.
//!
//! The transform is evaluated in the frequency domain. Each channel has its
//! mean removed, is zero-padded to the next power of two at least twice its
//! length, and is multiplied by the one-sided Morlet response
//!
//! ```text
//! Ψ(ω) = exp(-(s·ω - ω0)² / 2),   s = ω0 / (2π f),   ω > 0
//! ```
//!
//! where `ω0` is the `cycles` parameter. The response peaks at 1 for the row
//! frequency `f`; the positive-frequency half is doubled so that a sinusoid of
//! amplitude `A` at `f` yields coefficients of modulus `A`. The admissibility
//! correction term is omitted (below 2e-8 for `ω0 >= 6`).

use std::f64::consts::{PI, SQRT_2};
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::MultiChannelSeries;

pub const DEFAULT_CYCLES: f64 = 6.0;
pub const MIN_CYCLES: f64 = 4.0;

/// Logarithmic frequency axis, `fmin · 2^(k / voices)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    frequencies: Vec<f64>,
    fmin: f64,
    fmax: f64,
    voices_per_octave: u32,
}

/// Builds a log-spaced grid with `floor(voices · log2(fmax / fmin)) + 1` rows.
pub fn make_grid(fmin: f64, fmax: f64, voices_per_octave: u32) -> Result<FrequencyGrid> {
    FrequencyGrid::new(fmin, fmax, voices_per_octave)
}

impl FrequencyGrid {
    pub fn new(fmin: f64, fmax: f64, voices_per_octave: u32) -> Result<Self> {
        let bad = || Error::BadRange {
            fmin,
            fmax,
            voices: voices_per_octave,
        };
        if !(fmin.is_finite() && fmax.is_finite() && fmin > 0.0 && fmin < fmax) || voices_per_octave == 0 {
            return Err(bad());
        }
        let v = f64::from(voices_per_octave);
        // The small slack keeps exact octave multiples (fmax = fmin·2^k) from
        // losing their last row to rounding in log2.
        let span = (v * (fmax / fmin).log2() + 1e-9).floor();
        if span > 1e6 {
            return Err(bad());
        }
        let count = span as usize + 1;
        let frequencies = (0..count).map(|k| fmin * (k as f64 / v).exp2()).collect();
        Ok(Self {
            frequencies,
            fmin,
            fmax,
            voices_per_octave,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn fmin(&self) -> f64 {
        self.fmin
    }

    pub fn fmax(&self) -> f64 {
        self.fmax
    }

    pub fn voices_per_octave(&self) -> u32 {
        self.voices_per_octave
    }

    /// Row whose frequency is closest to `f` on the log axis.
    pub fn nearest_index(&self, f: f64) -> usize {
        let target = f.log2();
        let mut best = 0;
        for (i, g) in self.frequencies.iter().enumerate() {
            if (g.log2() - target).abs() < (self.frequencies[best].log2() - target).abs() {
                best = i;
            }
        }
        best
    }
}

/// Complex F×T×N wavelet coefficients, stored `[f][t][channel]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletTensor {
    coeffs: Vec<Complex64>,
    grid: FrequencyGrid,
    sample_rate: f64,
    n_times: usize,
    channel_names: Vec<String>,
    cycles: f64,
}

impl WaveletTensor {
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

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn cycles(&self) -> f64 {
        self.cycles
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// All channels at one time-frequency point.
    pub fn fiber(&self, f: usize, t: usize) -> &[Complex64] {
        let n = self.n_channels();
        let start = (f * self.n_times + t) * n;
        &self.coeffs[start..start + n]
    }

    pub fn get(&self, f: usize, t: usize, channel: usize) -> Complex64 {
        self.fiber(f, t)[channel]
    }

    /// One channel's F×T plane, row-major.
    pub fn channel_plane(&self, channel: usize) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .skip(channel)
            .step_by(self.n_channels())
            .copied()
            .collect()
    }

    /// Scales each channel by a nonnegative weight.
    pub fn weighted(&self, weights: &[f64]) -> Result<WaveletTensor> {
        if weights.len() != self.n_channels() {
            return Err(Error::BadWeights(format!(
                "{} weights for {} channels",
                weights.len(),
                self.n_channels()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::BadWeights("weights must be finite and nonnegative".into()));
        }
        let n = self.n_channels();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * weights[i % n])
            .collect();
        Ok(WaveletTensor { coeffs, ..self.clone() })
    }

    /// Rows too short to have any point inside the cone of influence.
    pub fn short_rows(&self) -> Vec<usize> {
        cone_of_influence(&self.grid, self.n_times, self.sample_rate, self.cycles).empty_rows()
    }

    /// True if both tensors share grid, sample rate and length.
    pub(crate) fn check_compatible(&self, other: &WaveletTensor) -> Result<()> {
        if self.grid != other.grid || self.sample_rate != other.sample_rate {
            return Err(Error::GridMismatch);
        }
        if self.n_times != other.n_times {
            return Err(Error::LengthMismatch(self.n_times, other.n_times));
        }
        Ok(())
    }
}

/// Wavelet scale in seconds for a row frequency.
pub fn scale_for(frequency: f64, cycles: f64) -> f64 {
    cycles / (2.0 * PI * frequency)
}

/// E-folding time `√2 · s` of the Morlet wavelet at `frequency`.
pub fn efolding_time(frequency: f64, cycles: f64) -> f64 {
    SQRT_2 * scale_for(frequency, cycles)
}

/// One-sided frequency response, peak 1 at `2π·frequency`.
pub fn morlet_response(omega: f64, frequency: f64, cycles: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let x = scale_for(frequency, cycles) * omega - cycles;
    (-0.5 * x * x).exp()
}

/// Transforms every channel of `series` onto `grid`.
pub fn analytic_cwt(series: &MultiChannelSeries, grid: &FrequencyGrid, cycles: f64) -> Result<WaveletTensor> {
    if !(cycles.is_finite() && cycles >= MIN_CYCLES) {
        return Err(Error::BadCycles(cycles));
    }
    let fs = series.sample_rate();
    if grid.fmax() > fs / 2.0 {
        return Err(Error::NyquistExceeded {
            fmax: grid.fmax(),
            nyquist: fs / 2.0,
        });
    }
    let n_times = series.n_times();
    let n_ch = series.n_channels();
    let padded = (2 * n_times).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(padded);
    let inverse = planner.plan_fft_inverse(padded);

    let spectra: Vec<Vec<Complex64>> = (0..n_ch)
        .into_par_iter()
        .map(|j| {
            let column = series.column(j);
            let mean = column.iter().sum::<f64>() / n_times as f64;
            let mut buf = vec![Complex64::new(0.0, 0.0); padded];
            for (b, x) in buf.iter_mut().zip(&column) {
                b.re = x - mean;
            }
            forward.process(&mut buf);
            buf
        })
        .collect();

    let bin_omega = 2.0 * PI * fs / padded as f64;
    let half = padded / 2;
    let norm = 1.0 / padded as f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len() * n_times * n_ch];
    coeffs
        .par_chunks_mut(n_times * n_ch)
        .zip(grid.frequencies().par_iter())
        .for_each(|(row, &freq)| {
            let gain: Vec<f64> = (0..=half)
                .map(|k| {
                    let analytic = if k == half { 1.0 } else { 2.0 };
                    analytic * morlet_response(k as f64 * bin_omega, freq, cycles)
                })
                .collect();
            let mut buf = vec![Complex64::new(0.0, 0.0); padded];
            for (j, spectrum) in spectra.iter().enumerate() {
                buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
                for (k, g) in gain.iter().enumerate() {
                    buf[k] = spectrum[k] * *g;
                }
                inverse.process(&mut buf);
                for t in 0..n_times {
                    row[t * n_ch + j] = buf[t] * norm;
                }
            }
        });

    Ok(WaveletTensor {
        coeffs,
        grid: grid.clone(),
        sample_rate: fs,
        n_times,
        channel_names: series.channel_names().to_vec(),
        cycles,
    })
}

/// Boolean F×T map of points unaffected by edge effects.
#[derive(Clone, Debug, PartialEq)]
pub struct CoiMask {
    inside: Vec<bool>,
    n_times: usize,
    efolding_seconds: Vec<f64>,
}

/// Marks `(f, t)` inside when its distance in seconds from both record edges
/// exceeds the e-folding time at `f`.
pub fn cone_of_influence(grid: &FrequencyGrid, n_times: usize, sample_rate: f64, cycles: f64) -> CoiMask {
    let efolding_seconds: Vec<f64> = grid.frequencies().iter().map(|&f| efolding_time(f, cycles)).collect();
    let mut inside = Vec::with_capacity(grid.len() * n_times);
    for &e in &efolding_seconds {
        for i in 0..n_times {
            let from_start = i as f64 / sample_rate;
            let from_end = (n_times - 1 - i) as f64 / sample_rate;
            inside.push(from_start > e && from_end > e);
        }
    }
    CoiMask {
        inside,
        n_times,
        efolding_seconds,
    }
}

impl CoiMask {
    /// Rebuilds a mask from stored rows, checking shape and row contiguity.
    pub fn from_parts(inside: Vec<bool>, n_times: usize, efolding_seconds: Vec<f64>) -> Result<Self> {
        if inside.len() != n_times * efolding_seconds.len() {
            return Err(Error::ShapeMismatch(format!(
                "mask has {} cells, expected {}x{}",
                inside.len(),
                efolding_seconds.len(),
                n_times
            )));
        }
        let mask = CoiMask {
            inside,
            n_times,
            efolding_seconds,
        };
        for f in 0..mask.n_freqs() {
            let row = mask.row(f);
            let Some(first) = row.iter().position(|&b| b) else {
                continue;
            };
            let last = row.iter().rposition(|&b| b).unwrap_or(first);
            if row[first..=last].iter().any(|&b| !b) {
                return Err(Error::ShapeMismatch(format!("mask row {f} is not contiguous")));
            }
        }
        Ok(mask)
    }

    pub fn n_freqs(&self) -> usize {
        self.efolding_seconds.len()
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn efolding_seconds(&self) -> &[f64] {
        &self.efolding_seconds
    }

    pub fn cells(&self) -> &[bool] {
        &self.inside
    }

    pub fn row(&self, f: usize) -> &[bool] {
        &self.inside[f * self.n_times..(f + 1) * self.n_times]
    }

    pub fn is_inside(&self, f: usize, t: usize) -> bool {
        self.inside[f * self.n_times + t]
    }

    /// Contiguous inside interval of row `f`, if any.
    pub fn interval(&self, f: usize) -> Option<Range<usize>> {
        let row = self.row(f);
        let first = row.iter().position(|&b| b)?;
        let last = row.iter().rposition(|&b| b)?;
        Some(first..last + 1)
    }

    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.n_freqs()).filter(|&f| self.interval(f).is_none()).collect()
    }
}
