//! Summaries of a transform grid: interaction spectra, band phase and
//! leader/follower sign maps.

use std::f64::consts::PI;
use std::io::Write;

use crate::cwt::{CoiMask, FrequencyGrid};
use crate::error::{Error, Result};
use crate::gxwt::GxwtGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoiPolicy {
    AllPoints,
    #[default]
    CoiOnly,
}

impl CoiPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            CoiPolicy::AllPoints => "all-points",
            CoiPolicy::CoiOnly => "coi-only",
        }
    }
}

impl std::str::FromStr for CoiPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all-points" => Ok(CoiPolicy::AllPoints),
            "coi-only" => Ok(CoiPolicy::CoiOnly),
            other => Err(format!("unknown COI policy {other:?}")),
        }
    }
}

fn check_mask(g: &GxwtGrid, mask: Option<&CoiMask>) -> Result<CoiPolicy> {
    match mask {
        None => Ok(CoiPolicy::AllPoints),
        Some(m) if m.n_freqs() == g.n_freqs() && m.n_times() == g.n_times() => Ok(CoiPolicy::CoiOnly),
        Some(m) => Err(Error::ShapeMismatch(format!(
            "mask {}x{} vs grid {}x{}",
            m.n_freqs(),
            m.n_times(),
            g.n_freqs(),
            g.n_times()
        ))),
    }
}

/// Temporal mean of `|c|` per frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionSpectrum {
    /// `None` where no time point was admitted.
    pub values: Vec<Option<f64>>,
    pub grid: FrequencyGrid,
    pub coi_policy: CoiPolicy,
    pub valid_counts: Vec<usize>,
}

/// Mean modulus over time for each frequency row; with a mask only inside
/// points are averaged.
pub fn interaction_spectrum(g: &GxwtGrid, mask: Option<&CoiMask>) -> Result<InteractionSpectrum> {
    let coi_policy = check_mask(g, mask)?;
    let mut values = Vec::with_capacity(g.n_freqs());
    let mut valid_counts = Vec::with_capacity(g.n_freqs());
    for f in 0..g.n_freqs() {
        let (mut sum, mut n) = (0.0, 0usize);
        for (t, c) in g.row(f).iter().enumerate() {
            if mask.is_none_or(|m| m.is_inside(f, t)) {
                sum += c.norm();
                n += 1;
            }
        }
        values.push((n > 0).then(|| sum / n as f64));
        valid_counts.push(n);
    }
    Ok(InteractionSpectrum {
        values,
        grid: g.grid().clone(),
        coi_policy,
        valid_counts,
    })
}

impl InteractionSpectrum {
    /// Grid row with the largest value.
    pub fn peak_index(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, _)| i)
    }

    /// Two-column CSV (`frequency_hz,value`) preceded by `#` comment lines
    /// holding the COI policy and per-row valid counts. Absent rows are `NA`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# coi_policy: {}", self.coi_policy.as_str())?;
        let counts: Vec<String> = self.valid_counts.iter().map(usize::to_string).collect();
        writeln!(out, "# valid_counts: {}", counts.join(" "))?;
        writeln!(out, "frequency_hz,value")?;
        for (f, v) in self.grid.frequencies().iter().zip(&self.values) {
            match v {
                Some(v) => writeln!(out, "{f:.16e},{v:.16e}")?,
                None => writeln!(out, "{f:.16e},NA")?,
            }
        }
        Ok(())
    }
}

/// Circular summary of the transform phase over a frequency band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseBandSummary {
    pub band: (f64, f64),
    /// In `(-π/2, π/2]`.
    pub mean_phase: f64,
    /// Mean resultant length of the doubled angles, in `[0, 1]`.
    pub resultant_length: f64,
    pub coi_policy: CoiPolicy,
    pub n_points: usize,
}

/// Circular mean of `arg(c)` over the rows with `lo <= f <= hi`.
///
/// Phases are defined modulo π, so angles are doubled before averaging and the
/// mean direction is halved afterwards. Points with `c = 0` carry no phase and
/// are skipped.
pub fn phase_band_summary(g: &GxwtGrid, band: (f64, f64), mask: Option<&CoiMask>) -> Result<PhaseBandSummary> {
    let coi_policy = check_mask(g, mask)?;
    let (lo, hi) = band;
    let rows: Vec<usize> = g
        .grid()
        .frequencies()
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f >= lo && f <= hi)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyBand { lo, hi });
    }
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for &f in &rows {
        for (t, c) in g.row(f).iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            if mask.is_none_or(|m| m.is_inside(f, t)) {
                let doubled = 2.0 * c.im.atan2(c.re);
                sx += doubled.cos();
                sy += doubled.sin();
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::NoValidPoints);
    }
    let mut mean = sy.atan2(sx);
    if mean <= -PI {
        mean = PI;
    }
    Ok(PhaseBandSummary {
        band,
        mean_phase: mean / 2.0,
        resultant_length: (sx.hypot(sy) / n as f64).min(1.0),
        coi_policy,
        n_points: n,
    })
}

/// `sign(Im c)` per point; `+1` where the first series leads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMap {
    pub values: Vec<i8>,
    pub n_freqs: usize,
    pub n_times: usize,
}

impl SignMap {
    pub fn get(&self, f: usize, t: usize) -> i8 {
        self.values[f * self.n_times + t]
    }
}

pub fn leader_sign_map(g: &GxwtGrid) -> SignMap {
    let values = g
        .values()
        .iter()
        .map(|c| match c.im.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        })
        .collect();
    SignMap {
        values,
        n_freqs: g.n_freqs(),
        n_times: g.n_times(),
    }
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        // Ties share the average of their 1-based ranks.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation of two equal-length samples.
///
/// Returns `None` for mismatched lengths, fewer than two points, or a
/// constant sample.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}
