//! Uniformly sampled multichannel time series and CSV ingestion.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::selector::ChannelSelector;

/// Maximum relative deviation of a time step from the median step.
pub const MAX_TIME_JITTER: f64 = 1e-6;

/// Three columns forming one 3-D marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelTriple {
    pub name: String,
    pub columns: [usize; 3],
}

/// A real-valued T×N signal sampled at a fixed rate.
///
/// Samples are stored row-major: `samples[t * n_channels + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiChannelSeries {
    samples: Vec<f64>,
    n_times: usize,
    sample_rate: f64,
    channel_names: Vec<String>,
    triples: Vec<ChannelTriple>,
}

/// How the sample rate of a CSV file is determined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateSpec {
    Hz(f64),
    /// `1 / median(Δt)` of the time column.
    FromTimeColumn,
}

impl MultiChannelSeries {
    /// Builds a series from row-major samples.
    pub fn new(samples: Vec<f64>, sample_rate: f64, channel_names: Vec<String>) -> Result<Self> {
        let n = channel_names.len();
        if n == 0 {
            return Err(Error::InvalidSeries("no channels".into()));
        }
        if !samples.len().is_multiple_of(n) {
            return Err(Error::InvalidSeries(format!(
                "{} samples is not a multiple of {} channels",
                samples.len(),
                n
            )));
        }
        let n_times = samples.len() / n;
        if n_times < 2 {
            return Err(Error::TooShort { len: n_times, min: 2 });
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidSeries(format!(
                "sample rate {sample_rate} must be positive"
            )));
        }
        check_names(&channel_names)?;
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite sample at time {}, channel {}",
                pos / n,
                channel_names[pos % n]
            )));
        }
        Ok(Self {
            samples,
            n_times,
            sample_rate,
            channel_names,
            triples: Vec::new(),
        })
    }

    /// Builds a series from one vector per channel.
    pub fn from_columns(columns: &[Vec<f64>], sample_rate: f64, channel_names: Vec<String>) -> Result<Self> {
        if columns.len() != channel_names.len() {
            return Err(Error::InvalidSeries(format!(
                "{} columns but {} names",
                columns.len(),
                channel_names.len()
            )));
        }
        let n_times = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_times) {
            return Err(Error::InvalidSeries("columns have different lengths".into()));
        }
        let mut samples = Vec::with_capacity(n_times * columns.len());
        for t in 0..n_times {
            samples.extend(columns.iter().map(|c| c[t]));
        }
        Self::new(samples, sample_rate, channel_names)
    }

    /// Attaches 3-D marker groupings.
    pub fn with_triples(mut self, triples: Vec<ChannelTriple>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut names = HashSet::new();
        for tr in &triples {
            if tr.name.is_empty() || !names.insert(tr.name.as_str()) {
                return Err(Error::InvalidSeries(format!(
                    "bad or duplicate triple name {:?}",
                    tr.name
                )));
            }
            for &c in &tr.columns {
                if c >= self.n_channels() {
                    return Err(Error::InvalidSeries(format!(
                        "triple {} references column {c} of {}",
                        tr.name,
                        self.n_channels()
                    )));
                }
                if !seen.insert(c) {
                    return Err(Error::InvalidSeries(format!(
                        "column {c} appears in more than one triple"
                    )));
                }
            }
        }
        self.triples = triples;
        Ok(self)
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn triples(&self) -> &[ChannelTriple] {
        &self.triples
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample(&self, t: usize, channel: usize) -> f64 {
        self.samples[t * self.n_channels() + channel]
    }

    /// One time step across all channels.
    pub fn row(&self, t: usize) -> &[f64] {
        let n = self.n_channels();
        &self.samples[t * n..(t + 1) * n]
    }

    pub fn column(&self, channel: usize) -> Vec<f64> {
        let n = self.n_channels();
        self.samples.iter().skip(channel).step_by(n).copied().collect()
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channel_names.iter().position(|n| n == name)
    }

    /// Returns a copy with every sample transformed by `f(t, channel, value)`.
    pub fn map_samples(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let n = self.n_channels();
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i / n, i % n, v))
            .collect();
        Self::new(samples, self.sample_rate, self.channel_names.clone())?.with_triples(self.triples.clone())
    }
}

fn check_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if name.trim().is_empty() {
            return Err(Error::HeaderParse("empty channel name".into()));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::HeaderParse(format!("duplicate channel name {name:?}")));
        }
    }
    Ok(())
}

/// Reads a series from a CSV file.
pub fn load_csv(path: impl AsRef<Path>, rate: RateSpec, time_column: Option<&str>) -> Result<MultiChannelSeries> {
    let path = path.as_ref();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFile(path.to_owned())),
        Err(e) => return Err(e.into()),
    };
    parse_csv(&text, rate, time_column)
}

/// Parses CSV text: one header row of unique names, then numeric rows.
pub fn parse_csv(text: &str, rate: RateSpec, time_column: Option<&str>) -> Result<MultiChannelSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    check_names(&header)?;

    let time_idx = match time_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::HeaderParse(format!("time column {name:?} not found")))?,
        ),
        None => None,
    };
    if rate == RateSpec::FromTimeColumn && time_idx.is_none() {
        return Err(Error::HeaderParse(
            "sample rate from time column requested but none named".into(),
        ));
    }
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != time_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if names.is_empty() {
        return Err(Error::HeaderParse("no data columns".into()));
    }

    let mut samples = Vec::new();
    let mut times = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (col, cell) in record.iter().enumerate() {
            let value = parse_cell(cell).ok_or_else(|| Error::NonNumericCell {
                row: line,
                col: col + 1,
                value: cell.to_owned(),
            })?;
            if Some(col) == time_idx {
                times.push(value);
            } else {
                samples.push(value);
            }
        }
    }
    let n_times = samples.len() / names.len();
    if n_times < 2 {
        return Err(Error::TooShort { len: n_times, min: 2 });
    }

    let sample_rate = if time_idx.is_some() {
        let step = uniform_step(&times)?;
        match rate {
            RateSpec::Hz(hz) => hz,
            RateSpec::FromTimeColumn => 1.0 / step,
        }
    } else {
        match rate {
            RateSpec::Hz(hz) => hz,
            RateSpec::FromTimeColumn => unreachable!(),
        }
    };
    MultiChannelSeries::new(samples, sample_rate, names)
}

fn parse_cell(cell: &str) -> Option<f64> {
    // Rust accepts "inf"/"nan" spellings; only finite decimals are valid here.
    let v: f64 = cell.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Median time step, after checking strict monotonicity and jitter.
fn uniform_step(times: &[f64]) -> Result<f64> {
    let mut steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().any(|&d| d <= 0.0) {
        return Err(Error::NonUniformSampling {
            max_jitter: f64::INFINITY,
        });
    }
    let mut sorted = steps.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    steps.iter_mut().for_each(|d| *d = (*d - median).abs() / median);
    let max_jitter = steps.iter().copied().fold(0.0, f64::max);
    if max_jitter > MAX_TIME_JITTER {
        return Err(Error::NonUniformSampling { max_jitter });
    }
    Ok(median)
}

/// Writes the series as CSV, optionally with a leading time column in seconds.
///
/// Numbers use the shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(series: &MultiChannelSeries, mut out: W, time_column: Option<&str>) -> Result<()> {
    let mut header: Vec<&str> = Vec::with_capacity(series.n_channels() + 1);
    if let Some(name) = time_column {
        if series.channel_index(name).is_some() {
            return Err(Error::HeaderParse(format!(
                "time column {name:?} collides with a channel name"
            )));
        }
        header.push(name);
    }
    header.extend(series.channel_names().iter().map(String::as_str));
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for t in 0..series.n_times() {
        line.clear();
        if time_column.is_some() {
            line.push_str(&format!("{:e}", t as f64 / series.sample_rate()));
        }
        for (j, v) in series.row(t).iter().enumerate() {
            if j > 0 || time_column.is_some() {
                line.push(',');
            }
            line.push_str(&format!("{v:e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_csv(series: &MultiChannelSeries, path: impl AsRef<Path>, time_column: Option<&str>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv(series, &mut buf, time_column)?;
    buf.flush()?;
    Ok(())
}

/// Extracts the columns named by `sel`, in selector order.
///
/// Triples survive only if all three of their columns are selected.
pub fn select_channels(series: &MultiChannelSeries, sel: &ChannelSelector) -> Result<MultiChannelSeries> {
    let cols = sel.resolve(series)?;
    let n = series.n_channels();
    let mut samples = Vec::with_capacity(series.n_times() * cols.len());
    for t in 0..series.n_times() {
        let row = &series.samples[t * n..(t + 1) * n];
        samples.extend(cols.iter().map(|&c| row[c]));
    }
    let names = cols.iter().map(|&c| series.channel_names[c].clone()).collect();
    let new_pos = |c: usize| cols.iter().position(|&k| k == c);
    let triples = series
        .triples
        .iter()
        .filter_map(|tr| {
            let [a, b, c] = tr.columns;
            Some(ChannelTriple {
                name: tr.name.clone(),
                columns: [new_pos(a)?, new_pos(b)?, new_pos(c)?],
            })
        })
        .collect();
    MultiChannelSeries::new(samples, series.sample_rate, names)?.with_triples(triples)
}
