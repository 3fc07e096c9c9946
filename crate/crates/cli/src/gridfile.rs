//! Text grid files.
//!
//! ```text
//! GXWT-GRID 1
//! kind complex
//! rows 3
//! cols 4
//! sample_rate 1.0000000000000000e2
//! ...
//! frequencies 5.0000000000000000e-1 1.0000000000000000e0 2.0000000000000000e0
//! data
//! <rows lines of cols whitespace-separated values>
//! ```
//!
//! Complex values are written `re±imi`, real values as plain decimals and
//! mask cells as `0`/`1`. Every float uses 17 significant digits, which
//! round-trips `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use gxwt_core::cwt::efolding_time;
use gxwt_core::{
    CoiMask, CoiPolicy, Complex64, ContributionTensor, FrequencyGrid, GxwtGrid, Side, Variant, WaveletTensor,
};

pub const MAGIC: &str = "GXWT-GRID 1";

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("grid file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("grid file: {0}")]
    Invalid(String),
    #[error("grid file I/O: {0}")]
    Io(#[from] std::io::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> GridError {
    GridError::Syntax { line, msg: msg.into() }
}

fn invalid(msg: impl Into<String>) -> GridError {
    GridError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Complex,
    Real,
    Mask,
}

impl GridKind {
    fn as_str(self) -> &'static str {
        match self {
            GridKind::Complex => "complex",
            GridKind::Real => "real",
            GridKind::Mask => "mask",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
    Mask(Vec<bool>),
}

impl Payload {
    pub fn kind(&self) -> GridKind {
        match self {
            Payload::Complex(_) => GridKind::Complex,
            Payload::Real(_) => GridKind::Real,
            Payload::Mask(_) => GridKind::Mask,
        }
    }

    fn len(&self) -> usize {
        match self {
            Payload::Complex(v) => v.len(),
            Payload::Real(v) => v.len(),
            Payload::Mask(v) => v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMeta {
    pub n_freqs: usize,
    pub n_times: usize,
    pub sample_rate: f64,
    pub fmin: f64,
    pub fmax: f64,
    pub voices: u32,
    pub cycles: f64,
    pub frequencies: Vec<f64>,
    pub variant: Option<Variant>,
    pub n_x: Option<usize>,
    pub n_y: Option<usize>,
    pub coi_policy: Option<CoiPolicy>,
    pub channel: Option<String>,
    pub side: Option<Side>,
    /// Per-row e-folding times in seconds (mask grids).
    pub efolding: Option<Vec<f64>>,
}

impl GridMeta {
    fn for_grid(grid: &FrequencyGrid, n_times: usize, sample_rate: f64, cycles: f64) -> Self {
        Self {
            n_freqs: grid.len(),
            n_times,
            sample_rate,
            fmin: grid.fmin(),
            fmax: grid.fmax(),
            voices: grid.voices_per_octave(),
            cycles,
            frequencies: grid.frequencies().to_vec(),
            variant: None,
            n_x: None,
            n_y: None,
            coi_policy: None,
            channel: None,
            side: None,
            efolding: None,
        }
    }

    /// Rebuilds the frequency grid and checks it against the stored axis.
    pub fn frequency_grid(&self) -> Result<FrequencyGrid, GridError> {
        let grid = FrequencyGrid::new(self.fmin, self.fmax, self.voices).map_err(|e| invalid(e.to_string()))?;
        if grid.frequencies() != self.frequencies.as_slice() {
            return Err(invalid("stored frequencies do not match fmin/fmax/voices"));
        }
        Ok(grid)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFile {
    pub meta: GridMeta,
    pub payload: Payload,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_complex(out: &mut String, c: Complex64) {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    let _ = write!(out, "{:.16e}{sign}{:.16e}i", c.re, c.im.abs());
}

fn side_str(s: Side) -> &'static str {
    match s {
        Side::X => "x",
        Side::Y => "y",
    }
}

impl GridFile {
    pub fn from_gxwt(g: &GxwtGrid, coi_policy: Option<CoiPolicy>) -> Self {
        let mut meta = GridMeta::for_grid(g.grid(), g.n_times(), g.sample_rate(), g.cycles());
        meta.variant = Some(g.variant());
        meta.n_x = Some(g.n_x());
        meta.n_y = Some(g.n_y());
        meta.coi_policy = coi_policy;
        GridFile {
            meta,
            payload: Payload::Complex(g.values().to_vec()),
        }
    }

    /// One channel of a wavelet tensor.
    pub fn from_wavelet_channel(w: &WaveletTensor, channel: usize) -> Self {
        let mut meta = GridMeta::for_grid(w.grid(), w.n_times(), w.sample_rate(), w.cycles());
        meta.channel = Some(w.channel_names()[channel].clone());
        GridFile {
            meta,
            payload: Payload::Complex(w.channel_plane(channel)),
        }
    }

    pub fn from_contribution(c: &ContributionTensor, channel: usize, sample_rate: f64, cycles: f64) -> Self {
        let mut meta = GridMeta::for_grid(c.grid(), c.n_times(), sample_rate, cycles);
        meta.channel = Some(c.channel_names()[channel].clone());
        meta.side = Some(c.side());
        GridFile {
            meta,
            payload: Payload::Real(c.channel_plane(channel)),
        }
    }

    pub fn from_mask(mask: &CoiMask, grid: &FrequencyGrid, sample_rate: f64, cycles: f64) -> Self {
        let mut meta = GridMeta::for_grid(grid, mask.n_times(), sample_rate, cycles);
        meta.efolding = Some(mask.efolding_seconds().to_vec());
        GridFile {
            meta,
            payload: Payload::Mask(mask.cells().to_vec()),
        }
    }

    /// Plain F×T flags, e.g. contribution validity.
    pub fn from_flags(flags: Vec<bool>, grid: &FrequencyGrid, n_times: usize, sample_rate: f64, cycles: f64) -> Self {
        GridFile {
            meta: GridMeta::for_grid(grid, n_times, sample_rate, cycles),
            payload: Payload::Mask(flags),
        }
    }

    pub fn to_gxwt(&self) -> Result<GxwtGrid, GridError> {
        let Payload::Complex(values) = &self.payload else {
            return Err(invalid("expected a complex grid"));
        };
        let m = &self.meta;
        let (Some(variant), Some(n_x), Some(n_y)) = (m.variant, m.n_x, m.n_y) else {
            return Err(invalid("not a transform grid (variant, n_x and n_y are required)"));
        };
        GxwtGrid::from_parts(
            values.clone(),
            m.frequency_grid()?,
            m.sample_rate,
            m.n_times,
            n_x,
            n_y,
            variant,
            m.cycles,
        )
        .map_err(|e| invalid(e.to_string()))
    }

    pub fn to_mask(&self) -> Result<CoiMask, GridError> {
        let Payload::Mask(cells) = &self.payload else {
            return Err(invalid("expected a mask grid"));
        };
        let efolding = self.meta.efolding.clone().unwrap_or_else(|| {
            let cycles = self.meta.cycles;
            self.meta
                .frequencies
                .iter()
                .map(|&f| efolding_time(f, cycles))
                .collect()
        });
        CoiMask::from_parts(cells.clone(), self.meta.n_times, efolding).map_err(|e| invalid(e.to_string()))
    }

    pub fn write_string(&self) -> Result<String, GridError> {
        let m = &self.meta;
        if self.payload.len() != m.n_freqs * m.n_times || m.frequencies.len() != m.n_freqs {
            return Err(invalid("payload does not match declared shape"));
        }
        if let Some(name) = &m.channel {
            if name.trim() != name || name.is_empty() || name.contains(['\n', '\r']) {
                return Err(invalid(format!("channel name {name:?} cannot be stored")));
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "kind {}", self.payload.kind().as_str());
        let _ = writeln!(out, "rows {}", m.n_freqs);
        let _ = writeln!(out, "cols {}", m.n_times);
        let _ = writeln!(out, "sample_rate {}", fmt_f64(m.sample_rate));
        let _ = writeln!(out, "fmin {}", fmt_f64(m.fmin));
        let _ = writeln!(out, "fmax {}", fmt_f64(m.fmax));
        let _ = writeln!(out, "voices {}", m.voices);
        let _ = writeln!(out, "cycles {}", fmt_f64(m.cycles));
        if let Some(v) = m.variant {
            let _ = writeln!(out, "variant {}", v.as_str());
        }
        if let Some(n) = m.n_x {
            let _ = writeln!(out, "n_x {n}");
        }
        if let Some(n) = m.n_y {
            let _ = writeln!(out, "n_y {n}");
        }
        if let Some(p) = m.coi_policy {
            let _ = writeln!(out, "coi_policy {}", p.as_str());
        }
        if let Some(name) = &m.channel {
            let _ = writeln!(out, "channel {name}");
        }
        if let Some(s) = m.side {
            let _ = writeln!(out, "side {}", side_str(s));
        }
        let list = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "frequencies {}", list(&m.frequencies));
        if let Some(e) = &m.efolding {
            let _ = writeln!(out, "efolding {}", list(e));
        }
        out.push_str("data\n");
        for f in 0..m.n_freqs {
            let cells = f * m.n_times..(f + 1) * m.n_times;
            for (i, idx) in cells.enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match &self.payload {
                    Payload::Complex(v) => fmt_complex(&mut out, v[idx]),
                    Payload::Real(v) => out.push_str(&fmt_f64(v[idx])),
                    Payload::Mask(v) => out.push(if v[idx] { '1' } else { '0' }),
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GridError> {
        std::fs::write(path, self.write_string()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let bytes = std::fs::read(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|_| invalid("not UTF-8"))?;
        parse(text)
    }
}

fn parse_float(tok: &str, line: usize) -> Result<f64, GridError> {
    let v: f64 = tok.parse().map_err(|_| syntax(line, format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("non-finite number {tok:?}")));
    }
    Ok(v)
}

fn parse_complex(tok: &str, line: usize) -> Result<Complex64, GridError> {
    let err = || syntax(line, format!("bad complex value {tok:?}"));
    let body = tok.strip_suffix('i').ok_or_else(err)?;
    // The imaginary sign is the last +/- not opening the token or an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(err)?;
    let re = parse_float(&body[..split], line)?;
    let im_abs = parse_float(&body[split + 1..], line)?;
    if body[split + 1..].starts_with(['+', '-']) {
        return Err(err());
    }
    let im = if bytes[split] == b'-' { -im_abs } else { im_abs };
    Ok(Complex64::new(re, im))
}

fn parse_count(v: &str, line: usize) -> Result<usize, GridError> {
    v.parse().map_err(|_| syntax(line, format!("bad count {v:?}")))
}

/// Parses a grid file. Never allocates from declared sizes before the data
/// confirms them.
pub fn parse(text: &str) -> Result<GridFile, GridError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim_end() == MAGIC => {}
        _ => return Err(syntax(1, format!("expected {MAGIC:?}"))),
    }
    let mut kind = None;
    let (mut rows, mut cols) = (None, None);
    let (mut sample_rate, mut fmin, mut fmax, mut voices, mut cycles) = (None, None, None, None, None);
    let (mut variant, mut n_x, mut n_y, mut coi_policy, mut channel, mut side) = (None, None, None, None, None, None);
    let (mut frequencies, mut efolding) = (None, None);
    let mut seen = Vec::new();
    let mut data_line = None;
    for (ln, raw) in lines.by_ref() {
        let l = raw.trim();
        if l == "data" {
            data_line = Some(ln);
            break;
        }
        let (key, value) = l
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(ln, "expected `key value`"))?;
        let value = value.trim();
        if seen.contains(&key) {
            return Err(syntax(ln, format!("duplicate key {key:?}")));
        }
        seen.push(key);
        let floats = |v: &str| {
            v.split_whitespace()
                .map(|t| parse_float(t, ln))
                .collect::<Result<Vec<_>, _>>()
        };
        match key {
            "kind" => {
                kind = Some(match value {
                    "complex" => GridKind::Complex,
                    "real" => GridKind::Real,
                    "mask" => GridKind::Mask,
                    _ => return Err(syntax(ln, format!("unknown kind {value:?}"))),
                })
            }
            "rows" => rows = Some(parse_count(value, ln)?),
            "cols" => cols = Some(parse_count(value, ln)?),
            "sample_rate" => sample_rate = Some(parse_float(value, ln)?),
            "fmin" => fmin = Some(parse_float(value, ln)?),
            "fmax" => fmax = Some(parse_float(value, ln)?),
            "voices" => voices = Some(value.parse::<u32>().map_err(|_| syntax(ln, "bad voices"))?),
            "cycles" => cycles = Some(parse_float(value, ln)?),
            "variant" => variant = Some(value.parse::<Variant>().map_err(|e| syntax(ln, e.to_string()))?),
            "n_x" => n_x = Some(parse_count(value, ln)?),
            "n_y" => n_y = Some(parse_count(value, ln)?),
            "coi_policy" => coi_policy = Some(value.parse::<CoiPolicy>().map_err(|e| syntax(ln, e))?),
            "channel" => channel = Some(value.to_owned()),
            "side" => {
                side = Some(match value {
                    "x" => Side::X,
                    "y" => Side::Y,
                    _ => return Err(syntax(ln, format!("unknown side {value:?}"))),
                })
            }
            "frequencies" => frequencies = Some(floats(value)?),
            "efolding" => efolding = Some(floats(value)?),
            _ => return Err(syntax(ln, format!("unknown key {key:?}"))),
        }
    }
    let data_line = data_line.ok_or_else(|| invalid("missing `data` line"))?;
    let missing = |k: &str| invalid(format!("missing key {k:?}"));
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let n_freqs = rows.ok_or_else(|| missing("rows"))?;
    let n_times = cols.ok_or_else(|| missing("cols"))?;
    let sample_rate = sample_rate.ok_or_else(|| missing("sample_rate"))?;
    let frequencies: Vec<f64> = frequencies.ok_or_else(|| missing("frequencies"))?;
    if n_freqs == 0 || n_times == 0 {
        return Err(invalid("empty grid"));
    }
    if sample_rate <= 0.0 {
        return Err(invalid("sample_rate must be positive"));
    }
    if frequencies.len() != n_freqs {
        return Err(invalid(format!("{} frequencies for {n_freqs} rows", frequencies.len())));
    }
    if efolding.as_ref().is_some_and(|e: &Vec<f64>| e.len() != n_freqs) {
        return Err(invalid("efolding length differs from rows"));
    }
    if channel.as_ref().is_some_and(|c: &String| c.is_empty()) {
        return Err(invalid("empty channel name"));
    }
    let meta = GridMeta {
        n_freqs,
        n_times,
        sample_rate,
        fmin: fmin.ok_or_else(|| missing("fmin"))?,
        fmax: fmax.ok_or_else(|| missing("fmax"))?,
        voices: voices.ok_or_else(|| missing("voices"))?,
        cycles: cycles.ok_or_else(|| missing("cycles"))?,
        frequencies,
        variant,
        n_x,
        n_y,
        coi_policy,
        channel,
        side,
        efolding,
    };
    let mut payload = match kind {
        GridKind::Complex => Payload::Complex(Vec::new()),
        GridKind::Real => Payload::Real(Vec::new()),
        GridKind::Mask => Payload::Mask(Vec::new()),
    };
    let mut n_rows = 0usize;
    for (ln, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        if n_rows == n_freqs {
            return Err(syntax(ln, "more data rows than declared"));
        }
        let mut n = 0usize;
        for tok in raw.split_whitespace() {
            n += 1;
            if n > n_times {
                return Err(syntax(ln, format!("more than {n_times} values")));
            }
            match &mut payload {
                Payload::Complex(v) => v.push(parse_complex(tok, ln)?),
                Payload::Real(v) => v.push(parse_float(tok, ln)?),
                Payload::Mask(v) => v.push(match tok {
                    "0" => false,
                    "1" => true,
                    _ => return Err(syntax(ln, format!("bad mask cell {tok:?}"))),
                }),
            }
        }
        if n != n_times {
            return Err(syntax(ln, format!("{n} values, expected {n_times}")));
        }
        n_rows += 1;
    }
    if n_rows != n_freqs {
        return Err(syntax(data_line, format!("{n_rows} data rows, expected {n_freqs}")));
    }
    Ok(GridFile { meta, payload })
}
