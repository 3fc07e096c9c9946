//! Dependency-free SVG heatmaps of grid files.

use std::fmt::Write as _;

use crate::gridfile::{GridFile, Payload};

/// Diverging table, blue (negative) through white to red (positive).
pub const DIVERGING: [&str; 33] = [
    "#053061", "#0e4179", "#175290", "#1f63a8", "#2a71b2", "#3480b9", "#3f8ec0", "#529dc8", "#6bacd1", "#84bcd9",
    "#9bc9e0", "#aed3e6", "#c2ddec", "#d4e6f1", "#e0ecf3", "#ecf2f5", "#f7f6f6", "#f9eee7", "#fbe5d8", "#fddcc9",
    "#fbccb4", "#f8bb9e", "#f5aa89", "#ee9677", "#e48066", "#db6b55", "#d05548", "#c53e3d", "#ba2832", "#ab162a",
    "#930e26", "#7c0722", "#67001f",
];

/// Sequential table, dark (zero) to bright (maximum).
pub const SEQUENTIAL: [&str; 33] = [
    "#440154", "#470d60", "#48186a", "#482374", "#472d7b", "#453781", "#424086", "#3e4989", "#3b528b", "#375b8d",
    "#33638d", "#2f6b8e", "#2c728e", "#297a8e", "#26828e", "#23898e", "#21918c", "#1f988b", "#1fa088", "#22a785",
    "#28ae80", "#32b67a", "#3fbc73", "#4ec36b", "#5ec962", "#70cf57", "#84d44b", "#98d83e", "#addc30", "#c2df23",
    "#d8e219", "#ece51b", "#fde725",
];

/// Most time columns drawn; longer records are averaged into bins.
pub const MAX_COLUMNS: usize = 600;

const CELL_W: f64 = 1.0;
const ROW_H: f64 = 6.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_B: f64 = 30.0;
const MARGIN_T: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Modulus,
    Real,
    Imag,
}

impl std::str::FromStr for Part {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "modulus" => Ok(Part::Modulus),
            "real" => Ok(Part::Real),
            "imag" => Ok(Part::Imag),
            other => Err(format!("unknown part {other:?} (modulus, real, imag)")),
        }
    }
}

/// Scalar F×T plane for a part, and whether it is signed.
pub fn plane(file: &GridFile, part: Part) -> (Vec<f64>, bool) {
    match &file.payload {
        Payload::Complex(v) => match part {
            Part::Modulus => (v.iter().map(|c| c.norm()).collect(), false),
            Part::Real => (v.iter().map(|c| c.re).collect(), true),
            Part::Imag => (v.iter().map(|c| c.im).collect(), true),
        },
        Payload::Real(v) => {
            let signed = v.iter().any(|x| *x < 0.0);
            match part {
                Part::Modulus => (v.iter().map(|x| x.abs()).collect(), false),
                Part::Imag => (vec![0.0; v.len()], true),
                Part::Real => (v.clone(), signed),
            }
        }
        Payload::Mask(v) => (v.iter().map(|&b| f64::from(u8::from(b))).collect(), false),
    }
}

/// Color index in a 33-entry table.
pub fn color_index(value: f64, scale: f64, signed: bool) -> usize {
    if scale.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !value.is_finite() {
        return if signed { 16 } else { 0 };
    }
    let unit = if signed {
        (value / scale + 1.0) / 2.0
    } else {
        value / scale
    };
    (unit.clamp(0.0, 1.0) * 32.0).round() as usize
}

/// Averages runs of adjacent columns so at most `MAX_COLUMNS` remain.
fn bin_columns(values: &[f64], n_rows: usize, n_cols: usize) -> (Vec<f64>, usize) {
    let bins = n_cols.min(MAX_COLUMNS);
    let mut out = Vec::with_capacity(n_rows * bins);
    for r in 0..n_rows {
        let row = &values[r * n_cols..(r + 1) * n_cols];
        for b in 0..bins {
            let (lo, hi) = (b * n_cols / bins, (b + 1) * n_cols / bins);
            out.push(row[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
        }
    }
    (out, bins)
}

pub fn render(file: &GridFile, part: Part) -> String {
    let m = &file.meta;
    let (values, signed) = plane(file, part);
    let (binned, bins) = bin_columns(&values, m.n_freqs, m.n_times);
    let scale = binned.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let table = if signed { &DIVERGING } else { &SEQUENTIAL };
    let plot_w = bins as f64 * CELL_W;
    let plot_h = m.n_freqs as f64 * ROW_H;
    let (width, height) = (MARGIN_L + plot_w + 10.0, MARGIN_T + plot_h + MARGIN_B);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let title = match part {
        Part::Modulus => "modulus",
        Part::Real => "real part",
        Part::Imag => "imaginary part",
    };
    let _ = writeln!(s, "<title>{title}, scale {scale:.6e}</title>");
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    // Row 0 is the lowest frequency and is drawn at the bottom.
    for f in 0..m.n_freqs {
        let y = MARGIN_T + (m.n_freqs - 1 - f) as f64 * ROW_H;
        for b in 0..bins {
            let color = table[color_index(binned[f * bins + b], scale, signed)];
            let x = MARGIN_L + b as f64 * CELL_W;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{ROW_H}" fill="{color}"/>"#
            );
        }
    }
    s.push_str("</g>\n");
    let font = r#"font-family="sans-serif" font-size="10""#;
    for (f, freq) in m.frequencies.iter().enumerate() {
        if f % (m.voices.max(1) as usize) == 0 {
            let y = MARGIN_T + (m.n_freqs - f) as f64 * ROW_H - ROW_H / 2.0 + 3.0;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{y}" text-anchor="end" {font}>{freq:.3} Hz</text>"#,
                MARGIN_L - 4.0
            );
        }
    }
    let duration = m.n_times as f64 / m.sample_rate;
    let axis_y = MARGIN_T + plot_h + 14.0;
    let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="{axis_y}" {font}>0 s</text>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{axis_y}" text-anchor="end" {font}>{duration:.3} s</text>"#,
        MARGIN_L + plot_w
    );
    s.push_str("</svg>\n");
    s
}
