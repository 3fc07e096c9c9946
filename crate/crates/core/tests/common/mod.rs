#![allow(dead_code)]

use std::f64::consts::PI;

use gxwt_core::{MultiChannelSeries, SelectorFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// One sinusoidal component: amplitude, frequency in Hz, phase in radians.
pub type Tone = (f64, f64, f64);

/// Each channel is a sum of tones plus optional white noise.
pub fn tones(channels: &[Vec<Tone>], rate: f64, n_times: usize, noise: f64, seed: u64) -> MultiChannelSeries {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_times * channels.len());
    for i in 0..n_times {
        let t = i as f64 / rate;
        for ch in channels {
            let clean: f64 = ch.iter().map(|&(a, f, p)| a * (2.0 * PI * f * t + p).cos()).sum();
            samples.push(clean + noise * (rng.random::<f64>() - 0.5));
        }
    }
    let names = (0..channels.len()).map(|k| format!("c{k}")).collect();
    MultiChannelSeries::new(samples, rate, names).unwrap()
}

pub fn noise(n_channels: usize, rate: f64, n_times: usize, seed: u64) -> MultiChannelSeries {
    tones(&vec![Vec::new(); n_channels], rate, n_times, 1.0, seed)
}

/// Declares consecutive channel triples `t0 = c0,c1,c2`, `t1 = c3,c4,c5`, ...
pub fn with_triples(series: MultiChannelSeries) -> MultiChannelSeries {
    let mut text = String::new();
    for k in 0..series.n_channels() / 3 {
        text.push_str(&format!("triple t{k}: c{}, c{}, c{}\n", 3 * k, 3 * k + 1, 3 * k + 2));
    }
    SelectorFile::parse(&text).unwrap().apply_triples(series).unwrap()
}

/// Rotation by `angle` about the unit axis `axis`.
pub fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let d = 1.0 - c;
    [
        [c + x * x * d, x * y * d - z * s, x * z * d + y * s],
        [y * x * d + z * s, c + y * y * d, y * z * d - x * s],
        [z * x * d - y * s, z * y * d + x * s, c + z * z * d],
    ]
}

/// Applies `r` to every declared triple of `series`.
pub fn rotate_triples(series: &MultiChannelSeries, r: &[[f64; 3]; 3]) -> MultiChannelSeries {
    let mut out = series.samples().to_vec();
    let n = series.n_channels();
    for t in 0..series.n_times() {
        let row = series.row(t);
        for tri in series.triples() {
            let v = tri.columns.map(|c| row[c]);
            for (i, &c) in tri.columns.iter().enumerate() {
                out[t * n + c] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
            }
        }
    }
    MultiChannelSeries::new(out, series.sample_rate(), series.channel_names().to_vec())
        .unwrap()
        .with_triples(series.triples().to_vec())
        .unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
