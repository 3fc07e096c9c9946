mod common;

use std::f64::consts::PI;

use common::tones;
use gxwt_core::{
    analytic_cwt, channel_contributions, cone_of_influence, gxwt, interaction_spectrum, leader_sign_map, make_grid,
    phase_band_summary, ContributionOptions, Error, FrequencyGrid, GxwtGrid, MultiChannelSeries,
};

const RATE: f64 = 50.0;
const N_TIMES: usize = 3200;

fn grid() -> FrequencyGrid {
    make_grid(0.25, 4.0, 8).unwrap()
}

fn pair(x: &MultiChannelSeries, y: &MultiChannelSeries) -> GxwtGrid {
    let g = grid();
    gxwt(&analytic_cwt(x, &g, 6.0).unwrap(), &analytic_cwt(y, &g, 6.0).unwrap()).unwrap()
}

/// 1 Hz-dominant three-channel motion, evaluated `delay` seconds late.
fn lead_motion(delay: f64) -> MultiChannelSeries {
    let chans: Vec<Vec<(f64, f64, f64)>> = (0..3)
        .map(|k| {
            let k = k as f64;
            let lag = |f: f64| -2.0 * PI * f * delay;
            vec![
                (1.0, 1.0, 0.5 * k + lag(1.0)),
                (0.2, 2.7, 1.3 * k + lag(2.7)),
                (0.15, 0.4, -k + lag(0.4)),
            ]
        })
        .collect();
    tones(&chans, RATE, N_TIMES, 0.0, 0)
}

#[test]
fn delayed_copy_marks_the_leader() {
    let (x, y) = (lead_motion(0.0), lead_motion(0.1));
    let g = grid();
    let f = g.nearest_index(1.0);
    let mask = cone_of_influence(&g, N_TIMES, RATE, 6.0);
    let share = |c: &GxwtGrid, sign: i8| {
        let map = leader_sign_map(c);
        let inside: Vec<usize> = (0..N_TIMES).filter(|&t| mask.is_inside(f, t)).collect();
        inside.iter().filter(|&&t| map.get(f, t) == sign).count() as f64 / inside.len() as f64
    };
    assert!(share(&pair(&x, &y), 1) >= 0.95);
    assert!(share(&pair(&y, &x), -1) >= 0.95);
}

#[test]
fn identical_inputs_have_no_leader() {
    let x = lead_motion(0.0);
    let map = leader_sign_map(&pair(&x, &x));
    assert!(map.values.iter().all(|&s| s == 0));
}

#[test]
fn band_phase_of_delayed_copy() {
    let (x, y) = (lead_motion(0.0), lead_motion(0.1));
    let c = pair(&x, &y);
    let mask = cone_of_influence(&grid(), N_TIMES, RATE, 6.0);
    let s = phase_band_summary(&c, (0.95, 1.05), Some(&mask)).unwrap();
    let expect = 2.0 * PI * 0.1;
    assert!((s.mean_phase - expect).abs() <= 0.05, "{}", s.mean_phase);
    assert!(s.resultant_length > 0.99);
    assert!(matches!(
        phase_band_summary(&c, (5.0, 6.0), None),
        Err(Error::EmptyBand { .. })
    ));
}

#[test]
fn contributions_peak_where_channels_synchronize() {
    // Three vertical channels at 2 Hz, three horizontal at 0.5 Hz.
    let planted = [2.0, 2.0, 2.0, 0.5, 0.5, 0.5];
    let side = |phase: f64, seed: u64| {
        let chans: Vec<Vec<(f64, f64, f64)>> = planted
            .iter()
            .enumerate()
            .map(|(k, &f)| vec![(1.0, f, phase + 0.3 * k as f64)])
            .collect();
        tones(&chans, RATE, N_TIMES, 0.3, seed)
    };
    let (x, y) = (side(0.0, 1), side(0.8, 2));
    let g = grid();
    let (u, v) = (analytic_cwt(&x, &g, 6.0).unwrap(), analytic_cwt(&y, &g, 6.0).unwrap());
    let c = gxwt(&u, &v).unwrap();
    let contrib = channel_contributions(&u, &v, &c, ContributionOptions::default()).unwrap();
    let mask = cone_of_influence(&g, N_TIMES, RATE, 6.0);
    let step = (1.0 / 8.0f64).exp2();
    for tensor in [&contrib.x, &contrib.y] {
        for (k, &f0) in planted.iter().enumerate() {
            let profile = tensor.mean_over_time(k, Some(&mask));
            let best = (0..g.len())
                .max_by(|&a, &b| profile[a].unwrap().total_cmp(&profile[b].unwrap()))
                .unwrap();
            let ratio = g.frequencies()[best] / f0;
            assert!(
                ratio <= step * 1.0001 && ratio >= 1.0 / step / 1.0001,
                "channel {k}: {}",
                g.frequencies()[best]
            );
        }
    }
    // Both sides average to the same grand mean at every point.
    for f in 0..g.len() {
        for t in (0..N_TIMES).step_by(97) {
            let mx: f64 = (0..6).map(|k| contrib.x.get(f, t, k)).sum::<f64>() / 6.0;
            let my: f64 = (0..6).map(|k| contrib.y.get(f, t, k)).sum::<f64>() / 6.0;
            assert!((mx - my).abs() <= 1e-12 * mx.max(1e-300));
        }
    }
}

#[test]
fn spectrum_peaks_at_shared_rhythm() {
    let (x, y) = (lead_motion(0.0), lead_motion(0.25));
    let c = pair(&x, &y);
    let mask = cone_of_influence(&grid(), N_TIMES, RATE, 6.0);
    let s = interaction_spectrum(&c, Some(&mask)).unwrap();
    assert_eq!(s.peak_index(), Some(grid().nearest_index(1.0)));
    let scaled = pair(&x.map_samples(|_, _, v| -4.0 * v).unwrap(), &y);
    let s4 = interaction_spectrum(&scaled, Some(&mask)).unwrap();
    for (a, b) in s.values.iter().zip(&s4.values) {
        assert!((b.unwrap() - 4.0 * a.unwrap()).abs() <= 1e-12 * 4.0 * a.unwrap());
    }
}
