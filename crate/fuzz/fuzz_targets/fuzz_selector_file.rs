#![no_main]

use gxwt_core::{select_channels, ChannelSelector, MultiChannelSeries, SelectorFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let names = ["hx", "hy", "hz", "fx", "fy", "fz"].map(String::from).to_vec();
    let series = MultiChannelSeries::new(vec![0.0; 12], 10.0, names).unwrap();
    if let Ok(file) = SelectorFile::parse(text) {
        if let Ok(with) = file.apply_triples(series.clone()) {
            for (_, group) in &file.groups {
                let _ = select_channels(&with, group);
            }
        }
    }
    if let Ok(sel) = ChannelSelector::parse(text) {
        if let Ok(cols) = sel.resolve(&series) {
            assert!(!cols.is_empty() && cols.iter().all(|&c| c < 6));
        }
    }
});
