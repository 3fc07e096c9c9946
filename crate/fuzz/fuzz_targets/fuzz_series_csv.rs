#![no_main]

use gxwt_core::{parse_csv, write_csv, RateSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for (rate, time) in [(RateSpec::Hz(100.0), None), (RateSpec::FromTimeColumn, Some("t"))] {
        if let Ok(series) = parse_csv(text, rate, time) {
            let mut out = Vec::new();
            write_csv(&series, &mut out, None).unwrap();
            let again = parse_csv(
                std::str::from_utf8(&out).unwrap(),
                RateSpec::Hz(series.sample_rate()),
                None,
            )
            .unwrap();
            assert_eq!(again.samples(), series.samples());
        }
    }
});
