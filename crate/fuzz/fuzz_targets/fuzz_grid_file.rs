#![no_main]

use gxwt_cli::gridfile::parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse(text) {
        // Whatever parses must survive a write and parse back unchanged.
        if let Ok(written) = file.write_string() {
            assert_eq!(parse(&written).unwrap(), file);
        }
        let _ = file.to_gxwt();
        let _ = file.to_mask();
    }
});
