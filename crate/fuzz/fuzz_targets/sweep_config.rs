#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::runner::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = parse_config(text) {
        // Anything accepted must already be a valid sweep.
        spec.validate().expect("parsed config validates");
    }
});
