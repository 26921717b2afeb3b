#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::engine::{parse_transcript, write_transcript};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(messages) = parse_transcript(&text) {
        assert_eq!(parse_transcript(&write_transcript(&messages)).unwrap(), messages);
    }
});
