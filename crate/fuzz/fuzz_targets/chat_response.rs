#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::policies::parse_chat_response;

fuzz_target!(|data: &[u8]| {
    let body = String::from_utf8_lossy(data);
    let _ = parse_chat_response(&body);
});
