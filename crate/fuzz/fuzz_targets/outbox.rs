#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::policies::{parse_outbox, wire};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let neighbors = [0, 2, 3, 7];
    let outbox = parse_outbox(&text, &neighbors);
    assert!(outbox.keys().all(|k| neighbors.contains(k)));
    for line in text.lines() {
        let fields = wire::decode(line);
        let _ = wire::field::<u64>(line, "b");
        assert!(fields.keys().all(|k| !k.contains(';')));
    }
});
