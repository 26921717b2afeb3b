#![no_main]

use libfuzzer_sys::fuzz_target;
use topocoord::runner::{read_records, RunRecord};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(record) = RunRecord::from_json_line(text) {
        assert_eq!(RunRecord::from_json_line(&record.to_json_line()).unwrap(), record);
    }
    let _ = read_records(data);
});
