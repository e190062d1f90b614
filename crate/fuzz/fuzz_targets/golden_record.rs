#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::swcodec::GoldenRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = GoldenRecord::from_line(text) {
        let _ = GoldenRecord::from_line(&r.to_line()).expect("serialized record re-parses");
    }
});
