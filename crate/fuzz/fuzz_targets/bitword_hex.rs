#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::bits::BitWord;

fuzz_target!(|data: &[u8]| {
    let Some((&w, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let width = u32::from(w % 72);
    if let Ok(b) = BitWord::from_hex(text, width) {
        assert_eq!(BitWord::from_hex(&b.to_hex(), width).expect("re-parse"), b);
    }
});
