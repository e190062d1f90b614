#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::probcore::JointPmf;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pmf) = JointPmf::from_json(text) {
        // Accepted documents survive a round trip unchanged.
        let back = JointPmf::from_json(&pmf.to_json()).expect("re-parse");
        assert_eq!(back.alphabet_sizes(), pmf.alphabet_sizes());
    }
});
