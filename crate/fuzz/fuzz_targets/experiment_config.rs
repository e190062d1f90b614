#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        // Validation reports problems and never panics.
        let _ = swleak_cli::validate(&cfg, std::path::Path::new("/nonexistent"));
        let _ = cfg.hash();
    }
});
