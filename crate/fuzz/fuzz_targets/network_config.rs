#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::netsim::{Network, NetworkConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = NetworkConfig::from_json(text) {
        if cfg.sources.k <= 8 {
            if let Ok(net) = Network::build(&cfg) {
                net.plan().validate(&net.layouts).expect("planner output is valid");
            }
        }
    }
});
