#![no_main]

use chess_coherence::baseline::BaselineEstimate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(est) = BaselineEstimate::from_json(text) {
        assert_eq!(BaselineEstimate::from_json(&est.to_json()).unwrap(), est);
    }
});
