#![no_main]

use chess_coherence::replay::GameState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(state) = GameState::from_fen(text) {
        for m in state.legal_moves().iter().take(8) {
            let _ = state.play(m);
        }
    }
});
