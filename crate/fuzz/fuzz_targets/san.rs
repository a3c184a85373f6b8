#![no_main]

use chess_coherence::replay::{apply_san, GameState, San};
use libfuzzer_sys::fuzz_target;

// Tokens separated by whitespace are played from the start position until
// one fails.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut state = GameState::standard();
    for token in text.split_whitespace().take(64) {
        if let Ok(san) = token.parse::<San>() {
            assert_eq!(san.to_string().parse::<San>().unwrap(), san);
        }
        match apply_san(&state, token) {
            Ok(next) => state = next,
            Err(_) => break,
        }
    }
});
