#![no_main]

use chess_coherence::replay::{replay, PgnReader};
use chess_coherence::rules;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for game in PgnReader::new(data).take(16) {
        let Ok(game) = game else { continue };
        if let Ok(boards) = replay(&game) {
            // anything that replays is a legal game
            assert!(boards.iter().all(rules::is_sane));
        }
    }
});
