#![no_main]

use chess_coherence::Board;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(board) = Board::parse_codes(text) {
        assert_eq!(Board::parse_codes(&board.to_codes_string()).unwrap(), board);
        assert_eq!(Board::from_codes(&board.to_codes()).unwrap(), board);
    }
    // the raw-code entry point takes arbitrary bytes
    let _ = Board::from_codes(data);
});
