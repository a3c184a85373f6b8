#![no_main]

use chess_coherence::{rules, Board};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(board) = Board::parse_fen(text) {
        let fen = board.to_fen();
        assert_eq!(Board::parse_fen(&fen).unwrap(), board);
        let report = rules::check(&board);
        assert_eq!(report.is_sane(), report.violations().is_empty());
    }
});
