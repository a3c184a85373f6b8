//! Runs the checked-in fuzz seeds through the fuzzed entry points, so the
//! seeds stay meaningful and never panic on stable toolchains.

use std::fs;
use std::path::PathBuf;

use chess_coherence::baseline::BaselineEstimate;
use chess_coherence::replay::{apply_san, replay, GameState, PgnReader, San};
use chess_coherence::{rules, Board};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn fen_seeds() {
    let mut parsed = 0;
    for (_, data) in seeds("fen") {
        if let Ok(b) = Board::parse_fen(text(&data)) {
            assert_eq!(Board::parse_fen(&b.to_fen()).unwrap(), b);
            parsed += 1;
        }
    }
    assert!(parsed >= 4);
}

#[test]
fn codes_seeds() {
    let results: Vec<bool> = seeds("codes")
        .iter()
        .map(|(_, d)| Board::parse_codes(text(d)).is_ok())
        .collect();
    assert_eq!(results, [false, true]);
}

#[test]
fn san_seeds_are_legal_games() {
    for (name, data) in seeds("san") {
        let mut state = GameState::standard();
        for token in text(&data).split_whitespace() {
            let san: San = token.parse().unwrap();
            assert_eq!(san.to_string().parse::<San>().unwrap(), san);
            state = apply_san(&state, token).unwrap_or_else(|e| panic!("{name}: {token}: {e}"));
            assert!(rules::is_sane(state.board()));
        }
    }
}

#[test]
fn pgn_seeds() {
    let mut games = 0;
    for (_, data) in seeds("pgn") {
        for game in PgnReader::new(&data[..]).flatten() {
            if let Ok(boards) = replay(&game) {
                assert!(boards.iter().all(rules::is_sane));
                games += 1;
            }
        }
    }
    assert!(games >= 3);
}

#[test]
fn baseline_cache_seeds() {
    let results: Vec<bool> = seeds("baseline_cache")
        .iter()
        .map(|(_, d)| BaselineEstimate::from_json(text(d)).is_ok())
        .collect();
    assert_eq!(results, [true, false]);
}

#[test]
fn game_state_seeds() {
    for (name, data) in seeds("game_state_fen") {
        let state = GameState::from_fen(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!state.legal_moves().is_empty());
    }
}
