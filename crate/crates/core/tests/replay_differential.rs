//! Replays games against an independent move generator.
//!
//! Random legal games are generated with shakmaty, written out as SAN with
//! its disambiguation, then replayed here; the placements must agree at
//! every ply.

use chess_coherence::replay::{apply_san, replay, GameRecord, GameState, SanError};
use chess_coherence::{rules, Board};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shakmaty::san::SanPlus;
use shakmaty::{Chess, Position};

fn random_game(rng: &mut ChaCha8Rng, max_plies: usize) -> (Vec<String>, Vec<String>) {
    let mut pos = Chess::default();
    let mut sans = Vec::new();
    let mut fens = Vec::new();
    for _ in 0..max_plies {
        let moves = pos.legal_moves();
        if moves.is_empty() {
            break;
        }
        let special: Vec<_> = moves
            .iter()
            .filter(|m| m.is_capture() || m.is_promotion() || m.is_castle() || m.is_en_passant())
            .copied()
            .collect();
        let m = if !special.is_empty() && rng.random_bool(0.5) {
            special[rng.random_range(0..special.len())]
        } else {
            moves[rng.random_range(0..moves.len())]
        };
        sans.push(SanPlus::from_move_and_play_unchecked(&mut pos, m).to_string());
        fens.push(pos.board().to_string());
    }
    (sans, fens)
}

#[test]
fn placements_match_reference_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut plies = 0usize;
    for _ in 0..300 {
        let (sans, fens) = random_game(&mut rng, 250);
        let record = GameRecord {
            san_moves: sans.clone(),
            ..Default::default()
        };
        let boards = replay(&record).unwrap_or_else(|e| panic!("{e} in {sans:?}"));
        assert_eq!(boards.len(), fens.len());
        for (i, (b, f)) in boards.iter().zip(&fens).enumerate() {
            assert_eq!(&b.to_fen(), f, "ply {} of {sans:?}", i + 1);
            assert!(rules::check(b).is_sane(), "ply {} insane: {f}", i + 1);
        }
        plies += boards.len();
    }
    assert!(plies > 20_000);
}

#[test]
fn legal_move_counts_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let mut ours = GameState::standard();
        let mut theirs = Chess::default();
        for _ in 0..120 {
            let reference = theirs.legal_moves();
            assert_eq!(
                ours.legal_moves().len(),
                reference.len(),
                "at {}",
                ours.board().to_fen()
            );
            if reference.is_empty() {
                break;
            }
            let m = reference[rng.random_range(0..reference.len())];
            let san = SanPlus::from_move_and_play_unchecked(&mut theirs, m).to_string();
            ours = apply_san(&ours, &san).unwrap();
        }
    }
}

#[test]
fn moves_illegal_for_us_are_illegal_for_reference() {
    // tokens that shakmaty rejects in the start position must be rejected
    let start = GameState::standard();
    let pos = Chess::default();
    for token in [
        "e5", "Ke2", "Nd2", "Bc4", "O-O", "O-O-O", "Qh5", "exd3", "a1=Q", "Nf3", "e4",
    ] {
        let ours = apply_san(&start, token);
        let theirs = token
            .parse::<shakmaty::san::San>()
            .ok()
            .and_then(|s| s.to_move(&pos).ok());
        assert_eq!(ours.is_ok(), theirs.is_some(), "{token}");
        if let Err(e) = ours {
            assert!(matches!(
                e,
                SanError::IllegalMove(_) | SanError::MalformedSan(_)
            ));
        }
    }
    let _ = Board::starting();
}
