//! Game records to board states.
//!
//! Games are read from PGN, their SAN moves applied with full legality
//! checking from the standard start, and the board after every ply is
//! emitted. Duplicate positions across games are kept.

pub mod pgn;
pub mod position;
pub mod san;

pub use pgn::{parse_pgn, GameRecord, PgnError, PgnReader};
pub use position::{CastlingRights, CastlingSide, GameState, Move, MoveKind, StateError};
pub use san::{apply_san, San, SanError, NULL_MOVES};

use crate::board::Board;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ply {ply} ({san}): {source}")]
pub struct ReplayError {
    /// 1-based ply number of the offending move.
    pub ply: usize,
    pub san: String,
    #[source]
    pub source: SanError,
}

/// Board after each ply of `record`, starting from the standard position.
pub fn replay(record: &GameRecord) -> Result<Vec<Board>, ReplayError> {
    let mut state = GameState::standard();
    let mut boards = Vec::with_capacity(record.san_moves.len());
    for (i, san) in record.san_moves.iter().enumerate() {
        state = apply_san(&state, san).map_err(|source| ReplayError {
            ply: i + 1,
            san: san.clone(),
            source,
        })?;
        boards.push(*state.board());
    }
    Ok(boards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piece::Piece;

    fn record(moves: &[&str]) -> GameRecord {
        GameRecord {
            san_moves: moves.iter().map(|s| s.to_string()).collect(),
            result: "*".into(),
            ..Default::default()
        }
    }

    #[test]
    fn two_plies() {
        let boards = replay(&record(&["e4", "e5"])).unwrap();
        assert_eq!(boards.len(), 2);
        assert_eq!(boards[1][("e5").parse().unwrap()], Piece::BlackPawn);
        assert_eq!(
            boards[1].to_fen(),
            "rnbqkbnr/pppp1ppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR"
        );
    }

    #[test]
    fn empty_record() {
        assert!(replay(&record(&[])).unwrap().is_empty());
    }

    #[test]
    fn error_names_the_ply() {
        let err = replay(&record(&["e4", "e5", "Nf3", "Nc6", "Ke3"])).unwrap_err();
        assert_eq!(err.ply, 5);
        assert_eq!(err.san, "Ke3");
        assert!(matches!(err.source, SanError::IllegalMove(_)));
        assert!(err.to_string().starts_with("ply 5"));
    }

    #[test]
    fn deterministic() {
        let r = record(&["d4", "Nf6", "c4", "e6", "Nc3", "Bb4"]);
        assert_eq!(replay(&r).unwrap(), replay(&r).unwrap());
    }
}
