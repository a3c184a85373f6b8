//! Standard Algebraic Notation.

use std::fmt;
use std::str::FromStr;

use super::position::{CastlingSide, GameState, Move, MoveKind};
use crate::piece::Role;
use crate::square::Square;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SanError {
    #[error("malformed SAN token {0:?}")]
    MalformedSan(String),
    #[error("no legal move matches {0:?}")]
    IllegalMove(String),
    #[error("{san:?} matches {candidates} legal moves")]
    AmbiguousMove { san: String, candidates: usize },
}

/// A parsed SAN token, before it is resolved against a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum San {
    Castle(CastlingSide),
    Normal {
        role: Role,
        file: Option<u8>,
        rank: Option<u8>,
        capture: bool,
        to: Square,
        promotion: Option<Role>,
    },
}

fn file_of(b: u8) -> Option<u8> {
    (b'a'..=b'h').contains(&b).then(|| b - b'a')
}

fn rank_of(b: u8) -> Option<u8> {
    (b'1'..=b'8').contains(&b).then(|| b - b'1')
}

impl FromStr for San {
    type Err = SanError;

    /// Check, mate and annotation suffixes (`+ # ! ?`) are ignored.
    fn from_str(token: &str) -> Result<San, SanError> {
        let malformed = || SanError::MalformedSan(token.to_owned());
        let core = token.trim_end_matches(['+', '#', '!', '?']);
        match core {
            "O-O" | "0-0" => return Ok(San::Castle(CastlingSide::King)),
            "O-O-O" | "0-0-0" => return Ok(San::Castle(CastlingSide::Queen)),
            _ => {}
        }
        let mut s = core.as_bytes();
        if !s.is_ascii() || s.is_empty() {
            return Err(malformed());
        }

        let role = match s[0] {
            b'K' => Some(Role::King),
            b'Q' => Some(Role::Queen),
            b'R' => Some(Role::Rook),
            b'B' => Some(Role::Bishop),
            b'N' => Some(Role::Knight),
            b'P' => Some(Role::Pawn),
            _ => None,
        };
        if role.is_some() {
            s = &s[1..];
        }
        let role = role.unwrap_or(Role::Pawn);

        let mut promotion = None;
        if let Some((&last, rest)) = s.split_last() {
            if let Some(p) = match last.to_ascii_uppercase() {
                b'Q' => Some(Role::Queen),
                b'R' => Some(Role::Rook),
                b'B' if rest
                    .last()
                    .is_some_and(|b| *b == b'=' || b.is_ascii_digit()) =>
                {
                    Some(Role::Bishop)
                }
                b'N' => Some(Role::Knight),
                _ => None,
            } {
                if role != Role::Pawn {
                    return Err(malformed());
                }
                promotion = Some(p);
                s = rest.strip_suffix(b"=").unwrap_or(rest);
            }
        }

        let [head @ .., f, r] = s else {
            return Err(malformed());
        };
        let to = Square::new(
            file_of(*f).ok_or_else(malformed)?,
            rank_of(*r).ok_or_else(malformed)?,
        )
        .expect("coordinates in range");

        let mut head = head;
        let mut capture = false;
        if let Some(rest) = head.strip_suffix(b"x").or_else(|| head.strip_suffix(b":")) {
            capture = true;
            head = rest;
        } else if let Some(rest) = head.strip_suffix(b"-") {
            head = rest;
        }

        let (file, rank) = match head {
            [] => (None, None),
            [a] => match (file_of(*a), rank_of(*a)) {
                (Some(f), _) => (Some(f), None),
                (_, Some(r)) => (None, Some(r)),
                _ => return Err(malformed()),
            },
            [a, b] => (
                Some(file_of(*a).ok_or_else(malformed)?),
                Some(rank_of(*b).ok_or_else(malformed)?),
            ),
            _ => return Err(malformed()),
        };
        if role == Role::Pawn && rank.is_some() && file.is_none() {
            return Err(malformed());
        }

        Ok(San::Normal {
            role,
            file,
            rank,
            capture,
            to,
            promotion,
        })
    }
}

impl fmt::Display for San {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            San::Castle(CastlingSide::King) => f.write_str("O-O"),
            San::Castle(CastlingSide::Queen) => f.write_str("O-O-O"),
            San::Normal {
                role,
                file,
                rank,
                capture,
                to,
                promotion,
            } => {
                if role != Role::Pawn {
                    write!(f, "{}", role.char().to_ascii_uppercase())?;
                }
                if let Some(file) = file {
                    write!(f, "{}", (b'a' + file) as char)?;
                }
                if let Some(rank) = rank {
                    write!(f, "{}", rank + 1)?;
                }
                if capture {
                    f.write_str("x")?;
                }
                write!(f, "{to}")?;
                if let Some(p) = promotion {
                    write!(f, "={}", p.char().to_ascii_uppercase())?;
                }
                Ok(())
            }
        }
    }
}

impl San {
    fn matches(&self, m: &Move) -> bool {
        match *self {
            San::Castle(side) => m.kind == MoveKind::Castle(side),
            San::Normal {
                role,
                file,
                rank,
                to,
                promotion,
                ..
            } => {
                if matches!(m.kind, MoveKind::Castle(_)) || m.role != role || m.to != to {
                    return false;
                }
                if m.promotion != promotion {
                    return false;
                }
                // an undisambiguated pawn token is a push along its file
                let file = match (role, file) {
                    (Role::Pawn, None) => Some(to.file()),
                    _ => file,
                };
                file.is_none_or(|f| m.from.file() == f) && rank.is_none_or(|r| m.from.rank() == r)
            }
        }
    }

    /// Resolves the token to the unique matching legal move.
    pub fn to_move(&self, state: &GameState) -> Result<Move, SanError> {
        let mut found = state
            .pseudo_legal_moves()
            .into_iter()
            .filter(|m| self.matches(m) && state.is_legal(m));
        let first = found
            .next()
            .ok_or_else(|| SanError::IllegalMove(self.to_string()))?;
        let extra = found.count();
        if extra > 0 {
            return Err(SanError::AmbiguousMove {
                san: self.to_string(),
                candidates: extra + 1,
            });
        }
        Ok(first)
    }
}

/// Null-move spellings used by common PGN writers.
pub const NULL_MOVES: [&str; 4] = ["--", "Z0", "0000", "@@@@"];

/// Parses `san` and plays it from `state`. Null moves pass the turn and
/// leave the placement unchanged.
pub fn apply_san(state: &GameState, san: &str) -> Result<GameState, SanError> {
    if NULL_MOVES.contains(&san.trim_end_matches(['+', '#', '!', '?'])) {
        return state
            .pass()
            .ok_or_else(|| SanError::IllegalMove(san.to_owned()));
    }
    let parsed: San = san.parse()?;
    let m = parsed.to_move(state).map_err(|e| match e {
        SanError::IllegalMove(_) => SanError::IllegalMove(san.to_owned()),
        SanError::AmbiguousMove { candidates, .. } => SanError::AmbiguousMove {
            san: san.to_owned(),
            candidates,
        },
        other => other,
    })?;
    Ok(state.play(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Board;
    use crate::piece::{Color, Piece};
    use crate::replay::position::CastlingSide;

    fn sq(s: &str) -> Square {
        s.parse().unwrap()
    }

    #[test]
    fn parse_tokens() {
        let cases = [
            ("e4", "e4"),
            ("exd5", "exd5"),
            ("Nf3", "Nf3"),
            ("Nbd7", "Nbd7"),
            ("R1e2", "R1e2"),
            ("Qh4xe1", "Qh4xe1"),
            ("e8=Q", "e8=Q"),
            ("e8Q", "e8=Q"),
            ("dxe8=N+", "dxe8=N"),
            ("bxc8=B#", "bxc8=B"),
            ("Kxf7!?", "Kxf7"),
            ("O-O", "O-O"),
            ("0-0-0+", "O-O-O"),
            ("Pe4", "e4"),
        ];
        for (input, shown) in cases {
            let san: San = input.parse().unwrap_or_else(|e| panic!("{input}: {e}"));
            assert_eq!(san.to_string(), shown, "{input}");
        }
    }

    #[test]
    fn bishop_capture_is_not_a_promotion() {
        let san: San = "Bxb5".parse().unwrap();
        assert!(matches!(
            san,
            San::Normal {
                role: Role::Bishop,
                promotion: None,
                ..
            }
        ));
        let pawn: San = "bxc3".parse().unwrap();
        assert!(matches!(
            pawn,
            San::Normal {
                role: Role::Pawn,
                file: Some(1),
                ..
            }
        ));
    }

    #[test]
    fn malformed_tokens() {
        for bad in [
            "", "--", "Z0", "e9", "i4", "Nf", "K=Q", "Qe8=Q", "4e", "e4e5e6", "Nxxe4", "1-0", "é4",
        ] {
            assert!(
                matches!(bad.parse::<San>(), Err(SanError::MalformedSan(_))),
                "{bad:?} should be malformed"
            );
        }
    }

    #[test]
    fn double_step_sets_en_passant_target() {
        let s = apply_san(&GameState::standard(), "e4").unwrap();
        assert_eq!(
            s.board().to_fen(),
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR"
        );
        assert_eq!(s.en_passant_target(), Some(sq("e3")));
        assert_eq!(s.side_to_move(), Color::Black);
        assert_eq!(s.ply_index(), 1);
    }

    #[test]
    fn kingside_castle() {
        let s = GameState::from_fen("r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1").unwrap();
        let after = apply_san(&s, "O-O").unwrap();
        assert_eq!(after.board()[sq("g1")], Piece::WhiteKing);
        assert_eq!(after.board()[sq("f1")], Piece::WhiteRook);
        assert_eq!(after.board()[sq("e1")], Piece::Empty);
        assert_eq!(after.board()[sq("h1")], Piece::Empty);
        let rights = after.castling_rights();
        assert!(!rights.has(Color::White, CastlingSide::King));
        assert!(!rights.has(Color::White, CastlingSide::Queen));
        assert!(rights.has(Color::Black, CastlingSide::King));
        let after = apply_san(&after, "O-O-O").unwrap();
        assert_eq!(after.board()[sq("c8")], Piece::BlackKing);
        assert_eq!(after.board()[sq("d8")], Piece::BlackRook);
        assert!(after.castling_rights().is_empty());
    }

    #[test]
    fn castling_through_check_is_illegal() {
        // black bishop on c4 covers f1
        let s = GameState::from_fen("4k3/8/8/8/2b5/8/8/4K2R w K - 0 1").unwrap();
        assert_eq!(
            apply_san(&s, "O-O"),
            Err(SanError::IllegalMove("O-O".into()))
        );
    }

    #[test]
    fn king_onto_own_pawn_is_illegal() {
        assert_eq!(
            apply_san(&GameState::standard(), "Ke2"),
            Err(SanError::IllegalMove("Ke2".into()))
        );
    }

    #[test]
    fn ambiguity_and_disambiguation() {
        let s = GameState::from_fen("4k3/8/8/8/8/R6R/8/4K3 w - - 0 1").unwrap();
        assert!(matches!(
            apply_san(&s, "Re3"),
            Err(SanError::AmbiguousMove { candidates: 2, .. })
        ));
        let after = apply_san(&s, "Rhe3").unwrap();
        assert_eq!(after.board()[sq("e3")], Piece::WhiteRook);
        assert_eq!(after.board()[sq("a3")], Piece::WhiteRook);
        assert!(apply_san(&s, "R3e3").is_err());
    }

    #[test]
    fn pinned_piece_does_not_cause_ambiguity() {
        // the knight on c3 is pinned by the bishop on a5, so Ne2 is the d4 knight
        let s = GameState::from_fen("4k3/8/8/b7/3N4/2N5/8/4K3 w - - 0 1").unwrap();
        let after = apply_san(&s, "Ne2").unwrap();
        assert_eq!(after.board()[sq("c3")], Piece::WhiteKnight);
        assert_eq!(after.board()[sq("d4")], Piece::Empty);
    }

    #[test]
    fn en_passant_capture() {
        let mut s = GameState::standard();
        for m in ["e4", "a6", "e5", "d5"] {
            s = apply_san(&s, m).unwrap();
        }
        let after = apply_san(&s, "exd6").unwrap();
        assert_eq!(after.board()[sq("d6")], Piece::WhitePawn);
        assert_eq!(after.board()[sq("d5")], Piece::Empty);
        assert_eq!(after.board()[sq("e5")], Piece::Empty);
    }

    #[test]
    fn promotion_required_and_honoured() {
        let s = GameState::from_fen("8/4P2k/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        assert!(matches!(apply_san(&s, "e8"), Err(SanError::IllegalMove(_))));
        let after = apply_san(&s, "e8=N").unwrap();
        assert_eq!(after.board()[sq("e8")], Piece::WhiteKnight);
        assert_eq!(
            Board::parse_fen("4N3/7k/8/8/8/8/8/4K3").unwrap(),
            *after.board()
        );
    }

    #[test]
    fn pawn_push_does_not_match_capture() {
        // both d3xe4 and e3-e4 end on e4; bare "e4" is the push
        let s = GameState::from_fen("4k3/8/8/8/4p3/3P4/8/4K3 w - - 0 1").unwrap();
        assert!(matches!(apply_san(&s, "e4"), Err(SanError::IllegalMove(_))));
        assert!(apply_san(&s, "dxe4").is_ok());
    }

    #[test]
    fn null_move_passes_the_turn() {
        let s = apply_san(&GameState::standard(), "e4").unwrap();
        let n = apply_san(&s, "Z0").unwrap();
        assert_eq!(n.board(), s.board());
        assert_eq!(n.side_to_move(), Color::White);
        assert_eq!(n.en_passant_target(), None);
        assert!(apply_san(&n, "d4").is_ok());
        assert!(apply_san(&s, "--").is_ok());

        // not allowed while in check
        let mut s = GameState::standard();
        for m in ["e4", "f5", "Qh5+"] {
            s = apply_san(&s, m).unwrap();
        }
        assert!(matches!(apply_san(&s, "--"), Err(SanError::IllegalMove(_))));
    }
}
