//! Board states and the FEN piece-placement grammar.
//!
//! A [`Board`] is any assignment of the 13 piece classes to the 64 cells.
//! Nothing here assumes the arrangement is reachable or even plausible;
//! that is the business of [`crate::rules`].

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use crate::piece::{Color, Piece, Role};
use crate::square::Square;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FenError {
    #[error("illegal character {ch:?} at byte {pos}")]
    IllegalCharacter { ch: char, pos: usize },
    #[error("expected 8 rank groups, found {0}")]
    BadRankCount(usize),
    #[error("rank group {group} expands to width {width}, expected 8")]
    BadRankWidth { group: usize, width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrayError {
    #[error("expected 64 class codes, found {0}")]
    BadLength(usize),
    #[error("class code {code:?} at position {pos} is not in 0..=12")]
    BadCode { code: String, pos: usize },
}

/// An 8x8 grid of piece classes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Board {
    cells: [Piece; 64],
}

/// Occurrence count of each of the 13 classes, indexed by piece code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PieceCount([u8; 13]);

impl PieceCount {
    #[inline]
    pub fn get(&self, piece: Piece) -> u8 {
        self.0[piece.code() as usize]
    }

    #[inline]
    pub fn of(&self, color: Color, role: Role) -> u8 {
        self.get(Piece::new(color, role))
    }

    /// Number of non-empty cells.
    pub fn occupied(&self) -> u8 {
        64 - self.get(Piece::Empty)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn as_array(&self) -> &[u8; 13] {
        &self.0
    }
}

impl Board {
    pub const EMPTY: Board = Board {
        cells: [Piece::Empty; 64],
    };

    pub const STARTING_FEN: &'static str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR";

    pub fn empty() -> Board {
        Board::EMPTY
    }

    pub fn starting() -> Board {
        Board::parse_fen(Board::STARTING_FEN).expect("starting FEN is well formed")
    }

    /// Parses a FEN placement field, or a full FEN record (only the first
    /// whitespace-delimited field is read).
    ///
    /// Digit runs need not be maximal: `44` is read as eight empty cells.
    pub fn parse_fen(text: &str) -> Result<Board, FenError> {
        let trimmed = text.trim_start();
        let lead = text.len() - trimmed.len();
        let placement = trimmed.split_ascii_whitespace().next().unwrap_or("");

        for (pos, ch) in placement.char_indices() {
            if !matches!(
                ch,
                'p' | 'n' | 'b' | 'r' | 'q' | 'k' | 'P' | 'N' | 'B' | 'R' | 'Q' | 'K' | '1'
                    ..='8' | '/'
            ) {
                return Err(FenError::IllegalCharacter {
                    ch,
                    pos: lead + pos,
                });
            }
        }

        let groups: Vec<&str> = placement.split('/').collect();
        if groups.len() != 8 {
            return Err(FenError::BadRankCount(groups.len()));
        }

        let mut board = Board::EMPTY;
        for (group_idx, group) in groups.iter().enumerate() {
            let rank = 7 - group_idx as u8;
            let mut file = 0usize;
            for b in group.bytes() {
                if b.is_ascii_digit() {
                    file += (b - b'0') as usize;
                } else {
                    if file < 8 {
                        let sq = Square::new(file as u8, rank).expect("in range");
                        board.cells[sq.index()] =
                            Piece::from_char(b as char).expect("character set checked above");
                    }
                    file += 1;
                }
            }
            if file != 8 {
                return Err(FenError::BadRankWidth {
                    group: group_idx,
                    width: file,
                });
            }
        }
        Ok(board)
    }

    /// Canonical placement string: ranks 8 to 1, maximal digit runs.
    pub fn to_fen(&self) -> String {
        let mut out = String::with_capacity(72);
        for rank in (0..8u8).rev() {
            let mut run = 0u8;
            for file in 0..8u8 {
                let p = self.cells[(rank * 8 + file) as usize];
                if p.is_empty() {
                    run += 1;
                } else {
                    if run > 0 {
                        out.push((b'0' + run) as char);
                        run = 0;
                    }
                    out.push(p.char());
                }
            }
            if run > 0 {
                out.push((b'0' + run) as char);
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out
    }

    pub fn piece_count(&self) -> PieceCount {
        let mut counts = [0u8; 13];
        for p in &self.cells {
            counts[p.code() as usize] += 1;
        }
        PieceCount(counts)
    }

    /// Squares holding `piece`, ordered by file and then by rank.
    pub fn locate(&self, piece: Piece) -> Vec<Square> {
        let mut found = Vec::new();
        for file in 0..8 {
            for rank in 0..8 {
                let sq = Square::new(file, rank).expect("in range");
                if self[sq] == piece {
                    found.push(sq);
                }
            }
        }
        found
    }

    /// Number of non-empty cells.
    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|p| !p.is_empty()).count()
    }

    pub fn cells(&self) -> &[Piece; 64] {
        &self.cells
    }

    pub fn from_cells(cells: [Piece; 64]) -> Board {
        Board { cells }
    }

    /// Swaps colors and reflects ranks, so black's view becomes white's.
    pub fn mirror(&self) -> Board {
        let mut out = Board::EMPTY;
        for sq in Square::all() {
            out[sq.flip_rank()] = self[sq].flip_color();
        }
        out
    }

    /// Class codes in interchange order: rank 8 to rank 1, file A to H
    /// within a rank (the cell order of FEN).
    pub fn to_codes(&self) -> [u8; 64] {
        let mut codes = [0u8; 64];
        for (i, code) in codes.iter_mut().enumerate() {
            *code = self.cells[interchange_square(i).index()].code();
        }
        codes
    }

    pub fn from_codes(codes: &[u8]) -> Result<Board, ArrayError> {
        if codes.len() != 64 {
            return Err(ArrayError::BadLength(codes.len()));
        }
        let mut board = Board::EMPTY;
        for (i, &code) in codes.iter().enumerate() {
            let piece = Piece::from_code(code).ok_or_else(|| ArrayError::BadCode {
                code: code.to_string(),
                pos: i,
            })?;
            board.cells[interchange_square(i).index()] = piece;
        }
        Ok(board)
    }

    /// Parses the textual array form: 64 integer codes separated by commas
    /// and/or whitespace, optionally wrapped in `[` `]`.
    pub fn parse_codes(text: &str) -> Result<Board, ArrayError> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(inner);
        let mut codes = Vec::with_capacity(64);
        for (pos, tok) in inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .enumerate()
        {
            match tok.parse::<u8>() {
                Ok(c) if c <= 12 => codes.push(c),
                _ => {
                    return Err(ArrayError::BadCode {
                        code: tok.to_owned(),
                        pos,
                    })
                }
            }
        }
        Board::from_codes(&codes)
    }

    /// Textual array form, comma separated.
    pub fn to_codes_string(&self) -> String {
        let codes = self.to_codes();
        let mut out = String::with_capacity(64 * 3);
        for (i, c) in codes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&c.to_string());
        }
        out
    }
}

fn interchange_square(i: usize) -> Square {
    Square::new((i % 8) as u8, 7 - (i / 8) as u8).expect("index below 64")
}

impl Default for Board {
    fn default() -> Board {
        Board::EMPTY
    }
}

impl Index<Square> for Board {
    type Output = Piece;

    #[inline]
    fn index(&self, sq: Square) -> &Piece {
        &self.cells[sq.index()]
    }
}

impl IndexMut<Square> for Board {
    #[inline]
    fn index_mut(&mut self, sq: Square) -> &mut Piece {
        &mut self.cells[sq.index()]
    }
}

impl FromStr for Board {
    type Err = FenError;

    fn from_str(s: &str) -> Result<Board, FenError> {
        Board::parse_fen(s)
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fen())
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({})", self.to_fen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ITALIAN_MIDGAME: &str = "r1bqk2r/ppppbN1p/2n2np1/4p3/2B1P3/3P4/PPP2PPP/RNBQK2R";
    const ROOK_ENDGAME: &str = "8/8/2k3P1/8/5K2/6R1/5r2/8";

    fn sq(name: &str) -> Square {
        name.parse().unwrap()
    }

    #[test]
    fn starting_position() {
        let b = Board::starting();
        assert_eq!(b[sq("e1")], Piece::WhiteKing);
        assert_eq!(b[sq("d8")], Piece::BlackQueen);
        assert_eq!(b[sq("a2")], Piece::WhitePawn);
        assert_eq!(b[sq("h7")], Piece::BlackPawn);
        assert_eq!(b[sq("e4")], Piece::Empty);
        assert_eq!(b.to_fen(), Board::STARTING_FEN);
    }

    #[test]
    fn empty_board() {
        let b = Board::parse_fen("8/8/8/8/8/8/8/8").unwrap();
        assert_eq!(b, Board::EMPTY);
        let counts = b.piece_count();
        assert_eq!(counts.get(Piece::Empty), 64);
        for p in &Piece::ALL[1..] {
            assert_eq!(counts.get(*p), 0);
        }
        assert_eq!(Board::EMPTY.to_fen(), "8/8/8/8/8/8/8/8");
    }

    #[test]
    fn sparse_endgame_board() {
        let b = Board::parse_fen(ROOK_ENDGAME).unwrap();
        assert_eq!(b[sq("c6")], Piece::BlackKing);
        assert_eq!(b[sq("g6")], Piece::WhitePawn);
        assert_eq!(b[sq("f4")], Piece::WhiteKing);
        assert_eq!(b[sq("g3")], Piece::WhiteRook);
        assert_eq!(b[sq("f2")], Piece::BlackRook);
        assert_eq!(b.occupied(), 5);
        assert_eq!(b.to_fen(), ROOK_ENDGAME);
    }

    #[test]
    fn reference_boards_roundtrip() {
        assert_eq!(
            Board::parse_fen(ITALIAN_MIDGAME).unwrap().to_fen(),
            ITALIAN_MIDGAME
        );
    }

    #[test]
    fn full_record_uses_first_field() {
        let b = Board::parse_fen("rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1")
            .unwrap();
        assert_eq!(b[sq("e4")], Piece::WhitePawn);
        assert_eq!(b.to_fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR");
    }

    #[test]
    fn non_canonical_runs_accepted() {
        let b = Board::parse_fen("44/8/8/8/8/8/8/1111k3").unwrap();
        assert_eq!(b.to_fen(), "8/8/8/8/8/8/8/4k3");
    }

    #[test]
    fn errors() {
        assert_eq!(
            Board::parse_fen("8/8/8/8/8/8/8/7X"),
            Err(FenError::IllegalCharacter { ch: 'X', pos: 15 })
        );
        assert!(matches!(
            Board::parse_fen("8/8/8/8/8/8/8/x7"),
            Err(FenError::IllegalCharacter { ch: 'x', .. })
        ));
        assert_eq!(
            Board::parse_fen("8/8/8/8/8/8/8"),
            Err(FenError::BadRankCount(7))
        );
        assert_eq!(Board::parse_fen(""), Err(FenError::BadRankCount(1)));
        assert_eq!(
            Board::parse_fen("8/8/8/8/8/8/8/8/8"),
            Err(FenError::BadRankCount(9))
        );
        assert_eq!(
            Board::parse_fen("8/8/8/8/9/8/8/8"),
            Err(FenError::IllegalCharacter { ch: '9', pos: 8 })
        );
        assert_eq!(
            Board::parse_fen("8/8/8/8/ppppppppp/8/8/8"),
            Err(FenError::BadRankWidth { group: 4, width: 9 })
        );
        assert_eq!(
            Board::parse_fen("8/8/7/8/8/8/8/8"),
            Err(FenError::BadRankWidth { group: 2, width: 7 })
        );
        assert_eq!(
            Board::parse_fen("8/8/8/8/8/8/8/0k7"),
            Err(FenError::IllegalCharacter { ch: '0', pos: 14 })
        );
    }

    #[test]
    fn piece_counts() {
        let start = Board::starting().piece_count();
        assert_eq!(start.get(Piece::BlackPawn), 8);
        assert_eq!(start.get(Piece::WhitePawn), 8);
        assert_eq!(start.get(Piece::BlackKing), 1);
        assert_eq!(start.get(Piece::WhiteKing), 1);
        assert_eq!(start.get(Piece::BlackRook), 2);
        assert_eq!(start.get(Piece::WhiteRook), 2);
        assert_eq!(start.get(Piece::Empty), 32);
        assert_eq!(start.total(), 64);

        let right = Board::parse_fen(ROOK_ENDGAME).unwrap().piece_count();
        let expected = [
            (Piece::BlackKing, 1),
            (Piece::WhiteKing, 1),
            (Piece::WhitePawn, 1),
            (Piece::WhiteRook, 1),
            (Piece::BlackRook, 1),
            (Piece::Empty, 59),
        ];
        for p in Piece::ALL {
            let want = expected.iter().find(|(q, _)| *q == p).map_or(0, |e| e.1);
            assert_eq!(right.get(p), want, "{p}");
        }
    }

    #[test]
    fn locate_pieces() {
        assert_eq!(Board::starting().locate(Piece::WhiteKing), vec![sq("e1")]);
        assert!(Board::EMPTY.locate(Piece::BlackQueen).is_empty());
        let right = Board::parse_fen(ROOK_ENDGAME).unwrap();
        assert_eq!(right.locate(Piece::BlackKing), vec![sq("c6")]);
        // file-then-rank order
        assert_eq!(
            Board::starting().locate(Piece::WhiteRook),
            vec![sq("a1"), sq("h1")]
        );
        let b = Board::parse_fen("8/8/8/8/8/8/1p6/p7").unwrap();
        assert_eq!(b.locate(Piece::BlackPawn), vec![sq("a1"), sq("b2")]);
    }

    #[test]
    fn codes_follow_fen_cell_order() {
        let codes = Board::starting().to_codes();
        // a8 is the first cell, h1 the last
        assert_eq!(codes[0], Piece::BlackRook.code());
        assert_eq!(codes[4], Piece::BlackKing.code());
        assert_eq!(codes[60], Piece::WhiteKing.code());
        assert_eq!(codes[63], Piece::WhiteRook.code());
        assert_eq!(Board::from_codes(&codes).unwrap(), Board::starting());
        let text = Board::starting().to_codes_string();
        assert_eq!(Board::parse_codes(&text).unwrap(), Board::starting());
        assert_eq!(
            Board::parse_codes(&format!("[{}]", text.replace(',', " "))).unwrap(),
            Board::starting()
        );
    }

    #[test]
    fn code_errors() {
        assert_eq!(Board::from_codes(&[0; 63]), Err(ArrayError::BadLength(63)));
        let mut codes = [0u8; 64];
        codes[5] = 13;
        assert!(matches!(
            Board::from_codes(&codes),
            Err(ArrayError::BadCode { pos: 5, .. })
        ));
        assert!(matches!(
            Board::parse_codes("1,2,-3"),
            Err(ArrayError::BadCode { pos: 2, .. })
        ));
    }

    #[test]
    fn mirror_swaps_sides() {
        let start = Board::starting();
        assert_eq!(start.mirror(), start);
        let b = Board::parse_fen(ROOK_ENDGAME).unwrap().mirror();
        assert_eq!(b[sq("c3")], Piece::WhiteKing);
        assert_eq!(b[sq("f5")], Piece::BlackKing);
        assert_eq!(b.mirror(), Board::parse_fen(ROOK_ENDGAME).unwrap());
    }
}
