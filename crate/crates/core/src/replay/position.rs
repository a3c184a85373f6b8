//! Game state and legal move generation.

use std::fmt;

use crate::board::{Board, FenError};
use crate::piece::{Color, Piece, Role};
use crate::square::Square;

const KNIGHT_STEPS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
const KING_STEPS: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CastlingSide {
    King,
    Queen,
}

/// Castling availability for both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CastlingRights {
    rights: [[bool; 2]; 2],
}

impl CastlingRights {
    pub const ALL: CastlingRights = CastlingRights {
        rights: [[true; 2]; 2],
    };

    pub fn has(&self, color: Color, side: CastlingSide) -> bool {
        self.rights[color as usize][side as usize]
    }

    pub fn set(&mut self, color: Color, side: CastlingSide, value: bool) {
        self.rights[color as usize][side as usize] = value;
    }

    pub fn is_empty(&self) -> bool {
        self.rights == [[false; 2]; 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Normal,
    DoublePush,
    EnPassant,
    Castle(CastlingSide),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub role: Role,
    pub from: Square,
    pub to: Square,
    pub promotion: Option<Role>,
    pub kind: MoveKind,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.from, self.to)?;
        if let Some(p) = self.promotion {
            write!(f, "{}", p.char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateError {
    #[error(transparent)]
    Placement(#[from] FenError),
    #[error("FEN record has a malformed {field} field: {value:?}")]
    BadField { field: &'static str, value: String },
    #[error("castling right {0} is set but the king or rook is not on its home square")]
    InconsistentCastling(char),
    #[error("en passant target {0} is not on rank 3 or rank 6")]
    BadEnPassant(Square),
}

/// Board plus the context needed to apply legal moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    board: Board,
    side_to_move: Color,
    castling: CastlingRights,
    en_passant: Option<Square>,
    ply: u32,
}

impl Default for GameState {
    fn default() -> Self {
        GameState::standard()
    }
}

fn home_rank(color: Color) -> u8 {
    match color {
        Color::White => 0,
        Color::Black => 7,
    }
}

fn forward(color: Color) -> i8 {
    match color {
        Color::White => 1,
        Color::Black => -1,
    }
}

fn sq(file: u8, rank: u8) -> Square {
    Square::new(file, rank).expect("coordinates in range")
}

impl GameState {
    /// The standard starting position, white to move.
    pub fn standard() -> GameState {
        GameState {
            board: Board::starting(),
            side_to_move: Color::White,
            castling: CastlingRights::ALL,
            en_passant: None,
            ply: 0,
        }
    }

    /// Builds a state from a full FEN record. Missing trailing fields
    /// default to white to move, no castling, no en passant, move 1.
    pub fn from_fen(text: &str) -> Result<GameState, StateError> {
        let mut fields = text.split_ascii_whitespace();
        let board = Board::parse_fen(fields.next().unwrap_or(""))?;

        let side_to_move = match fields.next().unwrap_or("w") {
            "w" => Color::White,
            "b" => Color::Black,
            other => {
                return Err(StateError::BadField {
                    field: "side to move",
                    value: other.to_owned(),
                })
            }
        };

        let mut castling = CastlingRights::default();
        let castle_field = fields.next().unwrap_or("-");
        if castle_field != "-" {
            for c in castle_field.chars() {
                let (color, side) = match c {
                    'K' => (Color::White, CastlingSide::King),
                    'Q' => (Color::White, CastlingSide::Queen),
                    'k' => (Color::Black, CastlingSide::King),
                    'q' => (Color::Black, CastlingSide::Queen),
                    _ => {
                        return Err(StateError::BadField {
                            field: "castling",
                            value: castle_field.to_owned(),
                        })
                    }
                };
                let rank = home_rank(color);
                let rook_file = if side == CastlingSide::King { 7 } else { 0 };
                if board[sq(4, rank)] != Piece::new(color, Role::King)
                    || board[sq(rook_file, rank)] != Piece::new(color, Role::Rook)
                {
                    return Err(StateError::InconsistentCastling(c));
                }
                castling.set(color, side, true);
            }
        }

        let ep_field = fields.next().unwrap_or("-");
        let en_passant = if ep_field == "-" {
            None
        } else {
            let target: Square = ep_field.parse().map_err(|_| StateError::BadField {
                field: "en passant",
                value: ep_field.to_owned(),
            })?;
            if target.rank() != 2 && target.rank() != 5 {
                return Err(StateError::BadEnPassant(target));
            }
            Some(target)
        };

        let _halfmove = fields.next();
        let fullmove: u32 = match fields.next() {
            None => 1,
            Some(v) => v
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| StateError::BadField {
                    field: "fullmove number",
                    value: v.to_owned(),
                })?,
        };
        let ply = (fullmove - 1) * 2 + u32::from(side_to_move == Color::Black);

        Ok(GameState {
            board,
            side_to_move,
            castling,
            en_passant,
            ply,
        })
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    pub fn en_passant_target(&self) -> Option<Square> {
        self.en_passant
    }

    pub fn ply_index(&self) -> u32 {
        self.ply
    }

    fn king_square(&self, color: Color) -> Option<Square> {
        let king = Piece::new(color, Role::King);
        Square::all().find(|&s| self.board[s] == king)
    }

    pub fn is_check(&self) -> bool {
        self.king_square(self.side_to_move)
            .is_some_and(|k| is_attacked(&self.board, k, self.side_to_move.opposite()))
    }

    /// All legal moves for the side to move.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = self.pseudo_legal_moves();
        moves.retain(|m| self.is_legal(m));
        moves
    }

    /// Moves that follow piece-movement rules but may leave the own king
    /// in check.
    pub fn pseudo_legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(48);
        self.pseudo_legal(&mut moves);
        moves
    }

    /// Whether a pseudo-legal move keeps the mover's king out of check.
    pub fn is_legal(&self, m: &Move) -> bool {
        let us = self.side_to_move;
        let after = self.board_after(m);
        let king = if m.role == Role::King {
            Some(m.to)
        } else {
            self.king_square(us)
        };
        king.is_none_or(|k| !is_attacked(&after, k, us.opposite()))
    }

    fn pseudo_legal(&self, out: &mut Vec<Move>) {
        let us = self.side_to_move;
        for from in Square::all() {
            let piece = self.board[from];
            if piece.color() != Some(us) {
                continue;
            }
            let role = piece.role().expect("colored piece has a role");
            match role {
                Role::Pawn => self.pawn_moves(from, out),
                Role::Knight => self.step_moves(from, role, &KNIGHT_STEPS, out),
                Role::King => {
                    self.step_moves(from, role, &KING_STEPS, out);
                    self.castle_moves(from, out);
                }
                Role::Bishop => self.slide_moves(from, role, &BISHOP_DIRS, out),
                Role::Rook => self.slide_moves(from, role, &ROOK_DIRS, out),
                Role::Queen => {
                    self.slide_moves(from, role, &BISHOP_DIRS, out);
                    self.slide_moves(from, role, &ROOK_DIRS, out);
                }
            }
        }
    }

    fn push_pawn_move(&self, from: Square, to: Square, kind: MoveKind, out: &mut Vec<Move>) {
        let last_rank = home_rank(self.side_to_move.opposite());
        if to.rank() == last_rank {
            for promo in [Role::Queen, Role::Rook, Role::Bishop, Role::Knight] {
                out.push(Move {
                    role: Role::Pawn,
                    from,
                    to,
                    promotion: Some(promo),
                    kind,
                });
            }
        } else {
            out.push(Move {
                role: Role::Pawn,
                from,
                to,
                promotion: None,
                kind,
            });
        }
    }

    fn pawn_moves(&self, from: Square, out: &mut Vec<Move>) {
        let us = self.side_to_move;
        let dir = forward(us);
        if let Some(one) = from.offset(0, dir) {
            if self.board[one].is_empty() {
                self.push_pawn_move(from, one, MoveKind::Normal, out);
                let start_rank = if us == Color::White { 1 } else { 6 };
                if from.rank() == start_rank {
                    let two = one.offset(0, dir).expect("double step stays on board");
                    if self.board[two].is_empty() {
                        out.push(Move {
                            role: Role::Pawn,
                            from,
                            to: two,
                            promotion: None,
                            kind: MoveKind::DoublePush,
                        });
                    }
                }
            }
        }
        for df in [-1, 1] {
            let Some(to) = from.offset(df, dir) else {
                continue;
            };
            if self.board[to].color() == Some(us.opposite()) {
                self.push_pawn_move(from, to, MoveKind::Normal, out);
            } else if Some(to) == self.en_passant && self.board[to].is_empty() {
                let victim = to.offset(0, -dir).expect("behind target is on board");
                if self.board[victim] == Piece::new(us.opposite(), Role::Pawn) {
                    out.push(Move {
                        role: Role::Pawn,
                        from,
                        to,
                        promotion: None,
                        kind: MoveKind::EnPassant,
                    });
                }
            }
        }
    }

    fn step_moves(&self, from: Square, role: Role, steps: &[(i8, i8)], out: &mut Vec<Move>) {
        for &(df, dr) in steps {
            if let Some(to) = from.offset(df, dr) {
                if self.board[to].color() != Some(self.side_to_move) {
                    out.push(Move {
                        role,
                        from,
                        to,
                        promotion: None,
                        kind: MoveKind::Normal,
                    });
                }
            }
        }
    }

    fn slide_moves(&self, from: Square, role: Role, dirs: &[(i8, i8)], out: &mut Vec<Move>) {
        for &(df, dr) in dirs {
            let mut cur = from;
            while let Some(to) = cur.offset(df, dr) {
                let target = self.board[to];
                if target.color() == Some(self.side_to_move) {
                    break;
                }
                out.push(Move {
                    role,
                    from,
                    to,
                    promotion: None,
                    kind: MoveKind::Normal,
                });
                if !target.is_empty() {
                    break;
                }
                cur = to;
            }
        }
    }

    fn castle_moves(&self, from: Square, out: &mut Vec<Move>) {
        let us = self.side_to_move;
        let rank = home_rank(us);
        if from != sq(4, rank) {
            return;
        }
        let them = us.opposite();
        for side in [CastlingSide::King, CastlingSide::Queen] {
            if !self.castling.has(us, side) {
                continue;
            }
            let (rook_file, between, king_path): (u8, &[u8], [u8; 2]) = match side {
                CastlingSide::King => (7, &[5, 6], [5, 6]),
                CastlingSide::Queen => (0, &[1, 2, 3], [3, 2]),
            };
            if self.board[sq(rook_file, rank)] != Piece::new(us, Role::Rook) {
                continue;
            }
            if between.iter().any(|&f| !self.board[sq(f, rank)].is_empty()) {
                continue;
            }
            if is_attacked(&self.board, from, them)
                || king_path
                    .iter()
                    .any(|&f| is_attacked(&self.board, sq(f, rank), them))
            {
                continue;
            }
            out.push(Move {
                role: Role::King,
                from,
                to: sq(king_path[1], rank),
                promotion: None,
                kind: MoveKind::Castle(side),
            });
        }
    }

    fn board_after(&self, m: &Move) -> Board {
        let us = self.side_to_move;
        let mut b = self.board;
        b[m.from] = Piece::Empty;
        let placed = Piece::new(us, m.promotion.unwrap_or(m.role));
        b[m.to] = placed;
        match m.kind {
            MoveKind::EnPassant => {
                let victim = m.to.offset(0, -forward(us)).expect("on board");
                b[victim] = Piece::Empty;
            }
            MoveKind::Castle(side) => {
                let rank = home_rank(us);
                let (rook_from, rook_to) = match side {
                    CastlingSide::King => (7, 5),
                    CastlingSide::Queen => (0, 3),
                };
                b[sq(rook_from, rank)] = Piece::Empty;
                b[sq(rook_to, rank)] = Piece::new(us, Role::Rook);
            }
            MoveKind::Normal | MoveKind::DoublePush => {}
        }
        b
    }

    /// Applies a move known to be legal in this state.
    pub fn play(&self, m: &Move) -> GameState {
        let us = self.side_to_move;
        let board = self.board_after(m);

        let mut castling = self.castling;
        if m.role == Role::King {
            castling.set(us, CastlingSide::King, false);
            castling.set(us, CastlingSide::Queen, false);
        }
        // a rook leaving or being captured on its home corner
        for color in Color::ALL {
            let rank = home_rank(color);
            for (file, side) in [(0, CastlingSide::Queen), (7, CastlingSide::King)] {
                let corner = sq(file, rank);
                if m.from == corner || m.to == corner {
                    castling.set(color, side, false);
                }
            }
        }

        let en_passant = match m.kind {
            MoveKind::DoublePush => m.from.offset(0, forward(us)),
            _ => None,
        };

        GameState {
            board,
            side_to_move: us.opposite(),
            castling,
            en_passant,
            ply: self.ply + 1,
        }
    }

    /// Passes the turn without moving (a null move, as found in annotated
    /// PGN exports). `None` if the side to move is in check.
    pub fn pass(&self) -> Option<GameState> {
        if self.is_check() {
            return None;
        }
        Some(GameState {
            side_to_move: self.side_to_move.opposite(),
            en_passant: None,
            ply: self.ply + 1,
            ..*self
        })
    }
}

/// Whether any piece of `by` attacks `target`.
pub fn is_attacked(board: &Board, target: Square, by: Color) -> bool {
    let pawn = Piece::new(by, Role::Pawn);
    // a pawn of `by` attacks diagonally forward, so look backwards from target
    for df in [-1, 1] {
        if let Some(s) = target.offset(df, -forward(by)) {
            if board[s] == pawn {
                return true;
            }
        }
    }
    let knight = Piece::new(by, Role::Knight);
    if KNIGHT_STEPS
        .iter()
        .filter_map(|&(df, dr)| target.offset(df, dr))
        .any(|s| board[s] == knight)
    {
        return true;
    }
    let king = Piece::new(by, Role::King);
    if KING_STEPS
        .iter()
        .filter_map(|&(df, dr)| target.offset(df, dr))
        .any(|s| board[s] == king)
    {
        return true;
    }
    let queen = Piece::new(by, Role::Queen);
    let rook = Piece::new(by, Role::Rook);
    let bishop = Piece::new(by, Role::Bishop);
    let ray_hits = |dirs: &[(i8, i8)], slider: Piece| {
        dirs.iter().any(|&(df, dr)| {
            let mut cur = target;
            while let Some(s) = cur.offset(df, dr) {
                let p = board[s];
                if !p.is_empty() {
                    return p == slider || p == queen;
                }
                cur = s;
            }
            false
        })
    };
    ray_hits(&ROOK_DIRS, rook) || ray_hits(&BISHOP_DIRS, bishop)
}
