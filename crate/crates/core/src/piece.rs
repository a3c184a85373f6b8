//! Piece classes: the empty cell plus six roles in two colors.

use std::fmt;

/// Side of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Black, Color::White];

    #[inline]
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    /// Short tag used in rule identifiers (`b` / `w`).
    pub fn tag(self) -> char {
        match self {
            Color::Black => 'b',
            Color::White => 'w',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Pawn,
        Role::Knight,
        Role::Bishop,
        Role::Rook,
        Role::Queen,
        Role::King,
    ];

    /// Lowercase acronym (`p`, `n`, `b`, `r`, `q`, `k`).
    pub fn char(self) -> char {
        match self {
            Role::Pawn => 'p',
            Role::Knight => 'n',
            Role::Bishop => 'b',
            Role::Rook => 'r',
            Role::Queen => 'q',
            Role::King => 'k',
        }
    }

    pub fn from_char(c: char) -> Option<Role> {
        Some(match c.to_ascii_lowercase() {
            'p' => Role::Pawn,
            'n' => Role::Knight,
            'b' => Role::Bishop,
            'r' => Role::Rook,
            'q' => Role::Queen,
            'k' => Role::King,
            _ => return None,
        })
    }
}

/// Content of one board cell.
///
/// The discriminants are the frozen array-interchange codes: `x` is 0, the
/// black pieces `p n b r q k` are 1..=6 and the white pieces `P N B R Q K`
/// are 7..=12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum Piece {
    #[default]
    Empty = 0,
    BlackPawn,
    BlackKnight,
    BlackBishop,
    BlackRook,
    BlackQueen,
    BlackKing,
    WhitePawn,
    WhiteKnight,
    WhiteBishop,
    WhiteRook,
    WhiteQueen,
    WhiteKing,
}

impl Piece {
    pub const COUNT: usize = 13;

    /// All 13 classes in code order.
    pub const ALL: [Piece; 13] = [
        Piece::Empty,
        Piece::BlackPawn,
        Piece::BlackKnight,
        Piece::BlackBishop,
        Piece::BlackRook,
        Piece::BlackQueen,
        Piece::BlackKing,
        Piece::WhitePawn,
        Piece::WhiteKnight,
        Piece::WhiteBishop,
        Piece::WhiteRook,
        Piece::WhiteQueen,
        Piece::WhiteKing,
    ];

    pub fn new(color: Color, role: Role) -> Piece {
        let base = match color {
            Color::Black => 1,
            Color::White => 7,
        };
        Piece::ALL[base + role as usize]
    }

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Piece> {
        Piece::ALL.get(code as usize).copied()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self == Piece::Empty
    }

    pub fn color(self) -> Option<Color> {
        match self.code() {
            0 => None,
            1..=6 => Some(Color::Black),
            _ => Some(Color::White),
        }
    }

    pub fn role(self) -> Option<Role> {
        match self.code() {
            0 => None,
            c => Some(Role::ALL[((c - 1) % 6) as usize]),
        }
    }

    /// The same role in the other color; `Empty` maps to itself.
    pub fn flip_color(self) -> Piece {
        match (self.color(), self.role()) {
            (Some(c), Some(r)) => Piece::new(c.opposite(), r),
            _ => Piece::Empty,
        }
    }

    /// FEN acronym; `x` for the empty class.
    pub fn char(self) -> char {
        match (self.color(), self.role()) {
            (Some(Color::Black), Some(r)) => r.char(),
            (Some(Color::White), Some(r)) => r.char().to_ascii_uppercase(),
            _ => 'x',
        }
    }

    /// Parses a piece acronym. `x` is accepted for the empty class.
    pub fn from_char(c: char) -> Option<Piece> {
        if c == 'x' {
            return Some(Piece::Empty);
        }
        let role = Role::from_char(c)?;
        let color = if c.is_ascii_uppercase() {
            Color::White
        } else {
            Color::Black
        };
        Some(Piece::new(color, role))
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.char())
    }
}
