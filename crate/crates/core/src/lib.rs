//! Logical-consistency checking and evaluation for chess board-state
//! predictions.
//!
//! A predicted [`Board`] is any assignment of the 13 piece classes to the 64
//! squares. [`rules::check`] tests it against fifteen cheap necessary
//! conditions for reachability; [`metrics`] scores prediction sets for
//! accuracy and coherence; [`baseline`] normalizes rule-violation rates
//! against a uniform random guesser; [`replay`] turns PGN game records into
//! ground-truth board sequences.
//!
//! ```
//! use chess_coherence::{rules, Board};
//!
//! let board = Board::parse_fen("8/8/8/3kK3/8/8/8/8").unwrap();
//! let report = rules::check(&board);
//! assert!(!report.is_sane());
//! assert_eq!(report.violations()[0].to_string(), "ii");
//! ```

pub mod baseline;
pub mod board;
pub mod corrupt;
pub mod metrics;
pub mod piece;
pub mod replay;
pub mod rules;
pub mod square;

pub use board::{ArrayError, Board, FenError, PieceCount};
pub use piece::{Color, Piece, Role};
pub use rules::{check, check_rule, RuleCategory, RuleId, ViolationReport};
pub use square::Square;
