//! Sanity rules over board states.
//!
//! Every reachable position satisfies all fifteen rules below, so a board
//! that breaks one cannot have come from a legal game. The converse does
//! not hold: a board may pass every rule and still be unreachable.
//!
//! | family | predicate (for one color)                                      | category   |
//! |--------|----------------------------------------------------------------|------------|
//! | i      | exactly one king                                               | counting   |
//! | ii     | the two kings are not adjacent (single, color-free rule)      | localizing |
//! | iii    | at most 15 non-king pieces                                     | counting   |
//! | iv     | at most 8 pawns                                                | counting   |
//! | v      | no pawn on rank 1 or rank 8                                    | localizing |
//! | vi     | 8 pawns implies at most 1 queen and 2 each of b, n, r          | counting   |
//! | vii    | fewer than 8 pawns: promoted excess fits in the missing pawns  | counting   |
//! | viii   | 8 pawns and 2 bishops implies bishops on opposite colors       | localizing |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::board::{Board, PieceCount};
use crate::piece::{Color, Role};
use crate::square::Square;

/// Bumped whenever a predicate changes; persisted baselines carry it.
pub const RULE_SET_VERSION: &str = "sanity-rules/1";

/// Rule-violation counting convention used by every report: each of the
/// fifteen instantiated rules contributes at most one violation per board.
pub const COUNTING_CONVENTION: &str = "per-instance-15-rules";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleFamily {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl RuleFamily {
    pub const ALL: [RuleFamily; 8] = [
        RuleFamily::I,
        RuleFamily::II,
        RuleFamily::III,
        RuleFamily::IV,
        RuleFamily::V,
        RuleFamily::VI,
        RuleFamily::VII,
        RuleFamily::VIII,
    ];

    pub fn numeral(self) -> &'static str {
        match self {
            RuleFamily::I => "i",
            RuleFamily::II => "ii",
            RuleFamily::III => "iii",
            RuleFamily::IV => "iv",
            RuleFamily::V => "v",
            RuleFamily::VI => "vi",
            RuleFamily::VII => "vii",
            RuleFamily::VIII => "viii",
        }
    }

    pub fn category(self) -> RuleCategory {
        match self {
            RuleFamily::II | RuleFamily::V | RuleFamily::VIII => RuleCategory::Localizing,
            _ => RuleCategory::Counting,
        }
    }

    /// Family ii is stated once for the pair of kings; every other family
    /// is instantiated per color.
    pub fn is_per_color(self) -> bool {
        self != RuleFamily::II
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleCategory {
    Counting,
    Localizing,
}

impl RuleCategory {
    pub const ALL: [RuleCategory; 2] = [RuleCategory::Counting, RuleCategory::Localizing];
}

impl fmt::Display for RuleCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleCategory::Counting => "counting",
            RuleCategory::Localizing => "localizing",
        })
    }
}

/// One of the fifteen instantiated rules.
///
/// Serialized as `i.b`, `i.w`, `ii`, `iii.b`, ..., `viii.w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    family: RuleFamily,
    color: Option<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule identifier {0:?}")]
pub struct ParseRuleIdError(pub String);

impl RuleId {
    pub const COUNT: usize = 15;

    /// All rules in report order.
    pub const ALL: [RuleId; 15] = {
        use Color::{Black, White};
        use RuleFamily::*;
        const fn r(family: RuleFamily, color: Option<Color>) -> RuleId {
            RuleId { family, color }
        }
        [
            r(I, Some(Black)),
            r(I, Some(White)),
            r(II, None),
            r(III, Some(Black)),
            r(III, Some(White)),
            r(IV, Some(Black)),
            r(IV, Some(White)),
            r(V, Some(Black)),
            r(V, Some(White)),
            r(VI, Some(Black)),
            r(VI, Some(White)),
            r(VII, Some(Black)),
            r(VII, Some(White)),
            r(VIII, Some(Black)),
            r(VIII, Some(White)),
        ]
    };

    /// Returns `None` for an invalid combination (a color on ii, or no
    /// color on any other family).
    pub fn new(family: RuleFamily, color: Option<Color>) -> Option<RuleId> {
        (family.is_per_color() == color.is_some()).then_some(RuleId { family, color })
    }

    pub fn colored(family: RuleFamily, color: Color) -> RuleId {
        RuleId::new(family, Some(color)).expect("family is instantiated per color")
    }

    pub fn kings_apart() -> RuleId {
        RuleId {
            family: RuleFamily::II,
            color: None,
        }
    }

    pub fn family(self) -> RuleFamily {
        self.family
    }

    pub fn color(self) -> Option<Color> {
        self.color
    }

    pub fn category(self) -> RuleCategory {
        self.family.category()
    }

    /// Position of this rule in [`RuleId::ALL`].
    pub fn index(self) -> usize {
        match (self.family, self.color) {
            (RuleFamily::I, Some(c)) => c as usize,
            (RuleFamily::II, _) => 2,
            (f, Some(c)) => 3 + 2 * (f as usize - 2) + c as usize,
            (_, None) => unreachable!("constructor rejects uncolored per-color rules"),
        }
    }

    /// The same rule for the opposite color; ii maps to itself.
    pub fn mirrored(self) -> RuleId {
        RuleId {
            family: self.family,
            color: self.color.map(Color::opposite),
        }
    }
}

pub fn category_of(rule: RuleId) -> RuleCategory {
    rule.category()
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.color {
            Some(c) => write!(f, "{}.{}", self.family.numeral(), c.tag()),
            None => f.write_str(self.family.numeral()),
        }
    }
}

impl FromStr for RuleId {
    type Err = ParseRuleIdError;

    fn from_str(s: &str) -> Result<RuleId, ParseRuleIdError> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| ParseRuleIdError(s.to_owned()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<RuleId, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Set of violated rules, as a bitmask over [`RuleId::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RuleSet(u16);

impl RuleSet {
    pub fn insert(&mut self, rule: RuleId) {
        self.0 |= 1 << rule.index();
    }

    pub fn contains(self, rule: RuleId) -> bool {
        self.0 & (1 << rule.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = RuleId> {
        RuleId::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn touches(self, category: RuleCategory) -> bool {
        self.iter().any(|r| r.category() == category)
    }
}

/// Result of checking one board against all rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationReport {
    violated: RuleSet,
}

impl ViolationReport {
    /// Violated rules in report order; each appears once.
    pub fn violations(&self) -> Vec<RuleId> {
        self.violated.iter().collect()
    }

    pub fn rule_set(&self) -> RuleSet {
        self.violated
    }

    pub fn is_sane(&self) -> bool {
        self.violated.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.violated.len()
    }

    pub fn is_violated(&self, rule: RuleId) -> bool {
        self.violated.contains(rule)
    }
}

/// Per-color summary gathered in one pass over the cells.
#[derive(Debug, Clone, Copy)]
struct Tally {
    counts: PieceCount,
    pawn_on_back_rank: [bool; 2],
    // dark-square parity of the first two bishops seen, per color
    bishop_dark: [[bool; 2]; 2],
    kings_adjacent: bool,
}

impl Tally {
    fn new(board: &Board) -> Tally {
        let counts = board.piece_count();
        let mut pawn_on_back_rank = [false; 2];
        let mut bishop_dark = [[false; 2]; 2];
        let mut bishops_seen = [0usize; 2];
        let mut kings = [0u64; 2];

        for (i, &piece) in board.cells().iter().enumerate() {
            let (Some(color), Some(role)) = (piece.color(), piece.role()) else {
                continue;
            };
            let sq = Square::from_index(i).expect("64 cells");
            let c = color as usize;
            match role {
                Role::Pawn if sq.rank() == 0 || sq.rank() == 7 => pawn_on_back_rank[c] = true,
                Role::Bishop => {
                    if bishops_seen[c] < 2 {
                        bishop_dark[c][bishops_seen[c]] = sq.is_dark();
                    }
                    bishops_seen[c] += 1;
                }
                Role::King => kings[c] |= 1 << i,
                _ => {}
            }
        }

        let kings_adjacent =
            kings[Color::Black as usize] & king_zone(kings[Color::White as usize]) != 0;

        Tally {
            counts,
            pawn_on_back_rank,
            bishop_dark,
            kings_adjacent,
        }
    }

    fn satisfies(&self, rule: RuleId) -> bool {
        let Some(color) = rule.color else {
            return !self.kings_adjacent;
        };
        let n = |role| self.counts.of(color, role) as i32;
        let pawns = n(Role::Pawn);
        match rule.family {
            RuleFamily::I => n(Role::King) == 1,
            RuleFamily::II => unreachable!("handled above"),
            RuleFamily::III => {
                pawns + n(Role::Queen) + n(Role::Knight) + n(Role::Bishop) + n(Role::Rook) <= 15
            }
            RuleFamily::IV => pawns <= 8,
            RuleFamily::V => !self.pawn_on_back_rank[color as usize],
            RuleFamily::VI => {
                pawns != 8
                    || (n(Role::Queen) <= 1
                        && n(Role::Bishop) <= 2
                        && n(Role::Knight) <= 2
                        && n(Role::Rook) <= 2)
            }
            RuleFamily::VII => {
                let excess = (n(Role::Queen) - 1).max(0)
                    + (n(Role::Bishop) - 2).max(0)
                    + (n(Role::Knight) - 2).max(0)
                    + (n(Role::Rook) - 2).max(0);
                pawns >= 8 || excess <= 8 - pawns
            }
            RuleFamily::VIII => {
                if pawns == 8 && n(Role::Bishop) == 2 {
                    let [a, b] = self.bishop_dark[color as usize];
                    a != b
                } else {
                    true
                }
            }
        }
    }
}

/// Squares within Chebyshev distance 1 of any square in `mask`, the mask
/// itself included.
fn king_zone(mask: u64) -> u64 {
    const NOT_A: u64 = 0xfefe_fefe_fefe_fefe;
    const NOT_H: u64 = 0x7f7f_7f7f_7f7f_7f7f;
    let row = mask | ((mask << 1) & NOT_A) | ((mask >> 1) & NOT_H);
    row | (row << 8) | (row >> 8)
}

/// Whether `board` satisfies `rule`.
pub fn check_rule(board: &Board, rule: RuleId) -> bool {
    Tally::new(board).satisfies(rule)
}

/// Checks all fifteen rules in a single pass over the board.
pub fn check(board: &Board) -> ViolationReport {
    let tally = Tally::new(board);
    let mut violated = RuleSet::default();
    for rule in RuleId::ALL {
        if !tally.satisfies(rule) {
            violated.insert(rule);
        }
    }
    ViolationReport { violated }
}

pub fn is_sane(board: &Board) -> bool {
    check(board).is_sane()
}
