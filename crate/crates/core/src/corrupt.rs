//! Synthetic noisy predictor: independent per-cell replacement.

use rand::Rng;

use crate::baseline::stream_rng;
use crate::board::Board;
use crate::piece::Piece;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("epsilon must lie in [0, 1], got {0}")]
pub struct EpsilonError(pub f64);

/// Replace each cell, with probability `epsilon`, by a uniform draw over the
/// 13 classes (which may coincide with the original).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    epsilon: f64,
    seed: u64,
}

impl CorruptionSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<CorruptionSpec, EpsilonError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(EpsilonError(epsilon));
        }
        Ok(CorruptionSpec { epsilon, seed })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Corrupts board number `index` of a corpus.
    ///
    /// Each cell consumes the same two draws whatever epsilon is, so for a
    /// fixed seed the cells replaced at a smaller epsilon are a subset of
    /// those replaced at a larger one.
    pub fn apply(&self, board: &Board, index: u64) -> Board {
        let mut rng = stream_rng(self.seed, index);
        let mut cells = *board.cells();
        for cell in &mut cells {
            let u: f64 = rng.random();
            let replacement = Piece::ALL[rng.random_range(0..Piece::COUNT)];
            if u < self.epsilon {
                *cell = replacement;
            }
        }
        Board::from_cells(cells)
    }
}
