//! The uniform random guesser and its per-rule violation frequencies.
//!
//! Every cell of a guessed board is drawn independently and uniformly from
//! the 13 classes. Board `i` of a run with seed `s` is drawn from the ChaCha
//! stream `i` keyed by `s`, so any partition of the index range across
//! threads reproduces the serial tallies exactly.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::board::Board;
use crate::piece::Piece;
use crate::rules::{self, RuleFamily, RuleId, RULE_SET_VERSION};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

const CHUNK: u64 = 4096;

/// Draws a board with every cell i.i.d. uniform over the 13 classes.
pub fn sample_uniform_board<R: Rng + ?Sized>(rng: &mut R) -> Board {
    let mut cells = [Piece::Empty; 64];
    for cell in &mut cells {
        *cell = Piece::ALL[rng.random_range(0..Piece::COUNT)];
    }
    Board::from_cells(cells)
}

/// The generator for draw `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Board number `index` of the uniform sequence keyed by `seed`.
pub fn uniform_board(seed: u64, index: u64) -> Board {
    sample_uniform_board(&mut stream_rng(seed, index))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleFrequency {
    pub violations: u64,
    pub frequency: f64,
    pub stderr: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("cannot read or write baseline cache: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed baseline cache: {0}")]
    Format(#[from] serde_json::Error),
    #[error("baseline cache is missing rule {0}")]
    MissingRule(RuleId),
}

/// Monte-Carlo violation frequencies of the uniform guesser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEstimate {
    pub rule_set_version: String,
    pub seed: u64,
    pub samples: u64,
    pub per_rule: BTreeMap<RuleId, RuleFrequency>,
}

impl BaselineEstimate {
    fn from_tally(tally: &[u64; 15], samples: u64, seed: u64) -> BaselineEstimate {
        let per_rule = RuleId::ALL
            .iter()
            .map(|r| {
                let violations = tally[r.index()];
                let f = violations as f64 / samples as f64;
                (
                    *r,
                    RuleFrequency {
                        violations,
                        frequency: f,
                        stderr: (f * (1.0 - f) / samples as f64).sqrt(),
                    },
                )
            })
            .collect();
        BaselineEstimate {
            rule_set_version: RULE_SET_VERSION.to_owned(),
            seed,
            samples,
            per_rule,
        }
    }

    pub fn frequencies(&self) -> BTreeMap<RuleId, f64> {
        self.per_rule
            .iter()
            .map(|(r, f)| (*r, f.frequency))
            .collect()
    }

    pub fn get(&self, rule: RuleId) -> Option<&RuleFrequency> {
        self.per_rule.get(&rule)
    }

    /// Whether this estimate was produced by the current rule set with the
    /// given parameters.
    pub fn is_current(&self, samples: u64, seed: u64) -> bool {
        self.rule_set_version == RULE_SET_VERSION && self.samples == samples && self.seed == seed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }

    pub fn from_json(text: &str) -> Result<BaselineEstimate, BaselineError> {
        let est: BaselineEstimate = serde_json::from_str(text)?;
        if est.samples == 0 {
            return Err(BaselineError::NoSamples);
        }
        if let Some(r) = RuleId::ALL.iter().find(|r| !est.per_rule.contains_key(r)) {
            return Err(BaselineError::MissingRule(*r));
        }
        Ok(est)
    }

    pub fn load(path: &Path) -> Result<BaselineEstimate, BaselineError> {
        BaselineEstimate::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), BaselineError> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Loads a cache if it matches the current rule set; otherwise (or if
    /// the file is absent) recomputes with the cache's parameters, or the
    /// given defaults, and rewrites it.
    pub fn load_or_refresh(
        path: &Path,
        samples: u64,
        seed: u64,
    ) -> Result<(BaselineEstimate, bool), BaselineError> {
        let (samples, seed) = match BaselineEstimate::load(path) {
            Ok(est) if est.rule_set_version == RULE_SET_VERSION => return Ok((est, false)),
            Ok(est) => (est.samples, est.seed),
            Err(BaselineError::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => {
                (samples, seed)
            }
            Err(e) => return Err(e),
        };
        let est = estimate_random_frequencies(samples, seed)?;
        est.save(path)?;
        Ok((est, true))
    }
}

fn tally_range(seed: u64, range: std::ops::Range<u64>) -> [u64; 15] {
    let mut tally = [0u64; 15];
    for i in range {
        let report = rules::check(&uniform_board(seed, i));
        for r in report.rule_set().iter() {
            tally[r.index()] += 1;
        }
    }
    tally
}

/// Estimates per-rule violation frequencies from `samples` uniform boards.
/// Parallel, and bit-identical to a serial run for the same arguments.
pub fn estimate_random_frequencies(
    samples: u64,
    seed: u64,
) -> Result<BaselineEstimate, BaselineError> {
    if samples == 0 {
        return Err(BaselineError::NoSamples);
    }
    let chunks = samples.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| tally_range(seed, c * CHUNK..((c + 1) * CHUNK).min(samples)))
        .reduce(
            || [0u64; 15],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(BaselineEstimate::from_tally(&tally, samples, seed))
}

/// Single-threaded reference for [`estimate_random_frequencies`].
pub fn estimate_random_frequencies_serial(
    samples: u64,
    seed: u64,
) -> Result<BaselineEstimate, BaselineError> {
    if samples == 0 {
        return Err(BaselineError::NoSamples);
    }
    Ok(BaselineEstimate::from_tally(
        &tally_range(seed, 0..samples),
        samples,
        seed,
    ))
}

const P_CLASS: f64 = 1.0 / 13.0;

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    // C(n, k) built incrementally; exact in f64 for n = 64
    let mut coeff = 1.0f64;
    for i in 0..k {
        coeff = coeff * f64::from(n - i) / f64::from(i + 1);
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

fn binomial_upper_tail(n: u32, above: u32, p: f64) -> f64 {
    // summed from the far tail inwards to keep small terms
    (above + 1..=n).rev().map(|k| binomial_pmf(n, k, p)).sum()
}

/// Exact violation probability of `rule` under the uniform guesser, for the
/// families whose predicates reduce to binomial counts over independent
/// cells (i, iii, iv, v). `None` for the others.
pub fn analytic_frequency(rule: RuleId) -> Option<f64> {
    match rule.family() {
        // |k| != 1 with |k| ~ Bin(64, 1/13)
        RuleFamily::I => Some(1.0 - binomial_pmf(64, 1, P_CLASS)),
        // five classes counted: Bin(64, 5/13) > 15
        RuleFamily::III => Some(binomial_upper_tail(64, 15, 5.0 * P_CLASS)),
        RuleFamily::IV => Some(binomial_upper_tail(64, 8, P_CLASS)),
        // some pawn of the color among the 16 back-rank cells
        RuleFamily::V => Some(1.0 - (1.0 - P_CLASS).powi(16)),
        RuleFamily::II | RuleFamily::VI | RuleFamily::VII | RuleFamily::VIII => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piece::Color;

    #[test]
    fn same_seed_same_board() {
        assert_eq!(uniform_board(7, 3), uniform_board(7, 3));
        assert_ne!(uniform_board(7, 3), uniform_board(7, 4));
        assert_ne!(uniform_board(7, 3), uniform_board(8, 3));
    }

    #[test]
    fn sample_moments() {
        // E[occupied] = 64 * 12/13, E[|k|] = 64/13
        let n = 20_000u64;
        let mut occupied = 0u64;
        let mut kings = 0u64;
        for i in 0..n {
            let b = uniform_board(1, i);
            occupied += b.occupied() as u64;
            kings += u64::from(b.piece_count().get(Piece::BlackKing));
        }
        let mean_occ = occupied as f64 / n as f64;
        let mean_k = kings as f64 / n as f64;
        // sd of occupied per board = sqrt(64 * 12/169) ~ 2.13; 5 sd of mean
        assert!((mean_occ - 64.0 * 12.0 / 13.0).abs() < 5.0 * 2.14 / (n as f64).sqrt());
        assert!((mean_k - 64.0 / 13.0).abs() < 5.0 * 2.14 / (n as f64).sqrt());
    }

    // Frozen from an exact rational evaluation of the binomial expressions.
    #[test]
    fn analytic_values() {
        let close = |r: &str, want: f64| {
            let got = analytic_frequency(r.parse().unwrap()).unwrap();
            assert!((got - want).abs() < 1e-12, "{r}: {got} vs {want}");
        };
        close("i.b", 0.968_214_874_733_189_5);
        close("i.w", 0.968_214_874_733_189_5);
        close("iii.b", 0.991_939_706_340_154_6);
        close("iv.w", 0.055_585_662_448_215_195);
        close("v.b", 0.722_152_623_869_747_2);
        for fam in ["ii", "vi.b", "vii.w", "viii.b"] {
            assert_eq!(analytic_frequency(fam.parse().unwrap()), None, "{fam}");
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let par = estimate_random_frequencies(10_000, 42).unwrap();
        let ser = estimate_random_frequencies_serial(10_000, 42).unwrap();
        assert_eq!(par, ser);
        assert_eq!(par.to_json(), ser.to_json());
    }

    #[test]
    fn stderr_formula() {
        let est = estimate_random_frequencies(5_000, 3).unwrap();
        for f in est.per_rule.values() {
            assert!((0.0..=1.0).contains(&f.frequency));
            let want = (f.frequency * (1.0 - f.frequency) / 5_000.0).sqrt();
            assert_eq!(f.stderr, want);
        }
        assert_eq!(est.per_rule.len(), 15);
        assert!(matches!(
            estimate_random_frequencies(0, 1),
            Err(BaselineError::NoSamples)
        ));
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let est = estimate_random_frequencies(1_000, 9).unwrap();
        let back = BaselineEstimate::from_json(&est.to_json()).unwrap();
        assert_eq!(back, est);
        let mut v: serde_json::Value = serde_json::from_str(&est.to_json()).unwrap();
        v["per_rule"].as_object_mut().unwrap().remove("ii");
        assert!(matches!(
            BaselineEstimate::from_json(&v.to_string()),
            Err(BaselineError::MissingRule(_))
        ));
        assert!(matches!(
            BaselineEstimate::from_json("{"),
            Err(BaselineError::Format(_))
        ));
    }

    #[test]
    fn cache_refresh_on_version_mismatch() {
        let dir = std::env::temp_dir().join(format!("baseline-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        let _ = std::fs::remove_file(&path);

        let (first, computed) = BaselineEstimate::load_or_refresh(&path, 500, 11).unwrap();
        assert!(computed);
        let (again, computed) = BaselineEstimate::load_or_refresh(&path, 500, 11).unwrap();
        assert!(!computed);
        assert_eq!(first, again);

        let mut stale = first.clone();
        stale.rule_set_version = "sanity-rules/0".into();
        stale.samples = 300;
        stale.save(&path).unwrap();
        let (fresh, computed) = BaselineEstimate::load_or_refresh(&path, 500, 11).unwrap();
        assert!(computed);
        assert_eq!(fresh.samples, 300);
        assert_eq!(fresh.rule_set_version, RULE_SET_VERSION);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn white_and_black_rates_agree() {
        let est = estimate_random_frequencies(20_000, 5).unwrap();
        for fam in RuleFamily::ALL.iter().filter(|f| f.is_per_color()) {
            let b = est.get(RuleId::colored(*fam, Color::Black)).unwrap();
            let w = est.get(RuleId::colored(*fam, Color::White)).unwrap();
            let se = (b.stderr.powi(2) + w.stderr.powi(2)).sqrt();
            assert!(
                (b.frequency - w.frequency).abs() <= 5.0 * se + 1e-12,
                "{fam:?}"
            );
        }
    }
}
