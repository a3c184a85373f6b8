//! Accuracy and coherence metrics over aligned truth/prediction pairs.
//!
//! All aggregates are built from integer tallies, so every metric is
//! independent of the order in which pairs are visited. The per-pair F1
//! is a ratio `2m / d` with `d <= 128`; numerators are summed per
//! denominator and divided once at the end, in a fixed order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineEstimate;
use crate::board::Board;
use crate::rules::{self, RuleCategory, RuleId, COUNTING_CONVENTION};

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("evaluation set is empty")]
    EmptySet,
    #[error("{truth} ground-truth boards but {predictions} predictions")]
    LengthMismatch { truth: usize, predictions: usize },
    #[error("random-guesser frequency for rule {0} is zero; the baseline has not converged")]
    ZeroBaseline(RuleId),
    #[error("rule {0} is missing from one of the frequency maps")]
    MissingRule(RuleId),
}

/// Index-aligned ground truth and predictions; never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalSet {
    pairs: Vec<(Board, Board)>,
}

impl EvalSet {
    pub fn new(pairs: Vec<(Board, Board)>) -> Result<EvalSet, MetricsError> {
        if pairs.is_empty() {
            return Err(MetricsError::EmptySet);
        }
        Ok(EvalSet { pairs })
    }

    pub fn from_aligned(truth: &[Board], predictions: &[Board]) -> Result<EvalSet, MetricsError> {
        if truth.len() != predictions.len() {
            return Err(MetricsError::LengthMismatch {
                truth: truth.len(),
                predictions: predictions.len(),
            });
        }
        EvalSet::new(
            truth
                .iter()
                .copied()
                .zip(predictions.iter().copied())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pairs(&self) -> &[(Board, Board)] {
        &self.pairs
    }

    fn tally(&self) -> EvalAccumulator {
        let mut acc = EvalAccumulator::default();
        for (y, yhat) in &self.pairs {
            acc.push(y, yhat);
        }
        acc
    }
}

/// Dice overlap of the non-empty cells on which the two boards agree:
/// `2 * matches / (|y| + |yhat|)`, and 1 when both boards are empty.
pub fn pair_f1(y: &Board, yhat: &Board) -> f64 {
    let (matches, denom) = dice_terms(y, yhat);
    if denom == 0 {
        1.0
    } else {
        (2 * matches) as f64 / denom as f64
    }
}

fn dice_terms(y: &Board, yhat: &Board) -> (u32, u32) {
    let mut matches = 0;
    let mut denom = 0;
    for (a, b) in y.cells().iter().zip(yhat.cells()) {
        denom += u32::from(!a.is_empty()) + u32::from(!b.is_empty());
        matches += u32::from(a == b && !a.is_empty());
    }
    (matches, denom)
}

/// Exact sum of `2m/d` terms, bucketed by denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
struct DiceSum {
    numerators: [u64; 129],
}

impl Default for DiceSum {
    fn default() -> Self {
        DiceSum {
            numerators: [0; 129],
        }
    }
}

impl DiceSum {
    fn add(&mut self, matches: u32, denom: u32) {
        // both boards empty: a perfect score, stored in slot 0
        if denom == 0 {
            self.numerators[0] += 1;
        } else {
            self.numerators[denom as usize] += u64::from(2 * matches);
        }
    }

    fn merge(&mut self, other: &DiceSum) {
        for (a, b) in self.numerators.iter_mut().zip(other.numerators.iter()) {
            *a += b;
        }
    }

    fn total(&self) -> f64 {
        let mut sum = self.numerators[0] as f64;
        for (d, &num) in self.numerators.iter().enumerate().skip(1) {
            if num != 0 {
                sum += num as f64 / d as f64;
            }
        }
        sum
    }
}

/// Streaming tallies behind every metric. Push pairs in any order, merge
/// partial accumulators from parallel workers, then read the metrics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalAccumulator {
    n: u64,
    exact: u64,
    dice: DiceSum,
    sane_dice: DiceSum,
    insane: u64,
    violations: u64,
    per_rule: [u64; 15],
    violators_by_category: [u64; 2],
    insane_truth: u64,
}

impl EvalAccumulator {
    pub fn new() -> EvalAccumulator {
        EvalAccumulator::default()
    }

    pub fn push(&mut self, y: &Board, yhat: &Board) {
        let report = rules::check(yhat);
        let (matches, denom) = dice_terms(y, yhat);
        self.n += 1;
        self.exact += u64::from(y == yhat);
        self.dice.add(matches, denom);
        if report.is_sane() {
            self.sane_dice.add(matches, denom);
        } else {
            self.insane += 1;
        }
        let violated = report.rule_set();
        self.violations += violated.len() as u64;
        for rule in violated.iter() {
            self.per_rule[rule.index()] += 1;
        }
        for (i, cat) in RuleCategory::ALL.iter().enumerate() {
            self.violators_by_category[i] += u64::from(violated.touches(*cat));
        }
        self.insane_truth += u64::from(!rules::is_sane(y));
    }

    pub fn merge(&mut self, other: &EvalAccumulator) {
        self.n += other.n;
        self.exact += other.exact;
        self.dice.merge(&other.dice);
        self.sane_dice.merge(&other.sane_dice);
        self.insane += other.insane;
        self.violations += other.violations;
        for (a, b) in self.per_rule.iter_mut().zip(other.per_rule) {
            *a += b;
        }
        for (a, b) in self
            .violators_by_category
            .iter_mut()
            .zip(other.violators_by_category)
        {
            *a += b;
        }
        self.insane_truth += other.insane_truth;
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Ground-truth boards that are themselves insane (a data problem, not
    /// a model one).
    pub fn insane_ground_truth(&self) -> u64 {
        self.insane_truth
    }

    fn nonempty(&self) -> Result<f64, MetricsError> {
        if self.n == 0 {
            Err(MetricsError::EmptySet)
        } else {
            Ok(self.n as f64)
        }
    }

    pub fn exact_match_pct(&self) -> Result<f64, MetricsError> {
        Ok(100.0 * self.exact as f64 / self.nonempty()?)
    }

    pub fn f1(&self) -> Result<f64, MetricsError> {
        Ok(self.dice.total() / self.nonempty()?)
    }

    pub fn contradiction_pct(&self) -> Result<f64, MetricsError> {
        Ok(100.0 * self.insane as f64 / self.nonempty()?)
    }

    pub fn sane_f1(&self) -> Result<f64, MetricsError> {
        Ok(self.sane_dice.total() / self.nonempty()?)
    }

    pub fn mean_violations(&self) -> Result<f64, MetricsError> {
        Ok(self.violations as f64 / self.nonempty()?)
    }

    pub fn per_rule_frequency(&self) -> Result<BTreeMap<RuleId, f64>, MetricsError> {
        let n = self.nonempty()?;
        Ok(RuleId::ALL
            .iter()
            .map(|r| (*r, self.per_rule[r.index()] as f64 / n))
            .collect())
    }

    pub fn category_prevalence(&self) -> Result<CategoryPrevalence, MetricsError> {
        let n = self.nonempty()?;
        let stat = |i: usize| {
            let count = self.violators_by_category[i];
            PrevalenceStat {
                violating_predictions: count,
                among_violators: (self.insane > 0).then(|| count as f64 / self.insane as f64),
                among_all: count as f64 / n,
            }
        };
        Ok(CategoryPrevalence {
            violators: self.insane,
            counting: stat(0),
            localizing: stat(1),
        })
    }

    /// Full report; adjusted likelihoods are filled in when a baseline is
    /// supplied.
    pub fn report(&self, baseline: Option<&BaselineEstimate>) -> Result<EvalReport, MetricsError> {
        let f1 = self.f1()?;
        let sf1 = self.sane_f1()?;
        let freqs = self.per_rule_frequency()?;
        let adjusted = match baseline {
            Some(b) => Some(adjusted_likelihood(&freqs, &b.frequencies())?),
            None => None,
        };
        let per_rule = RuleId::ALL
            .iter()
            .map(|r| {
                (
                    *r,
                    RuleStat {
                        violations: self.per_rule[r.index()],
                        frequency: freqs[r],
                        adjusted_likelihood: adjusted.as_ref().map(|a| a.per_rule[r]),
                    },
                )
            })
            .collect();
        let prevalence = self.category_prevalence()?;
        let category_entry = |cat: RuleCategory, stat: PrevalenceStat| CategoryStat {
            rules: RuleId::ALL.iter().filter(|r| r.category() == cat).count(),
            violating_predictions: stat.violating_predictions,
            prevalence_among_violators: stat.among_violators,
            prevalence_among_all: stat.among_all,
            mean_adjusted_likelihood: adjusted.as_ref().map(|a| a.per_category[&cat]),
        };
        Ok(EvalReport {
            report_version: REPORT_VERSION.to_owned(),
            convention: COUNTING_CONVENTION.to_owned(),
            n: self.n,
            em_pct: self.exact_match_pct()?,
            f1,
            c_pct: self.contradiction_pct()?,
            sf1,
            gap: f1 - sf1,
            mu_c: self.mean_violations()?,
            exact_matches: self.exact,
            insane_predictions: self.insane,
            total_violations: self.violations,
            insane_ground_truth: self.insane_truth,
            per_rule,
            per_category: PerCategory {
                counting: category_entry(RuleCategory::Counting, prevalence.counting),
                localizing: category_entry(RuleCategory::Localizing, prevalence.localizing),
            },
            baseline: baseline.map(|b| BaselineRef {
                samples: b.samples,
                seed: b.seed,
                rule_set_version: b.rule_set_version.clone(),
            }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrevalenceStat {
    pub violating_predictions: u64,
    /// Share of rule-violating predictions that break at least one rule of
    /// this category; `None` when no prediction violates anything.
    pub among_violators: Option<f64>,
    /// Share of all predictions that break at least one rule of this
    /// category.
    pub among_all: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryPrevalence {
    pub violators: u64,
    pub counting: PrevalenceStat,
    pub localizing: PrevalenceStat,
}

impl CategoryPrevalence {
    pub fn get(&self, cat: RuleCategory) -> &PrevalenceStat {
        match cat {
            RuleCategory::Counting => &self.counting,
            RuleCategory::Localizing => &self.localizing,
        }
    }
}

pub fn exact_match(set: &EvalSet) -> f64 {
    set.tally().exact_match_pct().expect("EvalSet is non-empty")
}

/// Mean of [`pair_f1`] over the set.
pub fn f1(set: &EvalSet) -> f64 {
    set.tally().f1().expect("EvalSet is non-empty")
}

/// Percentage of predictions that break at least one rule. Ground truth is
/// not consulted.
pub fn contradiction_pct(set: &EvalSet) -> f64 {
    set.tally()
        .contradiction_pct()
        .expect("EvalSet is non-empty")
}

/// Like [`f1`], but insane predictions score zero while staying in the
/// denominator.
pub fn sane_f1(set: &EvalSet) -> f64 {
    set.tally().sane_f1().expect("EvalSet is non-empty")
}

pub fn mean_violations(set: &EvalSet) -> f64 {
    set.tally().mean_violations().expect("EvalSet is non-empty")
}

pub fn per_rule_frequency(set: &EvalSet) -> BTreeMap<RuleId, f64> {
    set.tally()
        .per_rule_frequency()
        .expect("EvalSet is non-empty")
}

pub fn category_prevalence(set: &EvalSet) -> CategoryPrevalence {
    set.tally()
        .category_prevalence()
        .expect("EvalSet is non-empty")
}

pub fn evaluate(
    set: &EvalSet,
    baseline: Option<&BaselineEstimate>,
) -> Result<EvalReport, MetricsError> {
    set.tally().report(baseline)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedLikelihood {
    pub per_rule: BTreeMap<RuleId, f64>,
    /// Mean ratio over the rules of each category.
    pub per_category: BTreeMap<RuleCategory, f64>,
}

/// Ratio of each rule's violation frequency under the model to its
/// frequency under the uniform random guesser.
pub fn adjusted_likelihood(
    f_model: &BTreeMap<RuleId, f64>,
    f_random: &BTreeMap<RuleId, f64>,
) -> Result<AdjustedLikelihood, MetricsError> {
    let mut per_rule = BTreeMap::new();
    for rule in RuleId::ALL {
        let model = *f_model.get(&rule).ok_or(MetricsError::MissingRule(rule))?;
        let random = *f_random.get(&rule).ok_or(MetricsError::MissingRule(rule))?;
        if random <= 0.0 {
            return Err(MetricsError::ZeroBaseline(rule));
        }
        per_rule.insert(rule, model / random);
    }
    let per_category = RuleCategory::ALL
        .iter()
        .map(|cat| {
            let ratios: Vec<f64> = per_rule
                .iter()
                .filter(|(r, _)| r.category() == *cat)
                .map(|(_, v)| *v)
                .collect();
            (*cat, ratios.iter().sum::<f64>() / ratios.len() as f64)
        })
        .collect();
    Ok(AdjustedLikelihood {
        per_rule,
        per_category,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleStat {
    pub violations: u64,
    pub frequency: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub adjusted_likelihood: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStat {
    pub rules: usize,
    pub violating_predictions: u64,
    /// `null` when there are no violating predictions.
    pub prevalence_among_violators: Option<f64>,
    pub prevalence_among_all: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_adjusted_likelihood: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerCategory {
    pub counting: CategoryStat,
    pub localizing: CategoryStat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRef {
    pub samples: u64,
    pub seed: u64,
    pub rule_set_version: String,
}

/// Aggregate metrics for one prediction set. EM and C are percentages;
/// F1, sF1 and the per-rule frequencies are fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub report_version: String,
    pub convention: String,
    pub n: u64,
    pub em_pct: f64,
    pub f1: f64,
    pub c_pct: f64,
    pub sf1: f64,
    pub gap: f64,
    pub mu_c: f64,
    pub exact_matches: u64,
    pub insane_predictions: u64,
    pub total_violations: u64,
    pub insane_ground_truth: u64,
    pub per_rule: BTreeMap<RuleId, RuleStat>,
    pub per_category: PerCategory,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub baseline: Option<BaselineRef>,
}
