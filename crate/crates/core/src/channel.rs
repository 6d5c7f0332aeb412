//! Per-letter substitution channels: support-level conditions, seeded
//! sampling, and exhaustive outcome enumeration.
//!
//! A channel is a row-stochastic matrix `p(a -> a')` over one alphabet. The
//! *support* is the set of entries that are exactly positive; zero entries
//! are structural zeros, never tolerances, because the detection guarantees
//! are statements about the support.
//!
//! Sampling contract: [`transmit`] draws one uniform number per letter
//! position, in position order, from a ChaCha8 stream seeded with the given
//! 64-bit seed (the uniform is the top 53 bits of `next_u64`, scaled to
//! `[0, 1)`), and inverts the row CDF in letter-index order. Identical
//! inputs and seed give identical output on every platform.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, LetterId, SignaturePartition, Word};
use crate::error::Error;

/// Tolerance for row sums at construction.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A row-stochastic per-letter corruption model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct ChannelModel {
    alphabet: Alphabet,
    rows: Vec<Vec<f64>>,
}

impl ChannelModel {
    pub fn new(alphabet: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        if rows.len() != alphabet.len() {
            return Err(Error::RowCount {
                expected: alphabet.len(),
                got: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            let letter = alphabet.letters()[i].clone();
            if row.len() != alphabet.len() {
                return Err(Error::RowLength {
                    letter,
                    expected: alphabet.len(),
                    got: row.len(),
                });
            }
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::BadProbability {
                        from: letter.clone(),
                        to: alphabet.letters()[j].clone(),
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::RowNotStochastic { letter, sum });
            }
        }
        Ok(Self { alphabet, rows })
    }

    /// The noiseless channel: `p(a -> a) = 1`.
    pub fn identity(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        let rows = (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                row
            })
            .collect();
        Self { alphabet, rows }
    }

    /// Builds from sparse per-letter rows; omitted targets are exact zeros.
    pub fn from_rows(
        alphabet: Alphabet,
        rows: &BTreeMap<String, BTreeMap<String, f64>>,
    ) -> Result<Self, Error> {
        let n = alphabet.len();
        let mut dense = vec![vec![0.0; n]; n];
        for (from, targets) in rows {
            let i = alphabet
                .id_of(from)
                .ok_or_else(|| Error::UnknownLetterToken {
                    token: from.clone(),
                })? as usize;
            for (to, &p) in targets {
                let j = alphabet
                    .id_of(to)
                    .ok_or_else(|| Error::UnknownLetterToken { token: to.clone() })?
                    as usize;
                dense[i][j] = p;
            }
        }
        Self::new(alphabet, dense)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probability(&self, from: LetterId, to: LetterId) -> f64 {
        self.rows[from as usize][to as usize]
    }

    pub fn row(&self, from: LetterId) -> Option<&[f64]> {
        self.rows.get(from as usize).map(Vec::as_slice)
    }

    /// Letters reachable from `from` with positive probability, in index
    /// order.
    pub fn support(&self, from: LetterId) -> Vec<LetterId> {
        self.rows[from as usize]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(j, _)| j as LetterId)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    alphabet: Alphabet,
    rows: BTreeMap<String, BTreeMap<String, f64>>,
}

impl TryFrom<ChannelJson> for ChannelModel {
    type Error = Error;
    fn try_from(json: ChannelJson) -> Result<Self, Error> {
        ChannelModel::from_rows(json.alphabet, &json.rows)
    }
}

impl From<ChannelModel> for ChannelJson {
    fn from(ch: ChannelModel) -> Self {
        let mut rows = BTreeMap::new();
        for (i, row) in ch.rows.iter().enumerate() {
            let mut targets = BTreeMap::new();
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    targets.insert(ch.alphabet.letters()[j].clone(), p);
                }
            }
            rows.insert(ch.alphabet.letters()[i].clone(), targets);
        }
        ChannelJson {
            alphabet: ch.alphabet,
            rows,
        }
    }
}

/// A support-level predicate verdict with the first offending entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    pub counterexample: Option<ConditionCounterexample>,
}

/// A positive matrix entry violating a support condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCounterexample {
    pub from: LetterId,
    pub to: LetterId,
    pub probability: f64,
}

fn scan_support<F>(
    ch: &ChannelModel,
    part: &SignaturePartition,
    forbidden: F,
) -> Result<ConditionReport, Error>
where
    F: Fn(LetterId, LetterId) -> bool,
{
    if ch.alphabet() != part.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    for from in 0..ch.alphabet.len() as LetterId {
        for to in 0..ch.alphabet.len() as LetterId {
            let p = ch.probability(from, to);
            if p > 0.0 && forbidden(from, to) {
                return Ok(ConditionReport {
                    holds: false,
                    counterexample: Some(ConditionCounterexample {
                        from,
                        to,
                        probability: p,
                    }),
                });
            }
        }
    }
    Ok(ConditionReport {
        holds: true,
        counterexample: None,
    })
}

/// Holds when the channel support never moves a letter of one nonzero class
/// to a letter of a *different* nonzero class. Transitions into or out of
/// class 0 remain free.
pub fn check_no_cross_class_transitions(
    ch: &ChannelModel,
    part: &SignaturePartition,
) -> Result<ConditionReport, Error> {
    scan_support(ch, part, |from, to| {
        let cf = part.class_of(from).unwrap();
        let ct = part.class_of(to).unwrap();
        cf >= 1 && ct >= 1 && cf != ct
    })
}

/// Holds when the channel support never moves a letter to a *different*
/// letter of the same class.
pub fn check_no_within_class_transitions(
    ch: &ChannelModel,
    part: &SignaturePartition,
) -> Result<ConditionReport, Error> {
    scan_support(ch, part, |from, to| {
        from != to && part.class_of(from) == part.class_of(to)
    })
}

fn uniform_draw(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample_row(row: &[f64], u: f64) -> LetterId {
    let mut acc = 0.0;
    let mut last = None;
    for (j, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = Some(j as LetterId);
            if u < acc {
                return j as LetterId;
            }
        }
    }
    // float rounding can leave acc marginally below 1
    last.expect("stochastic row has positive mass")
}

/// Sends `word` through the channel, corrupting each letter independently.
/// Deterministic given the seed; see the module docs for the stream contract.
pub fn transmit(word: &Word, ch: &ChannelModel, seed: u64) -> Result<Word, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(word.len());
    for (i, &letter) in word.letters().iter().enumerate() {
        let row = ch
            .row(letter)
            .ok_or(Error::UnknownLetter { position: i + 1 })?;
        out.push(sample_row(row, uniform_draw(&mut rng)));
    }
    Ok(Word::new(out))
}

/// Number of positive-probability outcomes of transmitting `word`.
pub fn outcome_count(word: &Word, ch: &ChannelModel) -> Result<u128, Error> {
    let mut total: u128 = 1;
    for (i, &letter) in word.letters().iter().enumerate() {
        if letter as usize >= ch.alphabet.len() {
            return Err(Error::UnknownLetter { position: i + 1 });
        }
        let size = ch.support(letter).len() as u128;
        total = total.checked_mul(size).ok_or(Error::CardinalityOverflow)?;
    }
    Ok(total)
}

/// Visits every positive-probability outcome exactly once, with its
/// probability, without allocating per outcome. Outcomes are ordered
/// position-major with the last position varying fastest, supports in letter
/// index order.
pub fn for_each_outcome<F>(
    word: &Word,
    ch: &ChannelModel,
    cap: u64,
    mut visit: F,
) -> Result<(), Error>
where
    F: FnMut(&[LetterId], f64),
{
    let total = outcome_count(word, ch)?;
    if total > cap as u128 {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let supports: Vec<Vec<LetterId>> = word
        .letters()
        .iter()
        .map(|&letter| ch.support(letter))
        .collect();
    let len = supports.len();
    if len == 0 {
        visit(&[], 1.0);
        return Ok(());
    }
    let mut digits = vec![0usize; len];
    let mut current: Vec<LetterId> = supports.iter().map(|s| s[0]).collect();
    loop {
        let probability: f64 = word
            .letters()
            .iter()
            .zip(&current)
            .map(|(&from, &to)| ch.probability(from, to))
            .product();
        visit(&current, probability);
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if digits[pos] + 1 < supports[pos].len() {
                digits[pos] += 1;
                current[pos] = supports[pos][digits[pos]];
                for p in pos + 1..len {
                    digits[p] = 0;
                    current[p] = supports[p][0];
                }
                break;
            }
        }
    }
}

/// All positive-probability outcomes as owned words. See
/// [`for_each_outcome`] for ordering; refused above `cap`.
pub fn enumerate_outcomes(
    word: &Word,
    ch: &ChannelModel,
    cap: u64,
) -> Result<Vec<(Word, f64)>, Error> {
    let mut outcomes = Vec::new();
    for_each_outcome(word, ch, cap, |letters, p| {
        outcomes.push((Word::new(letters.to_vec()), p));
    })?;
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::SignaturePartition;

    fn abcd() -> Alphabet {
        Alphabet::new(["a", "b", "c", "d"]).unwrap()
    }

    fn abcd_partition() -> SignaturePartition {
        SignaturePartition::from_tokens(abcd(), &[vec!["a", "b"], vec!["c"], vec!["d"]]).unwrap()
    }

    #[test]
    fn rows_must_be_stochastic() {
        let bad = ChannelModel::new(abcd(), vec![vec![0.5; 4]; 4]);
        assert!(matches!(
            bad.unwrap_err(),
            Error::RowNotStochastic { letter, .. } if letter == "a"
        ));

        let mut rows = vec![vec![0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        rows[2][3] = -0.1;
        rows[2][2] = 1.1;
        assert_eq!(
            ChannelModel::new(abcd(), rows).unwrap_err(),
            Error::BadProbability {
                from: "c".into(),
                to: "d".into()
            }
        );
    }

    #[test]
    fn identity_channel_satisfies_both_conditions() {
        let ch = ChannelModel::identity(abcd());
        let part = abcd_partition();
        assert!(check_no_cross_class_transitions(&ch, &part).unwrap().holds);
        assert!(check_no_within_class_transitions(&ch, &part).unwrap().holds);
    }

    #[test]
    fn cross_class_counterexample_is_reported() {
        // p(c -> d) = 0.1 moves class 1 mass to class 2
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 1.0;
        rows[1][1] = 1.0;
        rows[2][2] = 0.9;
        rows[2][3] = 0.1;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let part = abcd_partition();
        let report = check_no_cross_class_transitions(&ch, &part).unwrap();
        assert!(!report.holds);
        let ce = report.counterexample.unwrap();
        assert_eq!((ce.from, ce.to), (2, 3));
        assert!((ce.probability - 0.1).abs() < 1e-15);
        assert!(ch.probability(ce.from, ce.to) > 0.0);
        // within-class transitions are untouched
        assert!(check_no_within_class_transitions(&ch, &part).unwrap().holds);
    }

    #[test]
    fn within_class_counterexample_is_reported() {
        // p(a -> b) = 0.05 moves mass inside class 0
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 0.95;
        rows[0][1] = 0.05;
        rows[1][1] = 1.0;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let part = abcd_partition();
        let report = check_no_within_class_transitions(&ch, &part).unwrap();
        assert!(!report.holds);
        let ce = report.counterexample.unwrap();
        assert_eq!((ce.from, ce.to), (0, 1));
        assert!(check_no_cross_class_transitions(&ch, &part).unwrap().holds);
    }

    #[test]
    fn class_swapping_channel_keeps_within_class_silent() {
        // all positive mass crosses between class 0 and class 1
        let alphabet = Alphabet::new(["a", "c"]).unwrap();
        let part =
            SignaturePartition::from_tokens(alphabet.clone(), &[vec!["a"], vec!["c"]]).unwrap();
        let ch = ChannelModel::new(alphabet, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(check_no_within_class_transitions(&ch, &part).unwrap().holds);
        assert!(check_no_cross_class_transitions(&ch, &part).unwrap().holds);
    }

    #[test]
    fn condition_checks_reject_foreign_partition() {
        let ch = ChannelModel::identity(abcd());
        let other = Alphabet::new(["x", "y"]).unwrap();
        let part = SignaturePartition::from_tokens(other, &[vec!["x"], vec!["y"]]).unwrap();
        assert_eq!(
            check_no_cross_class_transitions(&ch, &part).unwrap_err(),
            Error::AlphabetMismatch
        );
    }

    #[test]
    fn transmit_through_identity_is_identity() {
        let ch = ChannelModel::identity(abcd());
        let word = Word::new(vec![2, 0, 1, 3]);
        for seed in [0u64, 1, 99] {
            assert_eq!(transmit(&word, &ch, seed).unwrap(), word);
        }
    }

    #[test]
    fn transmit_deterministic_swap() {
        // p(a -> b) = 1
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][1] = 1.0;
        rows[1][1] = 1.0;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let word = ch.alphabet().word(["c", "a"]).unwrap();
        let out = transmit(&word, &ch, 7).unwrap();
        assert_eq!(ch.alphabet().render(&out), "cb");
    }

    #[test]
    fn transmit_is_reproducible() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 0.5;
        rows[0][1] = 0.5;
        rows[1][0] = 0.25;
        rows[1][1] = 0.75;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let word = Word::new(vec![0, 1, 0, 1, 2, 3, 0]);
        let a = transmit(&word, &ch, 42).unwrap();
        let b = transmit(&word, &ch, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), word.len());
    }

    #[test]
    fn empirical_frequency_matches_row() {
        // 10^5 one-letter transmissions vs the binomial standard error
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 0.7;
        rows[0][1] = 0.3;
        rows[1][1] = 1.0;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let word = Word::new(vec![0]);
        let trials = 100_000u64;
        let mut hits = 0u64;
        for seed in 0..trials {
            if transmit(&word, &ch, seed).unwrap().letters()[0] == 1 {
                hits += 1;
            }
        }
        let p = 0.3;
        let freq = hits as f64 / trials as f64;
        let std_err = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (freq - p).abs() < 3.0 * std_err,
            "frequency {freq} outside 3 standard errors of {p}"
        );
    }

    #[test]
    fn enumerate_outcomes_identity_single() {
        let ch = ChannelModel::identity(abcd());
        let word = Word::new(vec![0, 1, 2]);
        let outcomes = enumerate_outcomes(&word, &ch, 1_000).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].0, word);
        assert!((outcomes[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn enumerate_outcomes_two_point_support() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 0.7;
        rows[0][1] = 0.3;
        rows[1][1] = 1.0;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let word = Word::new(vec![0]);
        let outcomes = enumerate_outcomes(&word, &ch, 10).unwrap();
        assert_eq!(outcomes.len(), 2);
        assert_eq!(outcomes[0], (Word::new(vec![0]), 0.7));
        assert_eq!(outcomes[1], (Word::new(vec![1]), 0.3));
    }

    #[test]
    fn outcome_cap_is_enforced() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][0] = 0.5;
        rows[0][1] = 0.5;
        rows[1][0] = 0.5;
        rows[1][1] = 0.5;
        rows[2][2] = 1.0;
        rows[3][3] = 1.0;
        let ch = ChannelModel::new(abcd(), rows).unwrap();
        let word = Word::new(vec![0, 1, 0]);
        assert_eq!(
            enumerate_outcomes(&word, &ch, 7).unwrap_err(),
            Error::CapExceeded { needed: 8, cap: 7 }
        );
    }

    #[test]
    fn empty_word_has_one_outcome() {
        let ch = ChannelModel::identity(abcd());
        let outcomes = enumerate_outcomes(&Word::empty(), &ch, 10).unwrap();
        assert_eq!(outcomes, vec![(Word::empty(), 1.0)]);
    }

    #[test]
    fn channel_json_round_trip_with_exact_zeros() {
        let json = r#"{
            "alphabet": { "letters": ["a","b"] },
            "rows": { "a": { "a": 0.9, "b": 0.1 }, "b": { "b": 1.0 } }
        }"#;
        let ch: ChannelModel = serde_json::from_str(json).unwrap();
        assert_eq!(ch.probability(1, 0), 0.0);
        assert_eq!(ch.support(1), vec![1]);
        let text = serde_json::to_string(&ch).unwrap();
        let back: ChannelModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ch);
    }
}
