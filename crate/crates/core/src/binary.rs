//! Parity-partitioned bitstring alphabets, the solid codes they induce, and
//! single-bitflip channels.
//!
//! The letters here are whole bitstrings ("blocks"). Splitting the blocks by
//! parity and putting all even blocks into class 0 makes every single-flip
//! corruption either a detectable parity change (class 0 vs nonzero) or an
//! impossibility: one flip cannot keep a block's parity, so both support
//! conditions of the detection guarantee hold automatically.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, ClassId, LengthFunction, SignaturePartition, Word};
use crate::channel::{
    check_no_cross_class_transitions, check_no_within_class_transitions, ChannelModel,
    ConditionReport,
};
use crate::codec::{encode, verify_error_detection, Message};
use crate::error::Error;
use crate::solidity::{canonical_size_by_class, canonical_solid_code, LiftedCode};

/// A finite 0/1 string; the empty bitstring is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Number of 1s modulo 2; the empty bitstring has parity 0.
    pub fn parity(&self) -> u8 {
        self.0.iter().fold(0, |acc, &b| acc ^ b as u8)
    }

    /// Copy with the bit at `position` (0-based) toggled.
    pub fn flipped(&self, position: usize) -> Bitstring {
        let mut bits = self.0.clone();
        bits[position] = !bits[position];
        Bitstring(bits)
    }

    /// Hamming distance; defined only between equal-length bitstrings.
    pub fn hamming(&self, other: &Bitstring) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        Some(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::InvalidBitstring {
                        token: s.to_string(),
                    })
                }
            }
        }
        Ok(Bitstring(bits))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// A set of distinct blocks containing at least one block of each parity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct BitstringAlphabet {
    blocks: Vec<Bitstring>,
}

impl BitstringAlphabet {
    pub fn new(blocks: Vec<Bitstring>) -> Result<Self, Error> {
        let mut seen = std::collections::BTreeSet::new();
        for block in &blocks {
            if !seen.insert(block.clone()) {
                return Err(Error::DuplicateBlock {
                    block: block.to_string(),
                });
            }
        }
        for parity in [0u8, 1] {
            if !blocks.iter().any(|b| b.parity() == parity) {
                return Err(Error::MissingParity { parity });
            }
        }
        Ok(Self { blocks })
    }

    /// Every bitstring of the given length (`bits >= 1`).
    pub fn full_cube(bits: u32) -> Result<Self, Error> {
        let blocks = (0u64..1 << bits)
            .map(|value| Bitstring::new((0..bits).rev().map(|i| value >> i & 1 == 1).collect()))
            .collect();
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[Bitstring] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn index_of(&self, block: &Bitstring) -> Option<usize> {
        self.blocks.iter().position(|b| b == block)
    }

    pub fn even_blocks(&self) -> Vec<&Bitstring> {
        self.blocks.iter().filter(|b| b.parity() == 0).collect()
    }

    pub fn odd_blocks(&self) -> Vec<&Bitstring> {
        self.blocks.iter().filter(|b| b.parity() == 1).collect()
    }

    /// The letter alphabet whose tokens are the blocks' bit texts.
    pub fn to_alphabet(&self) -> Alphabet {
        Alphabet::new(self.blocks.iter().map(Bitstring::to_string))
            .expect("blocks are distinct and nonempty as a set")
    }
}

impl TryFrom<Vec<String>> for BitstringAlphabet {
    type Error = Error;
    fn try_from(tokens: Vec<String>) -> Result<Self, Error> {
        let blocks = tokens
            .iter()
            .map(|t| t.parse())
            .collect::<Result<Vec<_>, _>>()?;
        BitstringAlphabet::new(blocks)
    }
}

impl From<BitstringAlphabet> for Vec<String> {
    fn from(a: BitstringAlphabet) -> Self {
        a.blocks.iter().map(Bitstring::to_string).collect()
    }
}

/// A sub-partition of the odd blocks plus a run-length map: everything needed
/// to build the parity code. Class 0 is always the even blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCodeSpec {
    pub odd_classes: Vec<Vec<Bitstring>>,
    pub lengths: LengthFunction,
}

/// The signature partition with `P_0` = even blocks and `P_1..=P_n` the given
/// split of the odd blocks.
pub fn parity_partition(
    alphabet: &BitstringAlphabet,
    odd_classes: &[Vec<Bitstring>],
) -> Result<SignaturePartition, Error> {
    if odd_classes.is_empty() {
        return Err(Error::TooFewClasses { classes: 1 });
    }
    let mut class_of: Vec<Option<ClassId>> = alphabet
        .blocks()
        .iter()
        .map(|b| if b.parity() == 0 { Some(0) } else { None })
        .collect();
    for (c, class) in odd_classes.iter().enumerate() {
        let class_id = c as ClassId + 1;
        if class.is_empty() {
            return Err(Error::EmptyClass { class: class_id });
        }
        for block in class {
            let id = alphabet
                .index_of(block)
                .ok_or_else(|| Error::UnknownBlock {
                    block: block.to_string(),
                })?;
            if block.parity() == 0 {
                return Err(Error::WrongParityBlock {
                    block: block.to_string(),
                });
            }
            if class_of[id].is_some() {
                return Err(Error::LetterInMultipleClasses {
                    letter: block.to_string(),
                });
            }
            class_of[id] = Some(class_id);
        }
    }
    let mut resolved = Vec::with_capacity(class_of.len());
    for (id, slot) in class_of.iter().enumerate() {
        match slot {
            Some(c) => resolved.push(*c),
            None => {
                return Err(Error::LetterInNoClass {
                    letter: alphabet.blocks()[id].to_string(),
                })
            }
        }
    }
    SignaturePartition::from_class_map(alphabet.to_alphabet(), resolved)
}

/// The canonical solid code over the parity partition: an odd lead block
/// followed by `L(l)` even blocks.
pub fn build_parity_code(
    alphabet: &BitstringAlphabet,
    spec: &ParityCodeSpec,
) -> Result<LiftedCode, Error> {
    let partition = parity_partition(alphabet, &spec.odd_classes)?;
    canonical_solid_code(&partition, &spec.lengths)
}

/// How to account for single flips whose result is not a block of the
/// alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EscapePolicy {
    /// Drop the escaping mass and renormalize each row over its in-alphabet
    /// outcomes.
    #[default]
    Renormalize,
    /// Refuse the alphabet as not closed under single flips.
    Reject,
}

/// Per-block flip distribution: probability `hold` of no flip, plus one
/// weight per bit position. `weights` maps block length to its position
/// weights; `None` splits `1 - hold` uniformly. For each block length,
/// `hold + sum(weights)` must be 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipSpec {
    pub hold: f64,
    pub weights: Option<BTreeMap<usize, Vec<f64>>>,
}

impl FlipSpec {
    pub fn uniform(hold: f64) -> Self {
        FlipSpec {
            hold,
            weights: None,
        }
    }

    fn position_weights(&self, len: usize) -> Result<Vec<f64>, Error> {
        if !(0.0..=1.0).contains(&self.hold) {
            return Err(Error::InvalidFlipParams {
                reason: format!("hold probability {} is outside [0, 1]", self.hold),
            });
        }
        let weights = match &self.weights {
            None => {
                if len == 0 {
                    Vec::new()
                } else {
                    vec![(1.0 - self.hold) / len as f64; len]
                }
            }
            Some(by_len) => by_len
                .get(&len)
                .ok_or_else(|| Error::InvalidFlipParams {
                    reason: format!("no position weights for block length {len}"),
                })?
                .clone(),
        };
        if weights.len() != len {
            return Err(Error::InvalidFlipParams {
                reason: format!("expected {len} position weights, got {}", weights.len()),
            });
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidFlipParams {
                reason: "position weights must be finite and nonnegative".into(),
            });
        }
        let total: f64 = self.hold + weights.iter().sum::<f64>();
        if (total - 1.0).abs() > crate::channel::ROW_SUM_TOLERANCE {
            return Err(Error::InvalidFlipParams {
                reason: format!("hold + position weights sum to {total}, not 1"),
            });
        }
        Ok(weights)
    }
}

/// The channel that flips at most one bit of each transmitted block.
///
/// Support: the block itself (mass `hold`) and its in-alphabet Hamming-1
/// neighbors. Cross-length transitions are structural zeros. Flips landing
/// outside the alphabet follow the [`EscapePolicy`].
pub fn single_bitflip_channel(
    alphabet: &BitstringAlphabet,
    flip: &FlipSpec,
    policy: EscapePolicy,
) -> Result<ChannelModel, Error> {
    let n = alphabet.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, block) in alphabet.blocks().iter().enumerate() {
        let weights = flip.position_weights(block.len())?;
        let row = &mut rows[i];
        row[i] = flip.hold;
        let mut kept = flip.hold;
        for (position, &weight) in weights.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let neighbor = block.flipped(position);
            match alphabet.index_of(&neighbor) {
                Some(j) => {
                    row[j] = weight;
                    kept += weight;
                }
                None => match policy {
                    EscapePolicy::Reject => {
                        return Err(Error::NonClosedAlphabet {
                            block: block.to_string(),
                            position: position + 1,
                        })
                    }
                    EscapePolicy::Renormalize => {}
                },
            }
        }
        if kept <= 0.0 {
            return Err(Error::InvalidFlipParams {
                reason: format!(
                    "block {block} has no in-alphabet outcome with positive probability"
                ),
            });
        }
        if kept < 1.0 {
            for p in row.iter_mut() {
                *p /= kept;
            }
        }
    }
    ChannelModel::new(alphabet.to_alphabet(), rows)
}

/// Aggregated exhaustive detection census over a set of messages, plus the
/// structural size and length facts of the built code.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityDetectionReport {
    pub cross_class: ConditionReport,
    pub within_class: ConditionReport,
    /// `sum |P_l| * |P_0|^L(l)` from the class sizes.
    pub formula_size: u128,
    /// Count from explicit enumeration; `None` above the cap.
    pub enumerated_size: Option<u64>,
    /// Longest codeword, in blocks.
    pub max_codeword_blocks: usize,
    /// `1 + max L(l)`.
    pub block_length_bound: usize,
    pub messages: u64,
    pub total_outcomes: u64,
    pub decodable: u64,
    pub detected: u64,
    pub word_mismatches: u64,
    pub first_word_mismatch: Option<(Word, Word)>,
    pub violation_count: u64,
}

impl ParityDetectionReport {
    pub fn guarantees_hold(&self) -> bool {
        self.violation_count == 0
    }

    pub fn size_formula_matches(&self) -> bool {
        match self.enumerated_size {
            Some(count) => count as u128 == self.formula_size,
            None => true,
        }
    }
}

/// Builds the parity code and channel, then runs the exhaustive detection
/// census over every given message.
pub fn verify_parity_detection(
    alphabet: &BitstringAlphabet,
    spec: &ParityCodeSpec,
    flip: &FlipSpec,
    policy: EscapePolicy,
    messages: &[Message],
    cap: u64,
) -> Result<ParityDetectionReport, Error> {
    let partition = parity_partition(alphabet, &spec.odd_classes)?;
    let code = canonical_solid_code(&partition, &spec.lengths)?;
    let channel = single_bitflip_channel(alphabet, flip, policy)?;

    let cross_class = check_no_cross_class_transitions(&channel, &partition)?;
    let within_class = check_no_within_class_transitions(&channel, &partition)?;

    let formula_size = canonical_size_by_class(&partition, &spec.lengths)?
        .iter()
        .map(|&(_, size)| size)
        .sum();
    let enumerated_size = code.enumerate(cap).ok().map(|words| words.len() as u64);

    let mut report = ParityDetectionReport {
        cross_class,
        within_class,
        formula_size,
        enumerated_size,
        max_codeword_blocks: code.max_word_len(),
        block_length_bound: 1 + spec.lengths.max_run(),
        messages: 0,
        total_outcomes: 0,
        decodable: 0,
        detected: 0,
        word_mismatches: 0,
        first_word_mismatch: None,
        violation_count: 0,
    };

    for message in messages {
        let sent = encode(message, &code)?;
        let census = verify_error_detection(&code, &channel, &sent, cap)?;
        report.messages += 1;
        report.total_outcomes += census.total_outcomes;
        report.decodable += census.decodable;
        report.detected += census.detected;
        report.word_mismatches += census.word_mismatches;
        report.violation_count += census.violation_count;
        if report.first_word_mismatch.is_none() {
            if let Some(received) = census.first_word_mismatch {
                report.first_word_mismatch = Some((sent.clone(), received));
            }
        }
    }

    Ok(report)
}
