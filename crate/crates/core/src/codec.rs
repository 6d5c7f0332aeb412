//! Encoding message sequences, parsing received streams, factor scanning,
//! and the exhaustive error-detection check.
//!
//! Parsing never raises on malformed input: a stream that is not a codeword
//! concatenation is data, and the result reports the first failing position
//! with a machine-readable reason. For canonical lifted codes (nonzero lead
//! class followed by a run of class-0 letters) the parse is a single
//! structural pass; for other codes it falls back to left-to-right
//! longest-match with backtracking, which is sound because solid codes are
//! uniquely decipherable.

use std::collections::BTreeMap;

use crate::alphabet::{ClassId, LetterId, SignaturePartition, Word};
use crate::channel::{
    check_no_cross_class_transitions, check_no_within_class_transitions, for_each_outcome,
    ChannelModel, ConditionReport,
};
use crate::error::Error;
use crate::solidity::{check_solid, Code, LiftedCode};
use crate::DEFAULT_ENUMERATION_CAP;

/// A sequence of codeword indices into a codebook's canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Message(Vec<u64>);

impl Message {
    pub fn new(indices: Vec<u64>) -> Self {
        Message(indices)
    }

    pub fn indices(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u64>> for Message {
    fn from(indices: Vec<u64>) -> Self {
        Message(indices)
    }
}

/// Anything that maps indices to codewords in a fixed canonical order.
///
/// [`Code`] uses its stored order (length, then lexicographic);
/// [`LiftedCode`] uses rank order and never enumerates.
pub trait Codebook {
    fn word_count(&self) -> u128;
    fn word_at_index(&self, index: u64) -> Option<Word>;
    fn index_of_word(&self, word: &Word) -> Option<u64>;
}

impl Codebook for Code {
    fn word_count(&self) -> u128 {
        self.len() as u128
    }

    fn word_at_index(&self, index: u64) -> Option<Word> {
        usize::try_from(index)
            .ok()
            .and_then(|i| self.word_at(i).cloned())
    }

    fn index_of_word(&self, word: &Word) -> Option<u64> {
        self.index_of(word).map(|i| i as u64)
    }
}

impl Codebook for LiftedCode {
    fn word_count(&self) -> u128 {
        self.cardinality()
    }

    fn word_at_index(&self, index: u64) -> Option<Word> {
        self.word_at_rank(index as u128)
    }

    fn index_of_word(&self, word: &Word) -> Option<u64> {
        self.rank(word).and_then(|r| u64::try_from(r).ok())
    }
}

/// Concatenates the indexed codewords; the empty message encodes to the
/// empty word.
pub fn encode(message: &Message, book: &impl Codebook) -> Result<Word, Error> {
    let mut letters = Vec::new();
    for &index in message.indices() {
        let word = book.word_at_index(index).ok_or(Error::IndexOutOfRange {
            index,
            count: book.word_count(),
        })?;
        letters.extend_from_slice(word.letters());
    }
    Ok(Word::new(letters))
}

/// Why a parse stopped. Positions are 1-based letter indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectReason {
    /// The letter opening a codeword has class 0, or a nonzero class with no
    /// codeword.
    BadLeadClass,
    /// A letter inside a run has nonzero class.
    BadRunLetter,
    /// The input ends inside a codeword; reported at position `len + 1`.
    TruncatedTail,
    /// No codeword decomposition continues past this position.
    NotInCode,
}

/// Outcome of parsing a received stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseResult {
    /// The stream is exactly a codeword concatenation; re-encoding the
    /// indices reproduces the input.
    Decoded(Vec<u64>),
    /// First failure position and reason; `position <= len + 1`.
    Detected {
        position: usize,
        reason: DetectReason,
    },
}

impl ParseResult {
    pub fn is_decoded(&self) -> bool {
        matches!(self, ParseResult::Decoded(_))
    }
}

fn canonical_walk<F>(
    letters: &[LetterId],
    part: &SignaturePartition,
    runs: &BTreeMap<ClassId, usize>,
    mut on_word: F,
) -> Result<(), (usize, DetectReason)>
where
    F: FnMut(usize, usize),
{
    let mut pos = 0;
    while pos < letters.len() {
        let class = part
            .class_of(letters[pos])
            .expect("letters validated against the alphabet");
        if class == 0 {
            return Err((pos + 1, DetectReason::BadLeadClass));
        }
        let Some(&run) = runs.get(&class) else {
            return Err((pos + 1, DetectReason::BadLeadClass));
        };
        if pos + run + 1 > letters.len() {
            return Err((letters.len() + 1, DetectReason::TruncatedTail));
        }
        for i in 1..=run {
            let c = part
                .class_of(letters[pos + i])
                .expect("letters validated against the alphabet");
            if c != 0 {
                return Err((pos + i + 1, DetectReason::BadRunLetter));
            }
        }
        on_word(pos, run + 1);
        pos += run + 1;
    }
    Ok(())
}

fn backtrack(letters: &[LetterId], words: &[Word]) -> Result<Vec<usize>, usize> {
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| {
        words[b]
            .len()
            .cmp(&words[a].len())
            .then_with(|| words[a].cmp(&words[b]))
    });
    let mut failed = vec![false; letters.len() + 1];
    let mut path = Vec::new();
    let mut furthest = 0;
    if descend(
        letters,
        words,
        &order,
        0,
        &mut failed,
        &mut path,
        &mut furthest,
    ) {
        Ok(path)
    } else {
        Err(furthest)
    }
}

fn descend(
    letters: &[LetterId],
    words: &[Word],
    order: &[usize],
    pos: usize,
    failed: &mut [bool],
    path: &mut Vec<usize>,
    furthest: &mut usize,
) -> bool {
    if pos == letters.len() {
        return true;
    }
    if failed[pos] {
        return false;
    }
    *furthest = (*furthest).max(pos);
    for &wi in order {
        let w = words[wi].letters();
        if pos + w.len() <= letters.len() && letters[pos..pos + w.len()] == *w {
            path.push(wi);
            if descend(letters, words, order, pos + w.len(), failed, path, furthest) {
                return true;
            }
            path.pop();
        }
    }
    failed[pos] = true;
    false
}

/// Parses a stream against a lifted code.
///
/// Canonical codes get the structural single pass with precise reasons.
/// Non-canonical codes are enumerated (default cap) and parsed by
/// backtracking, which only reports [`DetectReason::NotInCode`] at the end
/// of the longest decomposable prefix. Indices are lifted ranks either way.
pub fn parse(stream: &Word, code: &LiftedCode) -> Result<ParseResult, Error> {
    let part = code.partition();
    for (i, &letter) in stream.letters().iter().enumerate() {
        if part.class_of(letter).is_none() {
            return Err(Error::UnknownLetter { position: i + 1 });
        }
    }
    if let Some(runs) = code.canonical_run_lengths() {
        let mut indices = Vec::new();
        let walked = canonical_walk(stream.letters(), part, &runs, |start, len| {
            let word = Word::new(stream.letters()[start..start + len].to_vec());
            let rank = code.rank(&word).expect("structural factor is a member");
            indices.push(rank as u64);
        });
        return Ok(match walked {
            Ok(()) => ParseResult::Decoded(indices),
            Err((position, reason)) => ParseResult::Detected { position, reason },
        });
    }
    let words = code.enumerate(DEFAULT_ENUMERATION_CAP)?;
    Ok(match backtrack(stream.letters(), &words) {
        // enumerate() yields rank order, so the slice index is the rank
        Ok(path) => ParseResult::Decoded(path.into_iter().map(|i| i as u64).collect()),
        Err(furthest) => ParseResult::Detected {
            position: furthest + 1,
            reason: DetectReason::NotInCode,
        },
    })
}

/// Parses a stream against an explicit code by longest-match backtracking.
/// Letters outside the alphabet are data and simply fail to match.
pub fn parse_explicit(stream: &Word, code: &Code) -> ParseResult {
    match backtrack(stream.letters(), code.words()) {
        Ok(path) => ParseResult::Decoded(path.into_iter().map(|i| i as u64).collect()),
        Err(furthest) => ParseResult::Detected {
            position: furthest + 1,
            reason: DetectReason::NotInCode,
        },
    }
}

/// An occurrence of a codeword as a contiguous factor; positions are 1-based
/// and inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorOccurrence {
    pub index: u64,
    pub start: usize,
    pub end: usize,
}

fn assert_non_overlapping(occurrences: &[FactorOccurrence]) {
    for pair in occurrences.windows(2) {
        assert!(
            pair[1].start > pair[0].end,
            "solid-code occurrences must not overlap: {pair:?}"
        );
    }
}

/// All occurrences of codewords as factors of `text`, in position order.
///
/// Requires a solid code ([`Error::NotSolid`] otherwise); solidity makes the
/// occurrences pairwise non-overlapping, which is asserted.
pub fn scan_factors(text: &Word, code: &Code) -> Result<Vec<FactorOccurrence>, Error> {
    if !check_solid(code).is_solid {
        return Err(Error::NotSolid);
    }
    let mut by_lead: Vec<Vec<usize>> = vec![Vec::new(); code.alphabet().len()];
    for (wi, word) in code.words().iter().enumerate() {
        by_lead[word.letters()[0] as usize].push(wi);
    }
    let letters = text.letters();
    let mut occurrences = Vec::new();
    for start in 0..letters.len() {
        let lead = letters[start] as usize;
        if lead >= by_lead.len() {
            continue; // letter outside the code's alphabet: plain garbage
        }
        for &wi in &by_lead[lead] {
            let w = code.words()[wi].letters();
            if start + w.len() <= letters.len() && letters[start..start + w.len()] == *w {
                occurrences.push(FactorOccurrence {
                    index: wi as u64,
                    start: start + 1,
                    end: start + w.len(),
                });
                break; // solidity: at most one codeword starts here
            }
        }
    }
    assert_non_overlapping(&occurrences);
    Ok(occurrences)
}

/// Factor scan against a lifted code, using the signature structure for
/// canonical codes (no enumeration); non-canonical codes fall back to the
/// explicit scan under the default cap. Indices are lifted ranks.
pub fn scan_factors_lifted(text: &Word, code: &LiftedCode) -> Result<Vec<FactorOccurrence>, Error> {
    if !check_solid(code.signature_code()).is_solid {
        return Err(Error::NotSolid);
    }
    let Some(runs) = code.canonical_run_lengths() else {
        let explicit = code.to_code(DEFAULT_ENUMERATION_CAP)?;
        let scanned = scan_factors(text, &explicit)?;
        return Ok(scanned
            .into_iter()
            .map(|occ| {
                let word = explicit.word_at(occ.index as usize).expect("scanned index");
                FactorOccurrence {
                    index: code.rank(word).expect("member of the lifted code") as u64,
                    ..occ
                }
            })
            .collect());
    };
    let part = code.partition();
    let letters = text.letters();
    let mut occurrences = Vec::new();
    for start in 0..letters.len() {
        let Some(class) = part.class_of(letters[start]) else {
            continue;
        };
        if class == 0 {
            continue;
        }
        let Some(&run) = runs.get(&class) else {
            continue;
        };
        if start + run + 1 > letters.len() {
            continue;
        }
        let tail_ok = (1..=run).all(|i| part.class_of(letters[start + i]) == Some(0));
        if tail_ok {
            let word = Word::new(letters[start..start + run + 1].to_vec());
            occurrences.push(FactorOccurrence {
                index: code.rank(&word).expect("structural factor is a member") as u64,
                start: start + 1,
                end: start + run + 1,
            });
        }
    }
    assert_non_overlapping(&occurrences);
    Ok(occurrences)
}

/// Every message of up to `max_words` codeword indices (the empty message
/// included) over a codebook of `count` words.
pub fn all_messages(count: u64, max_words: usize) -> Vec<Message> {
    let mut messages = vec![Message::default()];
    let mut layer: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..max_words {
        let mut next = Vec::new();
        for prefix in &layer {
            for index in 0..count {
                let mut m = prefix.clone();
                m.push(index);
                messages.push(Message::new(m.clone()));
                next.push(m);
            }
        }
        layer = next;
    }
    messages
}

/// A decodable outcome that broke a guarantee that was in force.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeViolation {
    pub kind: ViolationKind,
    pub received: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Signature preservation was guaranteed (cross-class condition held)
    /// but a decodable outcome changed the signature.
    SignatureChanged,
    /// Exact recovery was guaranteed (both conditions held) but a decodable
    /// outcome differed from the sent word.
    WordChanged,
}

const MAX_STORED_VIOLATIONS: usize = 32;

/// Exhaustive error-detection census for one transmitted word.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub cross_class: ConditionReport,
    pub within_class: ConditionReport,
    pub total_outcomes: u64,
    pub decodable: u64,
    pub detected: u64,
    /// Decodable outcomes whose signature differs from the sent word's.
    pub signature_mismatches: u64,
    /// Decodable outcomes that differ from the sent word.
    pub word_mismatches: u64,
    pub first_signature_mismatch: Option<Word>,
    pub first_word_mismatch: Option<Word>,
    /// Breaches of guarantees that were in force (capped exhibit list).
    pub violations: Vec<GuaranteeViolation>,
    pub violation_count: u64,
}

impl DetectionReport {
    /// True when no in-force guarantee was breached.
    pub fn guarantees_hold(&self) -> bool {
        self.violation_count == 0
    }
}

/// Enumerates every channel outcome of `sent` and checks the detection
/// guarantees against the lifted code.
///
/// The conditions are measured properties of the channel, not assumptions:
/// when the cross-class condition holds, every decodable outcome must keep
/// the sent signature; when the within-class condition also holds, every
/// decodable outcome must equal the sent word. Mismatch counts are reported
/// regardless, so a condition-violating channel can exhibit its undetected
/// errors. `sent` must itself be a codeword concatenation.
pub fn verify_error_detection(
    code: &LiftedCode,
    ch: &ChannelModel,
    sent: &Word,
    cap: u64,
) -> Result<DetectionReport, Error> {
    let part = code.partition();
    let cross_class = check_no_cross_class_transitions(ch, part)?;
    let within_class = check_no_within_class_transitions(ch, part)?;

    if !parse(sent, code)?.is_decoded() {
        return Err(Error::PreconditionFailed {
            reason: "transmitted word is not a concatenation of codewords".into(),
        });
    }
    let sent_sig = part.signature(sent)?;

    let runs = code.canonical_run_lengths();
    let fallback_words = match &runs {
        Some(_) => None,
        None => Some(code.enumerate(cap)?),
    };

    let mut report = DetectionReport {
        cross_class: cross_class.clone(),
        within_class: within_class.clone(),
        total_outcomes: 0,
        decodable: 0,
        detected: 0,
        signature_mismatches: 0,
        word_mismatches: 0,
        first_signature_mismatch: None,
        first_word_mismatch: None,
        violations: Vec::new(),
        violation_count: 0,
    };

    for_each_outcome(sent, ch, cap, |letters, _probability| {
        report.total_outcomes += 1;
        let decodable = match (&runs, &fallback_words) {
            (Some(r), _) => canonical_walk(letters, part, r, |_, _| {}).is_ok(),
            (None, Some(words)) => backtrack(letters, words).is_ok(),
            (None, None) => unreachable!(),
        };
        if !decodable {
            report.detected += 1;
            return;
        }
        report.decodable += 1;
        let signature_equal = letters
            .iter()
            .zip(sent_sig.classes())
            .all(|(&l, &c)| part.class_of(l) == Some(c));
        let word_equal = letters == sent.letters();
        if !signature_equal {
            report.signature_mismatches += 1;
            if report.first_signature_mismatch.is_none() {
                report.first_signature_mismatch = Some(Word::new(letters.to_vec()));
            }
            if cross_class.holds {
                report.violation_count += 1;
                if report.violations.len() < MAX_STORED_VIOLATIONS {
                    report.violations.push(GuaranteeViolation {
                        kind: ViolationKind::SignatureChanged,
                        received: Word::new(letters.to_vec()),
                    });
                }
            }
        }
        if !word_equal {
            report.word_mismatches += 1;
            if report.first_word_mismatch.is_none() {
                report.first_word_mismatch = Some(Word::new(letters.to_vec()));
            }
            if cross_class.holds && within_class.holds {
                report.violation_count += 1;
                if report.violations.len() < MAX_STORED_VIOLATIONS {
                    report.violations.push(GuaranteeViolation {
                        kind: ViolationKind::WordChanged,
                        received: Word::new(letters.to_vec()),
                    });
                }
            }
        }
    })?;

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{Alphabet, LengthFunction};
    use crate::solidity::{canonical_solid_code, lift};

    fn abc_code() -> LiftedCode {
        // P_0 = {a, b}, P_1 = {c}, L(1) = 2: {caa, cab, cba, cbb}
        let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
        let part = SignaturePartition::from_tokens(alphabet, &[vec!["a", "b"], vec!["c"]]).unwrap();
        canonical_solid_code(&part, &LengthFunction::strict(vec![2]).unwrap()).unwrap()
    }

    #[test]
    fn encode_single_and_empty() {
        let code = abc_code();
        let word = encode(&Message::new(vec![0]), &code).unwrap();
        assert_eq!(code.alphabet().render(&word), "caa");
        assert_eq!(encode(&Message::default(), &code).unwrap(), Word::empty());
        assert_eq!(
            encode(&Message::new(vec![9]), &code).unwrap_err(),
            Error::IndexOutOfRange { index: 9, count: 4 }
        );
    }

    #[test]
    fn parse_concatenation_of_two_codewords() {
        let code = abc_code();
        let stream = code
            .alphabet()
            .word(["c", "a", "a", "c", "a", "b"])
            .unwrap();
        match parse(&stream, &code).unwrap() {
            ParseResult::Decoded(indices) => {
                assert_eq!(indices.len(), 2);
                let w0 = code.word_at_rank(indices[0] as u128).unwrap();
                let w1 = code.word_at_rank(indices[1] as u128).unwrap();
                assert_eq!(code.alphabet().render(&w0), "caa");
                assert_eq!(code.alphabet().render(&w1), "cab");
            }
            other => panic!("expected decode, got {other:?}"),
        }
    }

    #[test]
    fn parse_detects_leading_class_zero() {
        let code = abc_code();
        let stream = code.alphabet().word(["a", "a", "c"]).unwrap();
        assert_eq!(
            parse(&stream, &code).unwrap(),
            ParseResult::Detected {
                position: 1,
                reason: DetectReason::BadLeadClass
            }
        );
    }

    #[test]
    fn parse_detects_truncated_tail() {
        let code = abc_code();
        let stream = code.alphabet().word(["c", "a"]).unwrap();
        assert_eq!(
            parse(&stream, &code).unwrap(),
            ParseResult::Detected {
                position: 3,
                reason: DetectReason::TruncatedTail
            }
        );
    }

    #[test]
    fn parse_detects_bad_run_letter() {
        let code = abc_code();
        let stream = code.alphabet().word(["c", "c", "a"]).unwrap();
        assert_eq!(
            parse(&stream, &code).unwrap(),
            ParseResult::Detected {
                position: 2,
                reason: DetectReason::BadRunLetter
            }
        );
    }

    #[test]
    fn parse_empty_stream_decodes_empty_message() {
        let code = abc_code();
        assert_eq!(
            parse(&Word::empty(), &code).unwrap(),
            ParseResult::Decoded(vec![])
        );
    }

    #[test]
    fn parse_rejects_nonzero_lead_without_codeword() {
        // partition has classes 0..=2 but the code only uses lead class 1
        let alphabet = Alphabet::new(["a", "c", "d"]).unwrap();
        let part =
            SignaturePartition::from_tokens(alphabet, &[vec!["a"], vec!["c"], vec!["d"]]).unwrap();
        let sig = Code::signature_code(2, vec![vec![1, 0]]).unwrap();
        let code = lift(&sig, &part).unwrap();
        let stream = code.alphabet().word(["d", "a"]).unwrap();
        assert_eq!(
            parse(&stream, &code).unwrap(),
            ParseResult::Detected {
                position: 1,
                reason: DetectReason::BadLeadClass
            }
        );
    }

    #[test]
    fn round_trip_through_canonical_code() {
        let code = abc_code();
        for message in all_messages(4, 2) {
            let stream = encode(&message, &code).unwrap();
            match parse(&stream, &code).unwrap() {
                ParseResult::Decoded(indices) => assert_eq!(indices, message.indices()),
                other => panic!("round trip failed for {message:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn backtracking_parse_handles_non_canonical_code() {
        // (1,0,1) is not lead-plus-run, and even fails the solidity check
        // (it overlaps itself); as a one-word code it is still uniquely
        // decipherable, so the backtracking parse stays correct
        let alphabet = Alphabet::new(["a", "c"]).unwrap();
        let part = SignaturePartition::from_tokens(alphabet, &[vec!["a"], vec!["c"]]).unwrap();
        let sig = Code::signature_code(1, vec![vec![1, 0, 1]]).unwrap();
        let code = lift(&sig, &part).unwrap();
        assert_eq!(code.canonical_run_lengths(), None);

        let stream = code
            .alphabet()
            .word(["c", "a", "c", "c", "a", "c"])
            .unwrap();
        match parse(&stream, &code).unwrap() {
            ParseResult::Decoded(indices) => assert_eq!(indices, vec![0, 0]),
            other => panic!("expected decode, got {other:?}"),
        }
        let garbage = code.alphabet().word(["c", "a", "c", "c", "a"]).unwrap();
        assert_eq!(
            parse(&garbage, &code).unwrap(),
            ParseResult::Detected {
                position: 4,
                reason: DetectReason::NotInCode
            }
        );
    }

    #[test]
    fn lifted_scan_falls_back_for_non_canonical_codes() {
        // (0,1) is solid (prefix "0" never equals suffix "1") but has a
        // class-0 lead, so the signature-structure fast path does not apply
        let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
        let part = SignaturePartition::from_tokens(alphabet, &[vec!["a", "b"], vec!["c"]]).unwrap();
        let sig = Code::signature_code(1, vec![vec![0, 1]]).unwrap();
        let code = lift(&sig, &part).unwrap();
        assert_eq!(code.canonical_run_lengths(), None);
        assert_eq!(code.cardinality(), 2); // ac, bc

        let text = code
            .alphabet()
            .word(["a", "c", "c", "b", "c", "a"])
            .unwrap();
        let occurrences = scan_factors_lifted(&text, &code).unwrap();
        let spans: Vec<(usize, usize)> = occurrences.iter().map(|o| (o.start, o.end)).collect();
        assert_eq!(spans, vec![(1, 2), (4, 5)]);
        for occ in &occurrences {
            let word = code.word_at_rank(occ.index as u128).unwrap();
            assert_eq!(word.letters(), &text.letters()[occ.start - 1..occ.end]);
        }
        // the scan refuses codes whose signature code is not solid
        let bad_sig = Code::signature_code(1, vec![vec![1, 0, 1]]).unwrap();
        let bad = lift(&bad_sig, &part).unwrap();
        assert_eq!(
            scan_factors_lifted(&text, &bad).unwrap_err(),
            Error::NotSolid
        );
    }

    #[test]
    fn scan_finds_encoded_codewords_at_their_boundaries() {
        let code = abc_code();
        let explicit = code.to_code(100).unwrap();
        let stream = encode(&Message::new(vec![0, 1]), &code).unwrap();
        let occurrences = scan_factors(&stream, &explicit).unwrap();
        assert_eq!(occurrences.len(), 2);
        assert_eq!((occurrences[0].start, occurrences[0].end), (1, 3));
        assert_eq!((occurrences[1].start, occurrences[1].end), (4, 6));

        let lifted_occurrences = scan_factors_lifted(&stream, &code).unwrap();
        assert_eq!(lifted_occurrences.len(), 2);
        assert_eq!(lifted_occurrences[0].index, 0);
        assert_eq!(lifted_occurrences[1].index, 1);
    }

    fn oracle_occurrences(text: &Word, code: &Code) -> Vec<FactorOccurrence> {
        let letters = text.letters();
        let mut occurrences = Vec::new();
        for (wi, word) in code.words().iter().enumerate() {
            let w = word.letters();
            if w.len() > letters.len() {
                continue;
            }
            for start in 0..=letters.len() - w.len() {
                if letters[start..start + w.len()] == *w {
                    occurrences.push(FactorOccurrence {
                        index: wi as u64,
                        start: start + 1,
                        end: start + w.len(),
                    });
                }
            }
        }
        occurrences.sort_by_key(|o| (o.start, o.end));
        occurrences
    }

    #[test]
    fn garbage_gap_leaves_exactly_two_occurrences() {
        let code = abc_code();
        let explicit = code.to_code(100).unwrap();
        let x1 = encode(&Message::new(vec![0]), &code).unwrap();
        let x2 = encode(&Message::new(vec![3]), &code).unwrap();

        // rejection-sample a garbage gap with no codeword factor
        let mut state = 0x5EEDu64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 33
        };
        let gap = loop {
            let len = 1 + next() as usize % 4;
            let candidate = Word::new((0..len).map(|_| (next() % 3) as u32).collect());
            let stitched = x1.concat(&candidate).concat(&x2);
            // the gap must not create or contain extra occurrences
            if oracle_occurrences(&stitched, &explicit).len() == 2 {
                break candidate;
            }
        };

        let text = x1.concat(&gap).concat(&x2);
        let occurrences = scan_factors(&text, &explicit).unwrap();
        assert_eq!(occurrences, oracle_occurrences(&text, &explicit));
        assert_eq!(occurrences.len(), 2);
        assert_eq!(occurrences[0].start, 1);
        assert_eq!(occurrences[1].end, text.len());
    }

    #[test]
    fn corrupting_one_codeword_keeps_the_other_two_findable() {
        let code = abc_code();
        let explicit = code.to_code(100).unwrap();
        let stream = encode(&Message::new(vec![0, 1, 2]), &code).unwrap();
        let alphabet_size = code.alphabet().len() as u32;

        // exhaust every single-letter substitution inside the middle codeword
        let mut corrupted_cases = 0;
        for position in 3..6usize {
            for letter in 0..alphabet_size {
                let mut letters = stream.letters().to_vec();
                if letters[position] == letter {
                    continue;
                }
                letters[position] = letter;
                let text = Word::new(letters);
                let middle = Word::new(text.letters()[3..6].to_vec());
                if explicit.contains(&middle) {
                    continue; // still a codeword, not a corruption into garbage
                }
                corrupted_cases += 1;
                let occurrences = scan_factors(&text, &explicit).unwrap();
                assert_eq!(occurrences, oracle_occurrences(&text, &explicit));
                let spans: Vec<(usize, usize)> =
                    occurrences.iter().map(|o| (o.start, o.end)).collect();
                assert!(spans.contains(&(1, 3)), "first codeword lost: {spans:?}");
                assert!(spans.contains(&(7, 9)), "third codeword lost: {spans:?}");
            }
        }
        assert!(corrupted_cases > 0);
    }

    #[test]
    fn scan_requires_solid_code() {
        let alphabet = Alphabet::new(["0", "1"]).unwrap();
        let code = Code::from_tokens(alphabet, &[vec!["1", "0"], vec!["1", "1", "0"]]).unwrap();
        assert_eq!(
            scan_factors(&Word::new(vec![0, 1]), &code).unwrap_err(),
            Error::NotSolid
        );
    }

    #[test]
    fn scan_empty_word_yields_nothing() {
        let code = abc_code();
        let explicit = code.to_code(100).unwrap();
        assert!(scan_factors(&Word::empty(), &explicit).unwrap().is_empty());
    }

    fn noisy_within_class_channel(alphabet: &Alphabet) -> ChannelModel {
        // p(a -> b) = p(b -> a) = 0.1, c fixed
        let rows = vec![
            vec![0.9, 0.1, 0.0],
            vec![0.1, 0.9, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        ChannelModel::new(alphabet.clone(), rows).unwrap()
    }

    #[test]
    fn detection_census_identity_channel() {
        let code = abc_code();
        let ch = ChannelModel::identity(code.alphabet().clone());
        let sent = encode(&Message::new(vec![0, 3]), &code).unwrap();
        let report = verify_error_detection(&code, &ch, &sent, 1_000_000).unwrap();
        assert_eq!(report.total_outcomes, 1);
        assert_eq!(report.decodable, 1);
        assert_eq!(report.detected, 0);
        assert_eq!(report.word_mismatches, 0);
        assert!(report.guarantees_hold());
    }

    #[test]
    fn within_class_noise_preserves_signature_but_not_word() {
        let code = abc_code();
        let ch = noisy_within_class_channel(code.alphabet());
        let sent = code.alphabet().word(["c", "a", "a"]).unwrap();
        let report = verify_error_detection(&code, &ch, &sent, 1_000_000).unwrap();
        assert!(report.cross_class.holds);
        assert!(!report.within_class.holds);
        assert_eq!(report.total_outcomes, 4); // c fixed, two binary positions
        assert_eq!(report.decodable, 4);
        assert_eq!(report.signature_mismatches, 0);
        assert_eq!(report.word_mismatches, 3);
        // signature preservation was in force and held; exact recovery was not in force
        assert!(report.guarantees_hold());
        let exhibited = report.first_word_mismatch.unwrap();
        assert_ne!(exhibited, sent);
        assert!(parse(&exhibited, &code).unwrap().is_decoded());
    }

    #[test]
    fn class_swapping_noise_is_always_detected() {
        let code = abc_code();
        // support only a <-> c: both conditions hold
        let rows = vec![
            vec![0.5, 0.0, 0.5],
            vec![0.0, 1.0, 0.0],
            vec![0.5, 0.0, 0.5],
        ];
        let ch = ChannelModel::new(code.alphabet().clone(), rows).unwrap();
        let sent = code.alphabet().word(["c", "a", "a"]).unwrap();
        let report = verify_error_detection(&code, &ch, &sent, 1_000_000).unwrap();
        assert!(report.cross_class.holds);
        assert!(report.within_class.holds);
        assert_eq!(report.total_outcomes, 8);
        assert_eq!(report.decodable, 1); // only the uncorrupted outcome survives
        assert_eq!(report.detected, 7);
        assert_eq!(report.word_mismatches, 0);
        assert!(report.guarantees_hold());
    }

    #[test]
    fn precondition_requires_codeword_concatenation() {
        let code = abc_code();
        let ch = ChannelModel::identity(code.alphabet().clone());
        let bad = code.alphabet().word(["a", "c"]).unwrap();
        assert!(matches!(
            verify_error_detection(&code, &ch, &bad, 1_000).unwrap_err(),
            Error::PreconditionFailed { .. }
        ));
    }

    #[test]
    fn all_messages_counts() {
        assert_eq!(all_messages(6, 3).len(), 1 + 6 + 36 + 216);
        assert_eq!(all_messages(4, 0).len(), 1);
    }
}
