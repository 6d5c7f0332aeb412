//! Codes, the solid-code check with witnesses, unique decipherability, and
//! the signature-lifting constructions.
//!
//! [`check_solid`] is a direct `O(|X|^2 * maxlen^2)` comparison; this crate
//! is a verification tool for desk-scale codes, so no suffix-automaton
//! machinery. When a code is not solid the report carries a minimal witness:
//! shortest shared segment first, ties broken by lexicographic order of
//! `(x, y, offset)` over letter indices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, ClassId, LengthFunction, LetterId, SignaturePartition, Word};
use crate::error::Error;

/// A finite set of distinct nonempty words over one alphabet.
///
/// Words are stored in canonical order: by length, then lexicographically by
/// letter index. Message indices refer to this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeJson", into = "CodeJson")]
pub struct Code {
    alphabet: Alphabet,
    words: Vec<Word>,
}

fn canonical_key(w: &Word) -> (usize, &[LetterId]) {
    (w.len(), w.letters())
}

impl Code {
    pub fn new(alphabet: Alphabet, words: Vec<Word>) -> Result<Self, Error> {
        if words.is_empty() {
            return Err(Error::EmptyCode);
        }
        for (index, word) in words.iter().enumerate() {
            if word.is_empty() {
                return Err(Error::EmptyCodeWord { index });
            }
            for (pos, &letter) in word.letters().iter().enumerate() {
                if letter as usize >= alphabet.len() {
                    return Err(Error::CodeLetterOutOfRange {
                        word_index: index,
                        position: pos + 1,
                    });
                }
            }
        }
        let mut words = words;
        words.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
        for pair in words.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateWord {
                    word: alphabet.render(&pair[0]),
                });
            }
        }
        Ok(Self { alphabet, words })
    }

    /// Builds a code from letter tokens.
    pub fn from_tokens<S: AsRef<str>>(alphabet: Alphabet, words: &[Vec<S>]) -> Result<Self, Error> {
        let resolved = words
            .iter()
            .map(|tokens| alphabet.word(tokens.iter().map(AsRef::as_ref)))
            .collect::<Result<Vec<_>, _>>()?;
        Code::new(alphabet, resolved)
    }

    /// A code over the class alphabet `{"0", ..., "n"}`, each word a sequence
    /// of class indices.
    pub fn signature_code(n: ClassId, words: Vec<Vec<ClassId>>) -> Result<Self, Error> {
        for word in &words {
            for &class in word {
                if class > n {
                    return Err(Error::UnknownClass { class, n });
                }
            }
        }
        let words = words.into_iter().map(Word::new).collect();
        Code::new(Alphabet::class_alphabet(n), words)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_at(&self, index: usize) -> Option<&Word> {
        self.words.get(index)
    }

    pub fn index_of(&self, word: &Word) -> Option<usize> {
        self.words
            .binary_search_by(|w| canonical_key(w).cmp(&canonical_key(word)))
            .ok()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.index_of(word).is_some()
    }

    pub fn max_word_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    alphabet: Alphabet,
    words: Vec<Vec<String>>,
}

impl TryFrom<CodeJson> for Code {
    type Error = Error;
    fn try_from(json: CodeJson) -> Result<Self, Error> {
        Code::from_tokens(json.alphabet, &json.words)
    }
}

impl From<Code> for CodeJson {
    fn from(code: Code) -> Self {
        let words = code
            .words
            .iter()
            .map(|w| {
                w.letters()
                    .iter()
                    .map(|&id| code.alphabet.token(id).unwrap_or("?").to_string())
                    .collect()
            })
            .collect();
        CodeJson {
            alphabet: code.alphabet,
            words,
        }
    }
}

/// Why a code fails to be solid. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolidityViolation {
    /// A nonempty proper prefix of `prefix_of` equals a nonempty proper
    /// suffix of `suffix_of` (the two words may coincide). The segment
    /// occupies positions `1..=segment.len()` of `prefix_of` and
    /// `suffix_start..` of `suffix_of`.
    Overlap {
        prefix_of: Word,
        suffix_of: Word,
        segment: Word,
        suffix_start: usize,
    },
    /// `inner` occurs as a contiguous factor of the different word `outer`,
    /// starting at `offset`.
    Infix {
        inner: Word,
        outer: Word,
        offset: usize,
    },
}

impl SolidityViolation {
    /// Length of the shared segment the witness exhibits.
    pub fn segment_len(&self) -> usize {
        match self {
            SolidityViolation::Overlap { segment, .. } => segment.len(),
            SolidityViolation::Infix { inner, .. } => inner.len(),
        }
    }

    /// Re-checks the witness by direct letter comparison.
    pub fn verify(&self) -> bool {
        match self {
            SolidityViolation::Overlap {
                prefix_of,
                suffix_of,
                segment,
                suffix_start,
            } => {
                let k = segment.len();
                k >= 1
                    && k < prefix_of.len()
                    && k < suffix_of.len()
                    && *suffix_start == suffix_of.len() - k + 1
                    && prefix_of.letters()[..k] == *segment.letters()
                    && suffix_of.letters()[suffix_of.len() - k..] == *segment.letters()
            }
            SolidityViolation::Infix {
                inner,
                outer,
                offset,
            } => {
                let k = inner.len();
                inner != outer
                    && *offset >= 1
                    && offset + k - 1 <= outer.len()
                    && outer.letters()[offset - 1..offset - 1 + k] == *inner.letters()
            }
        }
    }
}

/// Verdict of [`check_solid`], with a minimal witness when not solid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolidityReport {
    pub is_solid: bool,
    pub violation: Option<SolidityViolation>,
}

type WitnessKey = (usize, Vec<LetterId>, Vec<LetterId>, usize, u8);

/// Checks both solid-code conditions over all word pairs.
///
/// Condition (i) ranges over nonempty *proper* prefixes and suffixes (a word
/// against itself included); condition (ii) over contiguous factors of a
/// *different* word. The verdict is independent of input order; the witness
/// is the minimal one under `(segment length, x, y, offset)`.
pub fn check_solid(code: &Code) -> SolidityReport {
    let mut best: Option<(WitnessKey, SolidityViolation)> = None;

    let mut consider = |key: WitnessKey, violation: SolidityViolation| {
        let better = match &best {
            None => true,
            Some((existing, _)) => key < *existing,
        };
        if better {
            best = Some((key, violation));
        }
    };

    for x in code.words() {
        for y in code.words() {
            // prefix of x vs suffix of y
            let kmax = (x.len() - 1).min(y.len() - 1);
            for k in 1..=kmax {
                if x.letters()[..k] == y.letters()[y.len() - k..] {
                    let suffix_start = y.len() - k + 1;
                    consider(
                        (
                            k,
                            x.letters().to_vec(),
                            y.letters().to_vec(),
                            suffix_start,
                            0,
                        ),
                        SolidityViolation::Overlap {
                            prefix_of: x.clone(),
                            suffix_of: y.clone(),
                            segment: Word::new(x.letters()[..k].to_vec()),
                            suffix_start,
                        },
                    );
                    break; // shorter k already minimal for this pair
                }
            }
            // x as a factor of a longer y
            if x.len() < y.len() {
                for start in 0..=(y.len() - x.len()) {
                    if y.letters()[start..start + x.len()] == *x.letters() {
                        consider(
                            (
                                x.len(),
                                x.letters().to_vec(),
                                y.letters().to_vec(),
                                start + 1,
                                1,
                            ),
                            SolidityViolation::Infix {
                                inner: x.clone(),
                                outer: y.clone(),
                                offset: start + 1,
                            },
                        );
                        break;
                    }
                }
            }
        }
    }

    SolidityReport {
        is_solid: best.is_none(),
        violation: best.map(|(_, v)| v),
    }
}

/// Unique-decipherability via the dangling-suffix iteration.
///
/// Returns `Ok(true)` when no string factors two ways into codewords. The
/// iteration tracks sets of proper dangling suffixes; `suffix_budget` caps
/// the size of any such set, and exceeding it reports [`Error::BudgetExceeded`]
/// (the instance is too large for the oracle, not a verdict).
pub fn is_uniquely_decipherable(code: &Code, suffix_budget: usize) -> Result<bool, Error> {
    let words: Vec<&[LetterId]> = code.words().iter().map(Word::letters).collect();
    let word_set: BTreeSet<&[LetterId]> = words.iter().copied().collect();

    let mut current: BTreeSet<Vec<LetterId>> = BTreeSet::new();
    for &x in &words {
        for &y in &words {
            if x.len() < y.len() && y[..x.len()] == *x {
                current.insert(y[x.len()..].to_vec());
            }
        }
    }

    let mut seen: BTreeSet<Vec<Vec<LetterId>>> = BTreeSet::new();
    loop {
        if current.is_empty() {
            return Ok(true);
        }
        if current.len() > suffix_budget {
            return Err(Error::BudgetExceeded {
                budget: suffix_budget,
            });
        }
        if current.iter().any(|u| word_set.contains(u.as_slice())) {
            return Ok(false);
        }
        let snapshot: Vec<Vec<LetterId>> = current.iter().cloned().collect();
        if !seen.insert(snapshot) {
            return Ok(true);
        }
        let mut next = BTreeSet::new();
        for u in &current {
            for &x in &words {
                if u.len() > x.len() && u[..x.len()] == *x {
                    next.insert(u[x.len()..].to_vec());
                }
                if x.len() > u.len() && x[..u.len()] == *u.as_slice() {
                    next.insert(x[u.len()..].to_vec());
                }
            }
        }
        current = next;
    }
}

/// The preimage of a signature code under the signature map, kept lazy.
///
/// Membership, cardinality, and rank/unrank never enumerate; explicit
/// enumeration is guarded by a cap. Words are ordered by signature word
/// (length, then lexicographic over class indices), then mixed-radix over the
/// per-position class-member indices, most significant position first.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedCode {
    signature_code: Code,
    partition: SignaturePartition,
    sig_words: Vec<Vec<ClassId>>,
    block_sizes: Vec<u128>,
    cardinality: u128,
}

/// Interprets each signature-code letter token as a class index and forms the
/// preimage code over the partition's alphabet.
pub fn lift(signature_code: &Code, partition: &SignaturePartition) -> Result<LiftedCode, Error> {
    let n = partition.n();
    let mut letter_class = Vec::with_capacity(signature_code.alphabet().len());
    for token in signature_code.alphabet().letters() {
        let class: ClassId = token.parse().map_err(|_| Error::ClassTokenUnparsable {
            token: token.clone(),
        })?;
        letter_class.push(class);
    }
    let mut sig_words = Vec::with_capacity(signature_code.len());
    for word in signature_code.words() {
        let classes: Vec<ClassId> = word
            .letters()
            .iter()
            .map(|&id| letter_class[id as usize])
            .collect();
        if let Some(&class) = classes.iter().find(|&&c| c > n) {
            return Err(Error::UnknownClass { class, n });
        }
        sig_words.push(classes);
    }
    sig_words.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));

    let mut block_sizes = Vec::with_capacity(sig_words.len());
    let mut cardinality: u128 = 0;
    for classes in &sig_words {
        let mut size: u128 = 1;
        for &class in classes {
            let members = partition.members(class).len() as u128;
            size = size
                .checked_mul(members)
                .ok_or(Error::CardinalityOverflow)?;
        }
        cardinality = cardinality
            .checked_add(size)
            .ok_or(Error::CardinalityOverflow)?;
        block_sizes.push(size);
    }

    Ok(LiftedCode {
        signature_code: signature_code.clone(),
        partition: partition.clone(),
        sig_words,
        block_sizes,
        cardinality,
    })
}

impl LiftedCode {
    pub fn signature_code(&self) -> &Code {
        &self.signature_code
    }

    pub fn partition(&self) -> &SignaturePartition {
        &self.partition
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.partition.alphabet()
    }

    /// Signature words in enumeration order.
    pub fn signature_words(&self) -> &[Vec<ClassId>] {
        &self.sig_words
    }

    /// Number of words, computed from class sizes without enumeration.
    pub fn cardinality(&self) -> u128 {
        self.cardinality
    }

    pub fn max_word_len(&self) -> usize {
        self.sig_words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Membership: the word's signature must be a signature-code word.
    pub fn contains(&self, word: &Word) -> bool {
        match self.partition.signature(word) {
            Ok(sig) => self.sig_word_index(sig.classes()).is_some(),
            Err(_) => false,
        }
    }

    fn sig_word_index(&self, classes: &[ClassId]) -> Option<usize> {
        self.sig_words
            .binary_search_by(|w| (w.len(), w.as_slice()).cmp(&(classes.len(), classes)))
            .ok()
    }

    /// Position of `word` in enumeration order, without enumerating.
    pub fn rank(&self, word: &Word) -> Option<u128> {
        let sig = self.partition.signature(word).ok()?;
        let block = self.sig_word_index(sig.classes())?;
        let base: u128 = self.block_sizes[..block].iter().sum();
        let mut weight = self.block_sizes[block];
        let mut offset: u128 = 0;
        for (r, &class) in sig.classes().iter().enumerate() {
            let members = self.partition.members(class);
            weight /= members.len() as u128;
            let digit = members.binary_search(&word.letters()[r]).ok()?;
            offset += digit as u128 * weight;
        }
        Some(base + offset)
    }

    /// Inverse of [`LiftedCode::rank`].
    pub fn word_at_rank(&self, rank: u128) -> Option<Word> {
        if rank >= self.cardinality {
            return None;
        }
        let mut remaining = rank;
        let mut block = 0;
        while remaining >= self.block_sizes[block] {
            remaining -= self.block_sizes[block];
            block += 1;
        }
        let classes = &self.sig_words[block];
        let mut weight = self.block_sizes[block];
        let mut letters = Vec::with_capacity(classes.len());
        for &class in classes {
            let members = self.partition.members(class);
            weight /= members.len() as u128;
            let digit = (remaining / weight) as usize;
            remaining %= weight;
            letters.push(members[digit]);
        }
        Some(Word::new(letters))
    }

    /// Lazy iterator over all words in enumeration order.
    pub fn iter(&self) -> LiftedWords<'_> {
        LiftedWords {
            code: self,
            block: 0,
            digits: Vec::new(),
            started: false,
        }
    }

    /// Explicit word list, refused with [`Error::CapExceeded`] above `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Word>, Error> {
        if self.cardinality > cap as u128 {
            return Err(Error::CapExceeded {
                needed: self.cardinality,
                cap,
            });
        }
        Ok(self.iter().collect())
    }

    /// Materializes an explicit [`Code`] (re-sorted into that type's
    /// canonical order, which may differ from lifted enumeration order).
    pub fn to_code(&self, cap: u64) -> Result<Code, Error> {
        Code::new(self.partition.alphabet().clone(), self.enumerate(cap)?)
    }

    /// When every signature word is a nonzero lead class followed by a run of
    /// zeros, with distinct leads, returns the lead-class -> run-length map.
    pub fn canonical_run_lengths(&self) -> Option<BTreeMap<ClassId, usize>> {
        let mut runs = BTreeMap::new();
        for classes in &self.sig_words {
            let (&lead, rest) = classes.split_first()?;
            if lead == 0 || rest.iter().any(|&c| c != 0) {
                return None;
            }
            if runs.insert(lead, rest.len()).is_some() {
                return None;
            }
        }
        Some(runs)
    }
}

/// Iterator over a lifted code's words; see [`LiftedCode::iter`].
pub struct LiftedWords<'a> {
    code: &'a LiftedCode,
    block: usize,
    digits: Vec<usize>,
    started: bool,
}

impl LiftedWords<'_> {
    fn current(&self) -> Word {
        let classes = &self.code.sig_words[self.block];
        Word::new(
            classes
                .iter()
                .zip(&self.digits)
                .map(|(&class, &digit)| self.code.partition.members(class)[digit])
                .collect(),
        )
    }

    fn advance(&mut self) -> bool {
        let classes = &self.code.sig_words[self.block];
        for pos in (0..classes.len()).rev() {
            let size = self.code.partition.members(classes[pos]).len();
            if self.digits[pos] + 1 < size {
                self.digits[pos] += 1;
                for d in &mut self.digits[pos + 1..] {
                    *d = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for LiftedWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if !self.started {
            if self.code.sig_words.is_empty() {
                return None;
            }
            self.started = true;
            self.digits = vec![0; self.code.sig_words[self.block].len()];
            return Some(self.current());
        }
        if self.advance() {
            return Some(self.current());
        }
        self.block += 1;
        if self.block >= self.code.sig_words.len() {
            return None;
        }
        self.digits = vec![0; self.code.sig_words[self.block].len()];
        Some(self.current())
    }
}

/// The signature code `{ l 0^L(l) | l in 1..=n }`.
pub fn canonical_signature_code(lengths: &LengthFunction) -> Code {
    let n = lengths.n();
    let words = (1..=n)
        .map(|class| {
            let mut word = vec![class];
            word.extend(std::iter::repeat_n(0, lengths.run_length(class).unwrap()));
            word
        })
        .collect();
    Code::signature_code(n, words).expect("canonical signature words are distinct and nonempty")
}

/// The canonical solid code `{ a0 .. ak | a0 in P_l, l >= 1, k = L(l), ai in P_0 }`.
pub fn canonical_solid_code(
    partition: &SignaturePartition,
    lengths: &LengthFunction,
) -> Result<LiftedCode, Error> {
    if lengths.n() != partition.n() {
        return Err(Error::LengthsMismatch {
            expected: partition.n(),
            got: lengths.n(),
        });
    }
    lift(&canonical_signature_code(lengths), partition)
}

/// Per-class sizes `|P_l| * |P_0|^L(l)` of the canonical solid code.
pub fn canonical_size_by_class(
    partition: &SignaturePartition,
    lengths: &LengthFunction,
) -> Result<Vec<(ClassId, u128)>, Error> {
    if lengths.n() != partition.n() {
        return Err(Error::LengthsMismatch {
            expected: partition.n(),
            got: lengths.n(),
        });
    }
    let p0 = partition.members(0).len() as u128;
    let mut sizes = Vec::new();
    for class in 1..=partition.n() {
        let members = partition.members(class).len() as u128;
        let run = lengths.run_length(class).unwrap() as u32;
        let size = p0
            .checked_pow(run)
            .and_then(|pow| members.checked_mul(pow))
            .ok_or(Error::CardinalityOverflow)?;
        sizes.push((class, size));
    }
    Ok(sizes)
}
