//! Alphabets, words, signature partitions, and the signature map.
//!
//! A [`SignaturePartition`] splits a finite alphabet into classes
//! `P_0 ..= P_n`; the *signature* of a word replaces each letter by the index
//! of its class. Words use the 1-based `s[r]` indexing convention in their
//! public accessors. All types here are immutable once constructed.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Index of a letter within its alphabet (0-based, declaration order).
pub type LetterId = u32;
/// Index of a partition class, `0 ..= n`.
pub type ClassId = u32;

/// An ordered finite set of distinct letter tokens.
///
/// Letters are opaque: only identity and declaration order matter. Tokens are
/// arbitrary non-empty-set strings; the binary module uses bitstrings such as
/// `"011"` as tokens, the UTF-8 module uses two-digit hex bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetJson", into = "AlphabetJson")]
pub struct Alphabet {
    letters: Vec<String>,
    index: HashMap<String, LetterId>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(letters.len());
        for (i, letter) in letters.iter().enumerate() {
            if index.insert(letter.clone(), i as LetterId).is_some() {
                return Err(Error::DuplicateLetter {
                    letter: letter.clone(),
                });
            }
        }
        Ok(Self { letters, index })
    }

    /// The class-index alphabet `{"0", ..., "n"}` used by signature codes.
    pub fn class_alphabet(n: ClassId) -> Self {
        Self::new((0..=n).map(|c| c.to_string())).expect("class tokens are distinct")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn token(&self, id: LetterId) -> Option<&str> {
        self.letters.get(id as usize).map(String::as_str)
    }

    pub fn id_of(&self, token: &str) -> Option<LetterId> {
        self.index.get(token).copied()
    }

    /// Builds a word from letter tokens, reporting the first unknown token.
    pub fn word<I, S>(&self, tokens: I) -> Result<Word, Error>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut letters = Vec::new();
        for token in tokens {
            let token = token.as_ref();
            let id = self.id_of(token).ok_or_else(|| Error::UnknownLetterToken {
                token: token.to_string(),
            })?;
            letters.push(id);
        }
        Ok(Word::new(letters))
    }

    /// Renders a word with this alphabet's tokens. Tokens are concatenated
    /// when every letter is a single character, otherwise space-separated.
    pub fn render(&self, word: &Word) -> String {
        let compact = self.letters.iter().all(|t| t.chars().count() == 1);
        let sep = if compact { "" } else { " " };
        word.letters()
            .iter()
            .map(|&id| self.token(id).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[derive(Serialize, Deserialize)]
struct AlphabetJson {
    letters: Vec<String>,
}

impl TryFrom<AlphabetJson> for Alphabet {
    type Error = Error;
    fn try_from(json: AlphabetJson) -> Result<Self, Error> {
        Alphabet::new(json.letters)
    }
}

impl From<Alphabet> for AlphabetJson {
    fn from(a: Alphabet) -> Self {
        AlphabetJson { letters: a.letters }
    }
}

/// A finite sequence of letters. Public accessors are 1-based: `at(r)` is the
/// `r`th letter for `1 <= r <= len()`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<LetterId>);

impl Word {
    pub fn new(letters: Vec<LetterId>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based letter access.
    pub fn at(&self, r: usize) -> Option<LetterId> {
        if r == 0 {
            return None;
        }
        self.0.get(r - 1).copied()
    }

    pub fn letters(&self) -> &[LetterId] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The factor spanning 1-based positions `start ..= end` (empty when
    /// `start > end`).
    pub fn factor(&self, start: usize, end: usize) -> Word {
        if start > end {
            return Word::empty();
        }
        Word(self.0[start - 1..end].to_vec())
    }
}

impl From<Vec<LetterId>> for Word {
    fn from(letters: Vec<LetterId>) -> Self {
        Word(letters)
    }
}

/// The sequence of class indices of a word's letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(Vec<ClassId>);

impl Signature {
    pub fn new(classes: Vec<ClassId>) -> Self {
        Signature(classes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based class access.
    pub fn at(&self, r: usize) -> Option<ClassId> {
        if r == 0 {
            return None;
        }
        self.0.get(r - 1).copied()
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.0
    }

    pub fn concat(&self, other: &Signature) -> Signature {
        let mut classes = self.0.clone();
        classes.extend_from_slice(&other.0);
        Signature(classes)
    }
}

/// A partition of an alphabet into classes `P_0 ..= P_n`, `n >= 1`, every
/// class nonempty, every letter in exactly one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct SignaturePartition {
    alphabet: Alphabet,
    class_of: Vec<ClassId>,
    members: Vec<Vec<LetterId>>,
}

impl SignaturePartition {
    /// Builds a partition from member lists, `classes[0]` being `P_0`.
    pub fn from_tokens<S: AsRef<str>>(
        alphabet: Alphabet,
        classes: &[Vec<S>],
    ) -> Result<Self, Error> {
        if classes.len() < 2 {
            return Err(Error::TooFewClasses {
                classes: classes.len(),
            });
        }
        let mut class_of: Vec<Option<ClassId>> = vec![None; alphabet.len()];
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::EmptyClass {
                    class: c as ClassId,
                });
            }
            for token in class {
                let token = token.as_ref();
                let id = alphabet
                    .id_of(token)
                    .ok_or_else(|| Error::UnknownLetterToken {
                        token: token.to_string(),
                    })?;
                let slot = &mut class_of[id as usize];
                if slot.is_some() {
                    return Err(Error::LetterInMultipleClasses {
                        letter: token.to_string(),
                    });
                }
                *slot = Some(c as ClassId);
            }
        }
        let mut resolved = Vec::with_capacity(class_of.len());
        for (id, slot) in class_of.iter().enumerate() {
            match slot {
                Some(c) => resolved.push(*c),
                None => {
                    return Err(Error::LetterInNoClass {
                        letter: alphabet.letters[id].clone(),
                    })
                }
            }
        }
        Self::from_class_map(alphabet, resolved)
    }

    /// Builds a partition from a per-letter class map; `n` is the largest
    /// class index, and every class `0..=n` must be hit.
    pub fn from_class_map(alphabet: Alphabet, class_of: Vec<ClassId>) -> Result<Self, Error> {
        if class_of.len() != alphabet.len() {
            return Err(Error::ClassMapSize {
                expected: alphabet.len(),
                got: class_of.len(),
            });
        }
        let n = class_of.iter().copied().max().unwrap_or(0);
        if n < 1 {
            return Err(Error::TooFewClasses {
                classes: n as usize + 1,
            });
        }
        let mut members = vec![Vec::new(); n as usize + 1];
        for (id, &c) in class_of.iter().enumerate() {
            members[c as usize].push(id as LetterId);
        }
        for (c, class) in members.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::EmptyClass {
                    class: c as ClassId,
                });
            }
        }
        Ok(Self {
            alphabet,
            class_of,
            members,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The largest class index `n`.
    pub fn n(&self) -> ClassId {
        self.members.len() as ClassId - 1
    }

    pub fn class_of(&self, letter: LetterId) -> Option<ClassId> {
        self.class_of.get(letter as usize).copied()
    }

    /// Letters of class `c`, in alphabet order.
    pub fn members(&self, c: ClassId) -> &[LetterId] {
        self.members
            .get(c as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// `(|P_0|, ..., |P_n|)`.
    pub fn class_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// The signature of `word`: `result[r] = class_of(word[r])`.
    pub fn signature(&self, word: &Word) -> Result<Signature, Error> {
        let mut classes = Vec::with_capacity(word.len());
        for (i, &letter) in word.letters().iter().enumerate() {
            match self.class_of(letter) {
                Some(c) => classes.push(c),
                None => return Err(Error::UnknownLetter { position: i + 1 }),
            }
        }
        Ok(Signature::new(classes))
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    letters: Vec<String>,
    classes: Vec<Vec<String>>,
}

impl TryFrom<PartitionJson> for SignaturePartition {
    type Error = Error;
    fn try_from(json: PartitionJson) -> Result<Self, Error> {
        let alphabet = Alphabet::new(json.letters)?;
        SignaturePartition::from_tokens(alphabet, &json.classes)
    }
}

impl From<SignaturePartition> for PartitionJson {
    fn from(p: SignaturePartition) -> Self {
        PartitionJson {
            letters: p.alphabet.letters.clone(),
            classes: p
                .members
                .iter()
                .map(|class| {
                    class
                        .iter()
                        .map(|&id| p.alphabet.letters[id as usize].clone())
                        .collect()
                })
                .collect(),
        }
    }
}

/// Whether `signature(uv)` equals `signature(u) . signature(v)`.
///
/// This is an identity of the signature map; it is exposed so the property
/// suite can quantify it over generated inputs.
pub fn signature_concat_identity(
    u: &Word,
    v: &Word,
    part: &SignaturePartition,
) -> Result<bool, Error> {
    let joined = part.signature(&u.concat(v))?;
    let split = part.signature(u)?.concat(&part.signature(v)?);
    Ok(joined == split)
}

/// A run-length map `L : {1, ..., n} -> length`.
///
/// Strict mode requires every `L(c) >= 1`; extended mode also admits
/// zero-length runs, which one-letter codewords (for example ASCII bytes in
/// the UTF-8 view) need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LengthsJson", into = "LengthsJson")]
pub struct LengthFunction {
    runs: Vec<usize>,
    strict: bool,
}

impl LengthFunction {
    pub fn new(runs: Vec<usize>, strict: bool) -> Result<Self, Error> {
        if runs.is_empty() {
            return Err(Error::EmptyLengths);
        }
        if strict {
            if let Some(pos) = runs.iter().position(|&r| r == 0) {
                return Err(Error::StrictLengthZero {
                    class: pos as ClassId + 1,
                });
            }
        }
        Ok(Self { runs, strict })
    }

    pub fn strict(runs: Vec<usize>) -> Result<Self, Error> {
        Self::new(runs, true)
    }

    pub fn extended(runs: Vec<usize>) -> Result<Self, Error> {
        Self::new(runs, false)
    }

    /// Builds from `{"1": k1, ...}` keys, validating the contiguous domain.
    pub fn from_map(map: &BTreeMap<String, usize>, strict: bool) -> Result<Self, Error> {
        let mut by_class = BTreeMap::new();
        for (key, &run) in map {
            let class: u32 = key
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::BadLengthKey { key: key.clone() })?;
            by_class.insert(class, run);
        }
        if by_class.is_empty() {
            return Err(Error::EmptyLengths);
        }
        let n = *by_class.keys().last().expect("nonempty");
        let mut runs = Vec::with_capacity(n as usize);
        for class in 1..=n {
            match by_class.get(&class) {
                Some(&run) => runs.push(run),
                None => return Err(Error::LengthDomainGap { class }),
            }
        }
        Self::new(runs, strict)
    }

    /// The largest class index the function covers.
    pub fn n(&self) -> ClassId {
        self.runs.len() as ClassId
    }

    /// `L(class)` for `1 <= class <= n`.
    pub fn run_length(&self, class: ClassId) -> Option<usize> {
        if class == 0 {
            return None;
        }
        self.runs.get(class as usize - 1).copied()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn max_run(&self) -> usize {
        self.runs.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct LengthsJson {
    #[serde(rename = "L")]
    runs: BTreeMap<String, usize>,
    #[serde(default = "default_strict")]
    strict: bool,
}

fn default_strict() -> bool {
    true
}

impl TryFrom<LengthsJson> for LengthFunction {
    type Error = Error;
    fn try_from(json: LengthsJson) -> Result<Self, Error> {
        LengthFunction::from_map(&json.runs, json.strict)
    }
}

impl From<LengthFunction> for LengthsJson {
    fn from(l: LengthFunction) -> Self {
        LengthsJson {
            runs: l
                .runs
                .iter()
                .enumerate()
                .map(|(i, &run)| ((i + 1).to_string(), run))
                .collect(),
            strict: l.strict,
        }
    }
}
