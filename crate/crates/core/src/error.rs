//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet has no letters")]
    EmptyAlphabet,
    #[error("duplicate letter {letter:?}")]
    DuplicateLetter { letter: String },
    #[error("unknown letter {token:?}")]
    UnknownLetterToken { token: String },
    #[error("letter at position {position} is not in the alphabet")]
    UnknownLetter { position: usize },

    #[error("a signature partition needs classes 0..=n with n >= 1; got {classes} class(es)")]
    TooFewClasses { classes: usize },
    #[error("class {class} of the partition is empty")]
    EmptyClass { class: u32 },
    #[error("letter {letter:?} appears in more than one class")]
    LetterInMultipleClasses { letter: String },
    #[error("letter {letter:?} is not covered by any class")]
    LetterInNoClass { letter: String },
    #[error("class map covers {got} letters but the alphabet has {expected}")]
    ClassMapSize { expected: usize, got: usize },

    #[error("length function has an empty domain")]
    EmptyLengths,
    #[error("strict length functions require L({class}) >= 1; use extended mode to allow zero-length runs")]
    StrictLengthZero { class: u32 },
    #[error("length function key {key:?} is not a positive integer")]
    BadLengthKey { key: String },
    #[error("length function domain must be 1..=n without gaps; missing L({class})")]
    LengthDomainGap { class: u32 },
    #[error("length function covers 1..={got} but the partition has n = {expected}")]
    LengthsMismatch { expected: u32, got: u32 },

    #[error("code has no words")]
    EmptyCode,
    #[error("code word {index} is empty")]
    EmptyCodeWord { index: usize },
    #[error("duplicate code word {word:?}")]
    DuplicateWord { word: String },
    #[error("code word {word_index}, position {position}: letter is not in the alphabet")]
    CodeLetterOutOfRange { word_index: usize, position: usize },

    #[error("signature word references class {class}, but the partition stops at n = {n}")]
    UnknownClass { class: u32, n: u32 },
    #[error("signature-code letter {token:?} does not name a class index")]
    ClassTokenUnparsable { token: String },
    #[error("code cardinality overflows the supported range")]
    CardinalityOverflow,
    #[error("enumeration needs {needed} items, above the cap of {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("dangling-suffix set exceeded the budget of {budget}")]
    BudgetExceeded { budget: usize },

    #[error("channel and partition are over different alphabets")]
    AlphabetMismatch,
    #[error("channel matrix has {got} rows but the alphabet has {expected} letters")]
    RowCount { expected: usize, got: usize },
    #[error(
        "channel row for {letter:?} has {got} entries but the alphabet has {expected} letters"
    )]
    RowLength {
        letter: String,
        expected: usize,
        got: usize,
    },
    #[error("channel row for {letter:?} sums to {sum}, not 1")]
    RowNotStochastic { letter: String, sum: f64 },
    #[error("channel entry {from:?} -> {to:?} is negative or not finite")]
    BadProbability { from: String, to: String },

    #[error("message index {index} is out of range for a code of {count} words")]
    IndexOutOfRange { index: u64, count: u128 },
    #[error("precondition failed: {reason}")]
    PreconditionFailed { reason: String },
    #[error("code is not solid, so the factor-occurrence contract does not hold")]
    NotSolid,

    #[error("bitstring {token:?} contains characters other than 0 and 1")]
    InvalidBitstring { token: String },
    #[error("duplicate block {block:?}")]
    DuplicateBlock { block: String },
    #[error("no blocks of parity {parity}; both parities must be present")]
    MissingParity { parity: u8 },
    #[error("block {block:?} is not in the alphabet")]
    UnknownBlock { block: String },
    #[error("block {block:?} has even parity and cannot join an odd class")]
    WrongParityBlock { block: String },
    #[error("invalid single-bitflip parameters: {reason}")]
    InvalidFlipParams { reason: String },
    #[error("flipping bit {position} of block {block:?} leaves the alphabet; it is not closed under single flips")]
    NonClosedAlphabet { block: String, position: usize },

    #[error("{value:#x} is not a Unicode scalar value")]
    InvalidScalar { value: u32 },
    #[error("byte sequence is not well-formed at byte {position}")]
    InvalidUtf8 { position: usize },
}
