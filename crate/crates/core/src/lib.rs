//! Variable-length solid codes built from signature partitions.
//!
//! A code is *solid* when (i) no nonempty proper prefix of a codeword equals
//! a nonempty proper suffix of a codeword and (ii) no codeword is a
//! contiguous factor of a different codeword. Solid codes keep codeword
//! occurrences in an arbitrary string pairwise non-overlapping, so intact
//! codewords inside a corrupted stream can still be located and decoded.
//!
//! This crate builds solid codes by lifting solid *signature* codes through
//! a class partition of the alphabet, verifies solidness with explicit
//! witnesses, models per-letter substitution channels, and checks the
//! resulting error-detection guarantees both exhaustively (small instances)
//! and by seeded simulation. The [`binary`] module specializes the
//! construction to parity-partitioned bitstring alphabets and single-bitflip
//! noise; the [`utf8`] module certifies the byte-level solid-code structure
//! of UTF-8.

pub mod alphabet;
pub mod binary;
pub mod channel;
pub mod codec;
pub mod error;
pub mod solidity;
pub mod utf8;

pub use alphabet::{
    Alphabet, ClassId, LengthFunction, LetterId, Signature, SignaturePartition, Word,
};
pub use error::Error;
pub use solidity::{check_solid, lift, Code, LiftedCode, SolidityReport, SolidityViolation};

/// Default cap on explicit enumerations (lifted codes, channel outcomes).
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Default cap on the dangling-suffix set of the unique-decipherability
/// check.
pub const DEFAULT_SUFFIX_BUDGET: usize = 100_000;

pub type Result<T> = std::result::Result<T, Error>;
