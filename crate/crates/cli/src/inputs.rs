//! Input-file loading with path-tagged validation errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use solidcode::alphabet::{Alphabet, LengthFunction, SignaturePartition, Word};
use solidcode::binary::{parity_partition, BitstringAlphabet};
use solidcode::channel::ChannelModel;
use solidcode::solidity::Code;

use crate::Framing;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_partition(path: &Path) -> Result<SignaturePartition> {
    serde_json::from_str(&read(path)?).with_context(|| format!("partition file {}", path.display()))
}

/// Loads a bitstring alphabet and builds the parity partition with all odd
/// blocks in a single class.
pub fn load_parity_partition(path: &Path) -> Result<(BitstringAlphabet, SignaturePartition)> {
    let alphabet: BitstringAlphabet = serde_json::from_str(&read(path)?)
        .with_context(|| format!("bitstring alphabet file {}", path.display()))?;
    let odd: Vec<_> = alphabet.odd_blocks().into_iter().cloned().collect();
    let partition = parity_partition(&alphabet, &[odd])
        .with_context(|| format!("parity partition over {}", path.display()))?;
    Ok((alphabet, partition))
}

/// Loads a run-length file; `force_extended` overrides the strict flag so an
/// existing file can be reused with zero-length runs allowed.
pub fn load_lengths(path: &Path, force_extended: bool) -> Result<LengthFunction> {
    let value: serde_json::Value = serde_json::from_str(&read(path)?)
        .with_context(|| format!("lengths file {}", path.display()))?;
    let strict = value
        .get("strict")
        .map(|s| {
            s.as_bool()
                .with_context(|| format!("\"strict\" must be a boolean in {}", path.display()))
        })
        .transpose()?
        .unwrap_or(true);
    let Some(entries) = value.get("L").and_then(|l| l.as_object()) else {
        bail!("lengths file {} needs an \"L\" object", path.display());
    };
    let mut map = BTreeMap::new();
    for (key, run) in entries {
        let Some(run) = run.as_u64() else {
            bail!(
                "L[{key:?}] must be a nonnegative integer in {}",
                path.display()
            );
        };
        map.insert(key.clone(), run as usize);
    }
    LengthFunction::from_map(&map, strict && !force_extended)
        .with_context(|| format!("lengths file {}", path.display()))
}

pub fn load_channel(path: &Path) -> Result<ChannelModel> {
    serde_json::from_str(&read(path)?).with_context(|| format!("channel file {}", path.display()))
}

pub fn load_code(path: &Path) -> Result<Code> {
    serde_json::from_str(&read(path)?).with_context(|| format!("code file {}", path.display()))
}

/// Reads a stream as a word over `alphabet`. Tokens (or bytes) that are not
/// alphabet letters map to an out-of-alphabet sentinel so they match nothing
/// during scanning; the count of such letters is returned alongside.
pub fn load_stream(path: &Path, framing: Framing, alphabet: &Alphabet) -> Result<(Word, usize)> {
    let sentinel = alphabet.len() as u32;
    let mut unknown = 0;
    let letters: Vec<u32> = match framing {
        Framing::Tokens => read(path)?
            .split_whitespace()
            .map(|token| {
                alphabet.id_of(token).unwrap_or_else(|| {
                    unknown += 1;
                    sentinel
                })
            })
            .collect(),
        Framing::Bytes => fs::read(path)
            .with_context(|| format!("reading {}", path.display()))?
            .into_iter()
            .map(|byte| {
                alphabet.id_of(&format!("{byte:02x}")).unwrap_or_else(|| {
                    unknown += 1;
                    sentinel
                })
            })
            .collect(),
    };
    Ok((Word::new(letters), unknown))
}
