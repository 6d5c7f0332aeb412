//! The five subcommands. Each returns the process exit code: 0 when the
//! property holds, 1 when it fails with a printed witness, 2 (via error
//! propagation) on validation problems.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use solidcode::alphabet::{LengthFunction, SignaturePartition, Word};
use solidcode::binary::{single_bitflip_channel, BitstringAlphabet, EscapePolicy, FlipSpec};
use solidcode::channel::{
    check_no_cross_class_transitions, check_no_within_class_transitions, outcome_count, transmit,
    ChannelModel,
};
use solidcode::codec::{
    all_messages, encode, parse, scan_factors, verify_error_detection, Message,
};
use solidcode::solidity::{
    canonical_size_by_class, canonical_solid_code, check_solid, is_uniquely_decipherable,
};
use solidcode::{utf8, Error};

use crate::output::{
    condition_text, condition_value, emit, render_word, solidity_value, violation_text,
    violation_value,
};
use crate::{BitflipPolicy, CheckArgs, ConstructArgs, ScanArgs, SimulateArgs, Utf8Args};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn resolve_partition(
    partition: Option<&Path>,
    alphabet: Option<&Path>,
) -> Result<SignaturePartition> {
    match (partition, alphabet) {
        (Some(path), None) => crate::inputs::load_partition(path),
        (None, Some(path)) => Ok(crate::inputs::load_parity_partition(path)?.1),
        _ => bail!("exactly one of --partition or --alphabet is required"),
    }
}

fn size_table(partition: &SignaturePartition, lengths: &LengthFunction) -> Result<Vec<Value>> {
    Ok(canonical_size_by_class(partition, lengths)?
        .into_iter()
        .map(|(class, size)| {
            json!({
                "class": class,
                "members": partition.members(class).len(),
                "run_length": lengths.run_length(class).unwrap(),
                "words": size.to_string(),
            })
        })
        .collect())
}

pub fn construct(args: ConstructArgs) -> Result<i32> {
    let partition = resolve_partition(args.partition.as_deref(), args.alphabet.as_deref())?;
    let lengths = crate::inputs::load_lengths(&args.lengths, args.extended_lengths)?;
    let code = canonical_solid_code(&partition, &lengths)?;
    let table = size_table(&partition, &lengths)?;
    let cardinality = code.cardinality();

    let mut text = Vec::new();
    for (class, size) in canonical_size_by_class(&partition, &lengths)? {
        text.push(format!(
            "class {class}: members {}, run length {}, words {size}",
            partition.members(class).len(),
            lengths.run_length(class).unwrap(),
        ));
    }
    text.push(format!("total codewords: {cardinality}"));

    let within_cap = cardinality <= args.cap as u128;
    let mut value = json!({
        "size_table": table,
        "cardinality": cardinality.to_string(),
        "within_cap": within_cap,
    });

    if within_cap {
        let explicit = code.to_code(args.cap)?;
        if let Some(out) = &args.out {
            write_file(out, &serde_json::to_string_pretty(&explicit)?)?;
            text.push(format!(
                "wrote {} codewords to {}",
                explicit.len(),
                out.display()
            ));
            value["out"] = json!(out.display().to_string());
        } else {
            let words: Vec<String> = explicit
                .words()
                .iter()
                .map(|w| render_word(partition.alphabet(), w))
                .collect();
            text.extend(words.iter().cloned());
            value["words"] = json!(words);
        }
    } else {
        let lazy = json!({
            "canonical": { "partition": &partition, "lengths": &lengths },
            "cardinality": cardinality.to_string(),
        });
        text.push(format!(
            "cardinality {cardinality} is above the cap {}; emitting the lazy description",
            args.cap
        ));
        if let Some(out) = &args.out {
            write_file(out, &serde_json::to_string_pretty(&lazy)?)?;
            text.push(format!("wrote lazy description to {}", out.display()));
            value["out"] = json!(out.display().to_string());
        }
        value["lazy"] = lazy;
    }

    emit(args.format, text, value);
    Ok(0)
}

pub fn check(args: CheckArgs) -> Result<i32> {
    let code = crate::inputs::load_code(&args.code)?;
    let report = check_solid(&code);
    let decipherable = match is_uniquely_decipherable(&code, args.budget) {
        Ok(verdict) => Some(verdict),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(other) => return Err(other.into()),
    };

    let mut text = vec![format!(
        "solid: {}",
        if report.is_solid { "yes" } else { "no" }
    )];
    if let Some(violation) = &report.violation {
        text.push(violation_text(code.alphabet(), violation));
    }
    text.push(match decipherable {
        Some(true) => "uniquely decipherable: yes".into(),
        Some(false) => "uniquely decipherable: no".into(),
        None => format!(
            "uniquely decipherable: unknown (suffix budget {} exceeded)",
            args.budget
        ),
    });

    let value = json!({
        "solidity": solidity_value(code.alphabet(), &report),
        "uniquely_decipherable": decipherable,
        "words": code.len(),
    });
    emit(args.format, text, value);
    Ok(if report.is_solid { 0 } else { 1 })
}

/// Stateless mix for deriving independent per-trial seeds.
fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Default)]
struct Census {
    messages: u64,
    outcomes: u64,
    decodable: u64,
    detected: u64,
    signature_mismatches: u64,
    word_mismatches: u64,
    violations: u64,
    first_word_mismatch: Option<(Word, Word)>,
}

fn simulate_channel(args: &SimulateArgs, partition: &SignaturePartition) -> Result<ChannelModel> {
    match (&args.channel, args.bitflip) {
        (Some(path), None) => {
            let channel = crate::inputs::load_channel(path)?;
            if channel.alphabet() != partition.alphabet() {
                bail!("channel and partition use different alphabets");
            }
            Ok(channel)
        }
        (None, Some(hold)) => {
            let blocks = partition
                .alphabet()
                .letters()
                .iter()
                .map(|token| token.parse())
                .collect::<std::result::Result<Vec<_>, _>>()
                .context("--bitflip needs bitstring letters")?;
            let alphabet = BitstringAlphabet::new(blocks)?;
            let policy = match args.bitflip_policy {
                BitflipPolicy::Renormalize => EscapePolicy::Renormalize,
                BitflipPolicy::Reject => EscapePolicy::Reject,
            };
            Ok(single_bitflip_channel(
                &alphabet,
                &FlipSpec::uniform(hold),
                policy,
            )?)
        }
        _ => bail!("exactly one of --channel or --bitflip is required"),
    }
}

pub fn simulate(args: SimulateArgs) -> Result<i32> {
    let partition = resolve_partition(args.partition.as_deref(), args.alphabet.as_deref())?;
    let lengths = crate::inputs::load_lengths(&args.lengths, args.extended_lengths)?;
    let code = canonical_solid_code(&partition, &lengths)?;
    let channel = simulate_channel(&args, &partition)?;

    let cross = check_no_cross_class_transitions(&channel, &partition)?;
    let within = check_no_within_class_transitions(&channel, &partition)?;
    let seed = args.seed.unwrap_or_else(rand::random);

    // exhaustive when every message's outcome census fits under the cap
    let word_count = u64::try_from(code.cardinality()).unwrap_or(u64::MAX);
    let mut message_total: u128 = 1; // the empty message
    for k in 1..=args.max_words {
        message_total = message_total.saturating_add((word_count as u128).saturating_pow(k as u32));
    }
    let mut exhaustive = message_total <= args.cap as u128;
    let mut messages = Vec::new();
    if exhaustive {
        messages = all_messages(word_count, args.max_words);
        let mut outcome_total: u128 = 0;
        for message in &messages {
            let sent = encode(message, &code)?;
            outcome_total = outcome_total.saturating_add(outcome_count(&sent, &channel)?);
            if outcome_total > args.cap as u128 {
                exhaustive = false;
                break;
            }
        }
    }

    let mut census = Census::default();
    let mut warning = None;
    if exhaustive {
        for message in &messages {
            let sent = encode(message, &code)?;
            let report = verify_error_detection(&code, &channel, &sent, args.cap)?;
            census.messages += 1;
            census.outcomes += report.total_outcomes;
            census.decodable += report.decodable;
            census.detected += report.detected;
            census.signature_mismatches += report.signature_mismatches;
            census.word_mismatches += report.word_mismatches;
            census.violations += report.violation_count;
            if census.first_word_mismatch.is_none() {
                if let Some(received) = report.first_word_mismatch {
                    census.first_word_mismatch = Some((sent.clone(), received));
                }
            }
        }
    } else {
        warning = Some(format!(
            "exhaustive census exceeds the cap {}; downgraded to {} Monte Carlo trials",
            args.cap, args.trials
        ));
        let max_words = args.max_words.max(1) as u64;
        for trial in 0..args.trials {
            let mut rng = SplitMix64 {
                state: mix(seed, trial),
            };
            let len = 1 + rng.next_u64() % max_words;
            let indices: Vec<u64> = (0..len).map(|_| rng.next_u64() % word_count).collect();
            let sent = encode(&Message::new(indices), &code)?;
            let received = transmit(&sent, &channel, rng.next_u64())?;
            census.messages += 1;
            census.outcomes += 1;
            if !parse(&received, &code)?.is_decoded() {
                census.detected += 1;
                continue;
            }
            census.decodable += 1;
            let signature_equal = partition.signature(&received)? == partition.signature(&sent)?;
            let word_equal = received == sent;
            if !signature_equal {
                census.signature_mismatches += 1;
                if cross.holds {
                    census.violations += 1;
                }
            }
            if !word_equal {
                census.word_mismatches += 1;
                if cross.holds && within.holds {
                    census.violations += 1;
                }
                if census.first_word_mismatch.is_none() {
                    census.first_word_mismatch = Some((sent, received));
                }
            }
        }
    }

    let alphabet = partition.alphabet();
    let mode = if exhaustive {
        "exhaustive"
    } else {
        "monte_carlo"
    };
    let mut text = vec![
        format!("mode: {mode}"),
        format!("seed: {seed}"),
        condition_text(
            alphabet,
            "cross-class condition (no l -> l' mass, l,l' >= 1 distinct)",
            &cross,
        ),
        condition_text(
            alphabet,
            "within-class condition (no a -> a' mass, same class)",
            &within,
        ),
        format!(
            "messages: {}, outcomes: {}, decodable: {}, detected: {}",
            census.messages, census.outcomes, census.decodable, census.detected
        ),
        format!(
            "signature mismatches: {}, undetected word errors: {}, guarantee violations: {}",
            census.signature_mismatches, census.word_mismatches, census.violations
        ),
    ];
    if let Some(warning) = &warning {
        text.insert(0, format!("warning: {warning}"));
    }
    if let Some((sent, received)) = &census.first_word_mismatch {
        text.push(format!(
            "undetected pair: sent \"{}\", received \"{}\"",
            render_word(alphabet, sent),
            render_word(alphabet, received)
        ));
    }

    let value = json!({
        "mode": mode,
        "seed": seed,
        "warning": warning,
        "cap": args.cap,
        "max_words": args.max_words,
        "trials": if exhaustive { Value::Null } else { json!(args.trials) },
        "code": {
            "cardinality": code.cardinality().to_string(),
            "size_table": size_table(&partition, &lengths)?,
        },
        "conditions": {
            "cross_class": condition_value(alphabet, &cross),
            "within_class": condition_value(alphabet, &within),
        },
        "census": {
            "messages": census.messages,
            "outcomes": census.outcomes,
            "decodable": census.decodable,
            "detected": census.detected,
            "signature_mismatches": census.signature_mismatches,
            "word_mismatches": census.word_mismatches,
            "violations": census.violations,
        },
        "first_word_mismatch": census.first_word_mismatch.as_ref().map(|(sent, received)| json!({
            "sent": render_word(alphabet, sent),
            "received": render_word(alphabet, received),
        })),
    });

    emit(args.format, text, value);
    Ok(if census.violations > 0 { 1 } else { 0 })
}

pub fn scan(args: ScanArgs) -> Result<i32> {
    let code = crate::inputs::load_code(&args.code)?;
    let report = check_solid(&code);
    if let Some(violation) = &report.violation {
        let text = vec![
            "code is not solid; the non-overlap contract is void".to_string(),
            violation_text(code.alphabet(), violation),
        ];
        let value = json!({ "solidity": solidity_value(code.alphabet(), &report) });
        emit(args.format, text, value);
        return Ok(1);
    }

    let (stream, unknown) =
        crate::inputs::load_stream(&args.stream, args.framing, code.alphabet())?;
    let occurrences = scan_factors(&stream, &code)?;

    let mut text = vec![format!(
        "stream: {} letters ({} outside the alphabet), occurrences: {}",
        stream.len(),
        unknown,
        occurrences.len()
    )];
    for occ in &occurrences {
        let word = code.word_at(occ.index as usize).expect("scanned index");
        text.push(format!(
            "[{}..={}] word {} \"{}\"",
            occ.start,
            occ.end,
            occ.index,
            render_word(code.alphabet(), word)
        ));
    }
    let value = json!({
        "stream_letters": stream.len(),
        "unknown_letters": unknown,
        "occurrences": occurrences.iter().map(|occ| json!({
            "index": occ.index,
            "start": occ.start,
            "end": occ.end,
            "word": render_word(
                code.alphabet(),
                code.word_at(occ.index as usize).expect("scanned index"),
            ),
        })).collect::<Vec<_>>(),
    });
    emit(args.format, text, value);
    Ok(0)
}

pub fn utf8(args: Utf8Args) -> Result<i32> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let certificate = utf8::verify_byte_solidity(args.pairs, seed);
    let witness = utf8::bit_level_counterexample();
    let reverified = witness.verify();
    let holds = certificate.holds() && reverified;

    let skeleton_alphabet = utf8::signature_skeleton().alphabet().clone();
    let bit_alphabet = solidcode::alphabet::Alphabet::new(["0", "1"]).unwrap();

    let text = vec![
        format!("seed: {seed}"),
        format!(
            "signature skeleton {{1, 20, 300, 4000}} solid: {}",
            certificate.skeleton.is_solid
        ),
        format!(
            "scalars with structural byte signature: {} / {}",
            certificate.scalars_structural, certificate.scalars_total
        ),
        format!(
            "random codeword pairs checked: {}, violations: {}",
            certificate.pairs_checked, certificate.pair_violations
        ),
        format!("subset step: {}", certificate.subset_note),
        format!("ranges: {}", certificate.range_note),
        format!(
            "bit-level counterexample ({}): {}",
            if reverified {
                "re-verified"
            } else {
                "FAILED to re-verify"
            },
            violation_text(&bit_alphabet, &witness)
        ),
        format!("byte-level solid: {}", if holds { "yes" } else { "NO" }),
    ];

    let value = json!({
        "seed": seed,
        "holds": holds,
        "byte_level": {
            "skeleton": solidity_value(&skeleton_alphabet, &certificate.skeleton),
            "scalars_total": certificate.scalars_total,
            "scalars_structural": certificate.scalars_structural,
            "pairs_checked": certificate.pairs_checked,
            "pair_violations": certificate.pair_violations,
            "subset_note": certificate.subset_note,
            "range_note": certificate.range_note,
        },
        "bit_level": {
            "witness": violation_value(&bit_alphabet, &witness),
            "reverified": reverified,
        },
    });
    emit(args.format, text, value);
    Ok(if holds { 0 } else { 1 })
}
