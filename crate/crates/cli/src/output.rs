//! Shared rendering: words, witnesses, and condition reports as JSON values
//! (deterministic key order) and text lines.

use serde_json::{json, Value};
use solidcode::alphabet::{Alphabet, Word};
use solidcode::channel::ConditionReport;
use solidcode::solidity::{SolidityReport, SolidityViolation};

use crate::Format;

pub fn render_word(alphabet: &Alphabet, word: &Word) -> String {
    alphabet.render(word)
}

pub fn violation_value(alphabet: &Alphabet, violation: &SolidityViolation) -> Value {
    match violation {
        SolidityViolation::Overlap {
            prefix_of,
            suffix_of,
            segment,
            suffix_start,
        } => json!({
            "kind": "overlap",
            "prefix_of": render_word(alphabet, prefix_of),
            "suffix_of": render_word(alphabet, suffix_of),
            "segment": render_word(alphabet, segment),
            "prefix_span": [1, segment.len()],
            "suffix_span": [suffix_start, suffix_of.len()],
        }),
        SolidityViolation::Infix {
            inner,
            outer,
            offset,
        } => json!({
            "kind": "infix",
            "inner": render_word(alphabet, inner),
            "outer": render_word(alphabet, outer),
            "span": [offset, offset + inner.len() - 1],
        }),
    }
}

pub fn violation_text(alphabet: &Alphabet, violation: &SolidityViolation) -> String {
    match violation {
        SolidityViolation::Overlap {
            prefix_of,
            suffix_of,
            segment,
            suffix_start,
        } => format!(
            "overlap: prefix \"{}\" of \"{}\" (positions 1..={}) is a suffix of \"{}\" (positions {}..={})",
            render_word(alphabet, segment),
            render_word(alphabet, prefix_of),
            segment.len(),
            render_word(alphabet, suffix_of),
            suffix_start,
            suffix_of.len(),
        ),
        SolidityViolation::Infix {
            inner,
            outer,
            offset,
        } => format!(
            "infix: \"{}\" occurs inside \"{}\" at positions {}..={}",
            render_word(alphabet, inner),
            render_word(alphabet, outer),
            offset,
            offset + inner.len() - 1,
        ),
    }
}

pub fn solidity_value(alphabet: &Alphabet, report: &SolidityReport) -> Value {
    json!({
        "is_solid": report.is_solid,
        "violation": report
            .violation
            .as_ref()
            .map(|v| violation_value(alphabet, v)),
    })
}

pub fn condition_value(alphabet: &Alphabet, report: &ConditionReport) -> Value {
    json!({
        "holds": report.holds,
        "counterexample": report.counterexample.as_ref().map(|ce| json!({
            "from": alphabet.token(ce.from),
            "to": alphabet.token(ce.to),
            "probability": ce.probability,
        })),
    })
}

pub fn condition_text(alphabet: &Alphabet, name: &str, report: &ConditionReport) -> String {
    match &report.counterexample {
        None => format!("{name}: holds"),
        Some(ce) => format!(
            "{name}: fails with p({} -> {}) = {}",
            alphabet.token(ce.from).unwrap_or("?"),
            alphabet.token(ce.to).unwrap_or("?"),
            ce.probability,
        ),
    }
}

/// Emits the report in the selected format: pretty JSON, or the prepared
/// text lines.
pub fn emit(format: Format, text: Vec<String>, value: Value) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable")
            );
        }
        Format::Text => {
            for line in text {
                println!("{line}");
            }
        }
    }
}
