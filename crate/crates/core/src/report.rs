//! Bit accounting for compiled programs.

use std::fmt::{self, Write as _};

use crate::codec::{compressed_len, encode_program, plain_len, CodecError, EncodedPayload};
use crate::ir::Program;
use crate::textcomp::{build_dictionary_with, segment, Dictionary, DictionaryConfig};

/// Occupancy of a program with and without string compression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompilationReport {
    /// Whole uncompressed payload.
    pub total_bits: usize,
    /// Uncompressed string literals.
    pub string_bits: usize,
    pub dictionary_bits: usize,
    /// Compressed string literals plus the dictionary.
    pub compressed_string_bits: usize,
    /// Whole payload with compressed strings.
    pub compressed_total_bits: usize,
    /// `100 · compressed_total / total`, one decimal.
    pub ratio_percent: f64,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        return 0.0;
    }
    (1000.0 * part as f64 / whole as f64).round() / 10.0
}

/// Both encodings of one program and the report comparing them.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub dictionary: Dictionary,
    pub plain: EncodedPayload,
    pub compressed: EncodedPayload,
    pub report: CompilationReport,
}

pub fn compile_both(program: &Program, config: &DictionaryConfig) -> Result<Compilation, CodecError> {
    let dictionary = build_dictionary_with(program.strings(), config);
    let plain = encode_program(program, None)?;
    let compressed = encode_program(program, Some(&dictionary))?;
    let report = CompilationReport::from_payloads(&plain, &compressed);
    Ok(Compilation {
        dictionary,
        plain,
        compressed,
        report,
    })
}

impl CompilationReport {
    pub fn from_payloads(plain: &EncodedPayload, compressed: &EncodedPayload) -> Self {
        let total_bits = plain.total_bits();
        let compressed_total_bits = compressed.total_bits();
        CompilationReport {
            total_bits,
            string_bits: plain.string_bits,
            dictionary_bits: compressed.dictionary_bits,
            compressed_string_bits: compressed.string_bits + compressed.dictionary_bits,
            compressed_total_bits,
            ratio_percent: percent(compressed_total_bits, total_bits),
        }
    }

    /// Everything that is not a string literal or the dictionary.
    pub fn non_string_bits(&self) -> usize {
        self.total_bits - self.string_bits
    }

    /// Machine-readable `key=value` lines.
    pub fn key_values(&self) -> String {
        format!(
            "total_bits={}\nstring_bits={}\ndictionary_bits={}\ncompressed_string_bits={}\ncompressed_total_bits={}\nratio_percent={:.1}\n",
            self.total_bits,
            self.string_bits,
            self.dictionary_bits,
            self.compressed_string_bits,
            self.compressed_total_bits,
            self.ratio_percent
        )
    }
}

impl fmt::Display for CompilationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("Whole QR code", self.total_bits, Some(100.0)),
            (
                "Strings",
                self.string_bits,
                Some(percent(self.string_bits, self.total_bits)),
            ),
            ("Dictionary", self.dictionary_bits, None),
            (
                "Compressed Strings (including dictionary)",
                self.compressed_string_bits,
                Some(percent(self.compressed_string_bits, self.total_bits)),
            ),
            (
                "Whole QR code (with compressed strings)",
                self.compressed_total_bits,
                Some(self.ratio_percent),
            ),
        ];
        writeln!(f, "{:<43} Occupancy", "Subject")?;
        for (name, bits, pct) in rows {
            match pct {
                Some(p) => writeln!(f, "{name:<43} {bits} bits ({p:.1}%)")?,
                None => writeln!(f, "{name:<43} {bits} bits")?,
            }
        }
        Ok(())
    }
}

/// Per-word and per-string detail of the dictionary compression.
pub fn compression_report(program: &Program, dictionary: &Dictionary) -> String {
    let mut out = String::new();
    let key_bits = dictionary.key_bits();
    let dict_bits = if dictionary.is_empty() {
        0
    } else {
        crate::codec::dictionary_len(dictionary)
    };
    let _ = writeln!(
        out,
        "Dictionary: {} words, key width {} bits, {} bits",
        dictionary.len(),
        key_bits,
        dict_bits
    );
    let _ = writeln!(out, "{:>4}  {:>5}  word", "key", "count");
    for (i, e) in dictionary.entries().iter().enumerate() {
        let _ = writeln!(out, "{i:>4}  {:>5}  {}", e.count, e.word);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>6}  {:>6}  string", "plain", "packed");
    let (mut before, mut after) = (0, 0);
    for s in program.strings() {
        let p = plain_len(s);
        let c = if dictionary.is_empty() {
            p
        } else {
            compressed_len(&segment(s, dictionary), dictionary)
        };
        before += p;
        after += c;
        let _ = writeln!(out, "{p:>6}  {c:>6}  {s:?}");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "strings={} plain_bits={} compressed_bits={} dictionary_bits={} compressed_with_dictionary_bits={} words={} key_bits={}",
        program.strings().len(),
        before,
        after,
        dict_bits,
        after + dict_bits,
        dictionary.len(),
        key_bits
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ProgramNode;

    #[test]
    fn totals_are_consistent() {
        let p = Program::new(ProgramNode::ask(
            "Wi-Fi activity?",
            [
                (
                    "Wi-Fi activity detected",
                    ProgramNode::print("activity", ProgramNode::Exit),
                ),
                ("no Wi-Fi", ProgramNode::Exit),
            ],
        ))
        .unwrap();
        let c = compile_both(&p, &DictionaryConfig::default()).unwrap();
        let r = c.report;
        assert_eq!(
            r.compressed_total_bits,
            r.total_bits - r.string_bits + r.compressed_string_bits
        );
        assert!(r.to_string().contains("Whole QR code"));
        assert!(r.key_values().contains(&format!("total_bits={}", r.total_bits)));
        let detail = compression_report(&p, &c.dictionary);
        assert!(detail.contains("words=2"));
    }

    #[test]
    fn percent_rounds_to_one_decimal() {
        assert_eq!(percent(6524, 7126), 91.6);
        assert_eq!(percent(6516, 7126), 91.4);
        assert_eq!(percent(5907, 7126), 82.9);
        assert_eq!(percent(1, 0), 0.0);
    }
}
