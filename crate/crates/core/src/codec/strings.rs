//! String framing.
//!
//! Every string opens with two coding bits (`00` ASCII-7, `01` UTF-8) and
//! closes with ETX. Plain strings carry their characters in between.
//! Compressed strings carry sub-strings, each introduced by a type bit:
//! `0` for constant characters, `1` for a dictionary key on `key_bits` bits.
//! Consecutive sub-strings are separated by NUL, so a constant always runs up
//! to the next NUL or ETX.

use super::bits::{BitReader, BitStream};
use super::expcode::{exp_decode, exp_encode, exp_len};
use super::CodecError;
use crate::textcomp::{Coding, DictEntry, Dictionary, Segment, SegmentedString};

const NUL: u64 = 0x00;
const ETX: u64 = 0x03;

pub const DICT_LOCAL: u64 = 0b101;
const DICT_LOCAL_ARG: u64 = 0b000;

fn coding_bits(coding: Coding) -> u64 {
    match coding {
        Coding::Ascii7 => 0b00,
        Coding::Utf8 => 0b01,
    }
}

fn read_coding(r: &mut BitReader<'_>) -> Result<Coding, CodecError> {
    let at = r.position();
    match r.read_bits(2)? {
        0b00 => Ok(Coding::Ascii7),
        0b01 => Ok(Coding::Utf8),
        other => Err(CodecError::BadCoding { at, bits: other as u8 }),
    }
}

fn push_chars(text: &str, coding: Coding, out: &mut BitStream) -> Result<(), CodecError> {
    match coding {
        Coding::Ascii7 => {
            for c in text.chars() {
                if !c.is_ascii() {
                    return Err(CodecError::NotAscii(c));
                }
                out.push_bits(c as u64, 7);
            }
        }
        Coding::Utf8 => {
            for b in text.bytes() {
                out.push_bits(u64::from(b), 8);
            }
        }
    }
    Ok(())
}

fn check_no_framing_chars(text: &str) -> Result<(), CodecError> {
    if text.contains(['\0', '\u{3}']) {
        return Err(CodecError::ControlCharacter);
    }
    Ok(())
}

/// Bits taken by `text` under plain framing in its natural coding.
pub fn plain_len(text: &str) -> usize {
    match Coding::for_text(text) {
        Coding::Ascii7 => 9 + 7 * text.len(),
        Coding::Utf8 => 10 + 8 * text.len(),
    }
}

/// Appends `text` with plain framing.
pub fn encode_string_plain(text: &str, coding: Coding, out: &mut BitStream) -> Result<(), CodecError> {
    check_no_framing_chars(text)?;
    out.push_bits(coding_bits(coding), 2);
    push_chars(text, coding, out)?;
    out.push_bits(ETX, coding.unit_bits() as u32);
    Ok(())
}

/// Reads raw units until NUL or ETX; returns the bytes and the terminator.
fn read_units(r: &mut BitReader<'_>, coding: Coding) -> Result<(Vec<u8>, u64), CodecError> {
    let unit = coding.unit_bits() as u32;
    let mut bytes = Vec::new();
    loop {
        let v = r.read_bits(unit)?;
        if v == NUL || v == ETX {
            return Ok((bytes, v));
        }
        bytes.push(v as u8);
    }
}

fn into_string(bytes: Vec<u8>, at: usize) -> Result<String, CodecError> {
    String::from_utf8(bytes).map_err(|_| CodecError::InvalidUtf8 { at })
}

pub fn decode_string_plain(r: &mut BitReader<'_>) -> Result<String, CodecError> {
    let at = r.position();
    let coding = read_coding(r)?;
    let (bytes, term) = read_units(r, coding)?;
    if term != ETX {
        return Err(CodecError::UnexpectedNul { at });
    }
    into_string(bytes, at)
}

/// Appends the DICT_LOCAL header command: `101`, `000`, the word count and
/// each word with plain framing in its own coding.
pub fn encode_dictionary(dict: &Dictionary, out: &mut BitStream) -> Result<(), CodecError> {
    if dict.is_empty() {
        return Err(CodecError::EmptyDictionary);
    }
    out.push_bits(DICT_LOCAL, 3);
    out.push_bits(DICT_LOCAL_ARG, 3);
    exp_encode(dict.len() as i64, out);
    for e in dict.entries() {
        encode_string_plain(&e.word, Coding::for_text(&e.word), out)?;
    }
    Ok(())
}

pub fn dictionary_len(dict: &Dictionary) -> usize {
    6 + exp_len(dict.len() as i64) + dict.entries().iter().map(|e| plain_len(&e.word)).sum::<usize>()
}

/// Reads the body of a DICT_LOCAL command whose 3-bit opcode was already consumed.
pub fn decode_dictionary_body(r: &mut BitReader<'_>) -> Result<Dictionary, CodecError> {
    let at = r.position();
    if r.read_bits(3)? != DICT_LOCAL_ARG {
        return Err(CodecError::BadHeaderCommand { at });
    }
    let count = exp_decode(r)?;
    // Each word takes at least 9 bits.
    if count < 1 || count as u64 > (r.remaining() / 9) as u64 {
        return Err(CodecError::BadCount { at, count });
    }
    let mut entries = Vec::with_capacity(count as usize);
    for _ in 0..count {
        entries.push(DictEntry {
            word: decode_string_plain(r)?,
            count: 0,
        });
    }
    Ok(Dictionary::from_entries(entries))
}

/// Appends a segmented string with compressed framing.
pub fn encode_string_compressed(
    seg: &SegmentedString,
    dict: &Dictionary,
    out: &mut BitStream,
) -> Result<(), CodecError> {
    let unit = seg.coding.unit_bits() as u32;
    out.push_bits(coding_bits(seg.coding), 2);
    for (i, s) in seg.segments.iter().enumerate() {
        if i > 0 {
            out.push_bits(NUL, unit);
        }
        match s {
            Segment::Constant(text) => {
                if text.is_empty() {
                    return Err(CodecError::EmptyConstant);
                }
                check_no_framing_chars(text)?;
                // A leading U+0006/U+0007 after the type bit reads like ETX.
                if i == 0 && matches!(text.as_bytes()[0], 0x06 | 0x07) {
                    return Err(CodecError::AmbiguousLeadingControl);
                }
                out.push_bit(false);
                push_chars(text, seg.coding, out)?;
            }
            Segment::DictRef(key) => {
                if *key >= dict.len() {
                    return Err(CodecError::KeyOutOfRange {
                        key: *key,
                        n_words: dict.len(),
                    });
                }
                out.push_bit(true);
                out.push_bits(*key as u64, dict.key_bits());
            }
        }
    }
    out.push_bits(ETX, unit);
    Ok(())
}

/// Bits taken by `seg` under compressed framing.
pub fn compressed_len(seg: &SegmentedString, dict: &Dictionary) -> usize {
    let unit = seg.coding.unit_bits();
    let separators = seg.segments.len().saturating_sub(1);
    let body: usize = seg
        .segments
        .iter()
        .map(|s| match s {
            Segment::Constant(t) => {
                1 + unit
                    * match seg.coding {
                        Coding::Ascii7 => t.chars().count(),
                        Coding::Utf8 => t.len(),
                    }
            }
            Segment::DictRef(_) => 1 + dict.key_bits() as usize,
        })
        .sum();
    2 + body + unit * separators + unit
}

pub fn decode_string_compressed(r: &mut BitReader<'_>, dict: &Dictionary) -> Result<String, CodecError> {
    let at = r.position();
    let coding = read_coding(r)?;
    let unit = coding.unit_bits() as u32;
    if r.peek_bits(unit) == Some(ETX) {
        r.read_bits(unit)?;
        return Ok(String::new());
    }
    let mut bytes = Vec::new();
    loop {
        let term = if r.read_bit()? {
            let key_at = r.position();
            let key = r.read_bits(dict.key_bits())? as usize;
            let word = dict.word(key).ok_or(CodecError::KeyOutOfRange {
                key,
                n_words: dict.len(),
            })?;
            bytes.extend_from_slice(word.as_bytes());
            let term = r.read_bits(unit)?;
            if term != NUL && term != ETX {
                return Err(CodecError::MissingSeparator { at: key_at });
            }
            term
        } else {
            let const_at = r.position();
            let (chars, term) = read_units(r, coding)?;
            if chars.is_empty() {
                return Err(CodecError::EmptyConstant);
            }
            if coding == Coding::Ascii7 && chars.iter().any(|b| *b >= 0x80) {
                return Err(CodecError::InvalidUtf8 { at: const_at });
            }
            bytes.extend_from_slice(&chars);
            term
        };
        if term == ETX {
            break;
        }
    }
    into_string(bytes, at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textcomp::{build_dictionary, segment};

    const SENTENCES: [&str; 3] = [
        "Wi-Fi activity detected",
        "Wi-Fi activity not detected",
        "Wi-Fi 802.11ax activity at 9600 Mbps",
    ];

    fn plain_bits(s: &str) -> usize {
        let mut b = BitStream::new();
        encode_string_plain(s, Coding::for_text(s), &mut b).unwrap();
        b.len()
    }

    #[test]
    fn plain_sizes() {
        assert_eq!(plain_bits("Wi-Fi activity detected"), 170);
        assert_eq!(plain_bits(""), 9);
        assert_eq!(SENTENCES.iter().map(|s| plain_bits(s)).sum::<usize>(), 629);
        assert_eq!(plain_bits("é"), 2 + 16 + 8);
        for s in SENTENCES {
            assert_eq!(plain_len(s), plain_bits(s));
        }
    }

    #[test]
    fn plain_rejects_non_ascii_under_ascii7() {
        let mut b = BitStream::new();
        assert_eq!(
            encode_string_plain("café", Coding::Ascii7, &mut b),
            Err(CodecError::NotAscii('é'))
        );
    }

    #[test]
    fn plain_round_trip() {
        for s in ["", "hello", "naïve 😀", "Wi-Fi radio on / No client"] {
            let mut b = BitStream::new();
            encode_string_plain(s, Coding::for_text(s), &mut b).unwrap();
            assert_eq!(decode_string_plain(&mut b.reader()).unwrap(), s);
        }
    }

    #[test]
    fn dictionary_sizes() {
        let d = build_dictionary(&SENTENCES);
        let mut b = BitStream::new();
        encode_dictionary(&d, &mut b).unwrap();
        assert_eq!(b.len(), 184);
        assert_eq!(dictionary_len(&d), 184);

        let d = build_dictionary(&["abc", "abc"]);
        let mut b = BitStream::new();
        encode_dictionary(&d, &mut b).unwrap();
        assert_eq!(b.len(), 40);

        let mut r = b.reader();
        assert_eq!(r.read_bits(3).unwrap(), DICT_LOCAL);
        let back = decode_dictionary_body(&mut r).unwrap();
        assert_eq!(back.word(0), Some("abc"));
        assert_eq!(r.remaining(), 0);

        assert_eq!(
            encode_dictionary(&Dictionary::default(), &mut BitStream::new()),
            Err(CodecError::EmptyDictionary)
        );
    }

    #[test]
    fn compressed_sizes() {
        let d = build_dictionary(&SENTENCES);
        let mut total = dictionary_len(&d);
        let sizes: Vec<usize> = SENTENCES
            .iter()
            .map(|s| {
                let seg = segment(s, &d);
                let mut b = BitStream::new();
                encode_string_compressed(&seg, &d, &mut b).unwrap();
                assert_eq!(b.len(), compressed_len(&seg, &d));
                assert_eq!(decode_string_compressed(&mut b.reader(), &d).unwrap(), *s);
                b.len()
            })
            .collect();
        assert_eq!(sizes, vec![62, 90, 199]);
        total += sizes.iter().sum::<usize>();
        assert_eq!(total, 535);

        let hi = SegmentedString {
            coding: Coding::Ascii7,
            segments: vec![Segment::Constant("hi".into())],
        };
        assert_eq!(compressed_len(&hi, &d), 24);
    }

    #[test]
    fn empty_compressed_string() {
        let d = build_dictionary(&SENTENCES);
        let seg = segment("", &d);
        let mut b = BitStream::new();
        encode_string_compressed(&seg, &d, &mut b).unwrap();
        assert_eq!(b.to_bitstring(), "000000011");
        assert_eq!(decode_string_compressed(&mut b.reader(), &d).unwrap(), "");
    }

    #[test]
    fn compressed_error_paths() {
        let d = build_dictionary(&SENTENCES);
        let bad = SegmentedString {
            coding: Coding::Ascii7,
            segments: vec![Segment::DictRef(3)],
        };
        assert_eq!(
            encode_string_compressed(&bad, &d, &mut BitStream::new()),
            Err(CodecError::KeyOutOfRange { key: 3, n_words: 3 })
        );
        let bell = segment("\u{7}ring", &d);
        assert_eq!(
            encode_string_compressed(&bell, &d, &mut BitStream::new()),
            Err(CodecError::AmbiguousLeadingControl)
        );

        // Key 3 with a 2-bit key width, then ETX.
        let b = BitStream::from_bitstring("00 1 11 0000011").unwrap();
        assert!(matches!(
            decode_string_compressed(&mut b.reader(), &d),
            Err(CodecError::KeyOutOfRange { key: 3, .. })
        ));
        // Reference followed by a character instead of NUL/ETX.
        let b = BitStream::from_bitstring("00 1 00 1000001 0000011").unwrap();
        assert!(matches!(
            decode_string_compressed(&mut b.reader(), &d),
            Err(CodecError::MissingSeparator { .. })
        ));
        // No ETX before the data runs out.
        let b = BitStream::from_bitstring("00 0 1000001 1000010").unwrap();
        assert!(matches!(
            decode_string_compressed(&mut b.reader(), &d),
            Err(CodecError::Truncated { .. })
        ));
        // Truncated character.
        let b = BitStream::from_bitstring("00 0 10000").unwrap();
        assert!(matches!(
            decode_string_compressed(&mut b.reader(), &d),
            Err(CodecError::Truncated { .. })
        ));
    }

    #[test]
    fn utf8_string_may_reference_ascii_words() {
        let d = build_dictionary(&SENTENCES);
        let text = "Wi-Fi café activity";
        let seg = segment(text, &d);
        assert_eq!(seg.coding, Coding::Utf8);
        let mut b = BitStream::new();
        encode_string_compressed(&seg, &d, &mut b).unwrap();
        assert_eq!(decode_string_compressed(&mut b.reader(), &d).unwrap(), text);
    }
}
