//! Bit-exact binary format: bitstream, exponential integers, string framing,
//! dictionary header and tree serialization.

mod bits;
mod expcode;
mod program;
mod strings;

pub use bits::{BitReader, BitStream};
pub use expcode::{exp_code, exp_decode, exp_encode, exp_len};
pub use program::{decode_bytes, decode_header, decode_program, encode_program, EncodedPayload, Header, VERSION};
pub use strings::{
    compressed_len, decode_dictionary_body, decode_string_compressed, decode_string_plain, dictionary_len,
    encode_dictionary, encode_string_compressed, encode_string_plain, plain_len, DICT_LOCAL,
};

use thiserror::Error;

use crate::ir::IrError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("payload truncated at bit {at}")]
    Truncated { at: usize },
    #[error("unsupported payload version {0}")]
    UnknownVersion(u8),
    #[error("malformed header command at bit {at}")]
    BadHeaderCommand { at: usize },
    #[error("invalid entry count {count} at bit {at}")]
    BadCount { at: usize, count: i64 },
    #[error("integer at bit {at} does not fit in 64 bits")]
    IntegerOverflow { at: usize },
    #[error("negative zero at bit {at}")]
    NegativeZero { at: usize },
    #[error("unknown string coding {bits:02b} at bit {at}")]
    BadCoding { at: usize, bits: u8 },
    #[error("character {0:?} cannot be coded as ASCII-7")]
    NotAscii(char),
    #[error("string at bit {at} is not valid text in its coding")]
    InvalidUtf8 { at: usize },
    #[error("NUL inside a plain string at bit {at}")]
    UnexpectedNul { at: usize },
    #[error("string contains a NUL or ETX control character")]
    ControlCharacter,
    #[error("dictionary key {key} out of range for {n_words} words")]
    KeyOutOfRange { key: usize, n_words: usize },
    #[error("dictionary reference at bit {at} is not followed by NUL or ETX")]
    MissingSeparator { at: usize },
    #[error("empty constant sub-string")]
    EmptyConstant,
    #[error("a compressed string cannot start with U+0006 or U+0007")]
    AmbiguousLeadingControl,
    #[error("the dictionary header needs at least one word")]
    EmptyDictionary,
    #[error("program nesting is too deep")]
    TooDeep,
    #[error("decoded program is invalid: {0}")]
    Invalid(IrError),
}
