//! Exponential coding of signed integers.
//!
//! A code is a run of 4-bit groups. The first bit of each group is a
//! continuation flag (1 = another group follows) and the remaining three bits
//! carry payload. Concatenated, the payload is a sign bit (1 = negative)
//! followed by the magnitude, big-endian, left-padded to fill `3k - 1` bits
//! for the smallest group count `k` that fits. Small values take one group
//! (`3` is `0011`) and there is no upper bound.

use super::bits::{BitReader, BitStream};
use super::CodecError;

/// Largest group count that can hold a 64-bit magnitude.
const MAX_GROUPS: u32 = 22;

fn group_count(magnitude: u64) -> u32 {
    let width = 64 - magnitude.leading_zeros();
    // smallest k with 3k - 1 >= width
    (width + 3) / 3
}

/// Appends the exponential code of `value`.
pub fn exp_encode(value: i64, out: &mut BitStream) {
    let magnitude = value.unsigned_abs();
    let groups = group_count(magnitude);
    let sign = u128::from(value < 0) << (3 * groups - 1);
    let payload = sign | u128::from(magnitude);
    for g in (0..groups).rev() {
        out.push_bit(g > 0);
        out.push_bits(((payload >> (3 * g)) & 0b111) as u64, 3);
    }
}

pub fn exp_code(value: i64) -> BitStream {
    let mut b = BitStream::new();
    exp_encode(value, &mut b);
    b
}

/// Length in bits of the code for `value`.
pub fn exp_len(value: i64) -> usize {
    4 * group_count(value.unsigned_abs()) as usize
}

/// Reads one exponential code.
pub fn exp_decode(r: &mut BitReader<'_>) -> Result<i64, CodecError> {
    let start = r.position();
    let mut payload: u128 = 0;
    let mut groups = 0;
    loop {
        let more = r.read_bit()?;
        payload = (payload << 3) | u128::from(r.read_bits(3)?);
        groups += 1;
        if !more {
            break;
        }
        if groups == MAX_GROUPS {
            return Err(CodecError::IntegerOverflow { at: start });
        }
    }
    let sign_shift = 3 * groups - 1;
    let negative = (payload >> sign_shift) & 1 == 1;
    let magnitude = payload & ((1u128 << sign_shift) - 1);
    match (negative, magnitude) {
        (true, 0) => Err(CodecError::NegativeZero { at: start }),
        (false, m) => i64::try_from(m).map_err(|_| CodecError::IntegerOverflow { at: start }),
        (true, m) if m == 1u128 << 63 => Ok(i64::MIN),
        (true, m) => i64::try_from(m)
            .map(|m| -m)
            .map_err(|_| CodecError::IntegerOverflow { at: start }),
    }
}
