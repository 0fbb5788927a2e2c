//! Payload packing and QR symbol images.
//!
//! Symbology is delegated to `qrcode` (generation) and `rxing` (detection and
//! decoding); payloads always travel as a single byte-mode segment.

use std::fmt;
use std::panic;
use std::path::Path;
use std::str::FromStr;

use image::{GrayImage, Luma};
use qrcode::bits::Bits;
use qrcode::{Color, EcLevel, QrCode, Version};
use rxing::common::HybridBinarizer;
use rxing::qrcode::cpp_port::QrReader;
use rxing::{BinaryBitmap, DecodeHintValue, DecodeHints, Exceptions, Luma8LuminanceSource, Reader};
use thiserror::Error;

use crate::codec::{BitStream, EncodedPayload};

/// Byte capacity of the largest symbol (version 40, low error correction).
pub const MAX_QR_BYTES: usize = 2953;

/// Pixels per module in rendered images.
const MODULE_PX: u32 = 4;
/// Quiet zone width in modules.
const QUIET_ZONE: u32 = 4;

#[derive(Debug, Error)]
pub enum PackagingError {
    #[error("payload of {bits} bits needs {} bytes, over the {budget}-byte budget", bits.div_ceil(8))]
    CapacityExceeded { bits: usize, budget: usize },
    #[error("empty payload")]
    Empty,
    #[error("QR encoding failed: {0}")]
    Encode(String),
    #[error("no QR symbol found in image")]
    NoSymbol,
    #[error("unreadable QR symbol: {0}")]
    Unreadable(String),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ErrorCorrection {
    #[default]
    Low,
    Medium,
    Quartile,
    High,
}

impl ErrorCorrection {
    fn level(self) -> EcLevel {
        match self {
            ErrorCorrection::Low => EcLevel::L,
            ErrorCorrection::Medium => EcLevel::M,
            ErrorCorrection::Quartile => EcLevel::Q,
            ErrorCorrection::High => EcLevel::H,
        }
    }
}

impl FromStr for ErrorCorrection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l" | "low" => Ok(ErrorCorrection::Low),
            "m" | "medium" => Ok(ErrorCorrection::Medium),
            "q" | "quartile" => Ok(ErrorCorrection::Quartile),
            "h" | "high" => Ok(ErrorCorrection::High),
            _ => Err(format!(
                "unknown error-correction level `{s}` (low, medium, quartile, high)"
            )),
        }
    }
}

impl fmt::Display for ErrorCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCorrection::Low => "low",
            ErrorCorrection::Medium => "medium",
            ErrorCorrection::Quartile => "quartile",
            ErrorCorrection::High => "high",
        })
    }
}

/// Byte budget of one QR symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QrBudget {
    pub max_bytes: usize,
}

impl QrBudget {
    /// Version-40 byte-mode capacity at the given level.
    pub fn for_level(ec: ErrorCorrection) -> Self {
        let max_bytes = match ec {
            ErrorCorrection::Low => MAX_QR_BYTES,
            ErrorCorrection::Medium => 2331,
            ErrorCorrection::Quartile => 1663,
            ErrorCorrection::High => 1273,
        };
        QrBudget { max_bytes }
    }

    pub fn check_bits(&self, bits: usize) -> Result<(), PackagingError> {
        if bits.div_ceil(8) > self.max_bytes {
            return Err(PackagingError::CapacityExceeded {
                bits,
                budget: self.max_bytes,
            });
        }
        Ok(())
    }
}

impl Default for QrBudget {
    fn default() -> Self {
        QrBudget {
            max_bytes: MAX_QR_BYTES,
        }
    }
}

/// Packs payload bits MSB-first into bytes, enforcing the default budget.
pub fn pack(payload: &EncodedPayload) -> Result<Vec<u8>, PackagingError> {
    pack_bits(&payload.bits, QrBudget::default())
}

pub fn pack_bits(bits: &BitStream, budget: QrBudget) -> Result<Vec<u8>, PackagingError> {
    budget.check_bits(bits.len())?;
    Ok(bits.as_bytes().to_vec())
}

/// Inverse of [`pack_bits`] given the original bit length.
pub fn unpack(bytes: &[u8], bit_len: usize) -> BitStream {
    let mut bits = BitStream::from_bytes(bytes.to_vec());
    bits.truncate(bit_len);
    bits
}

fn fits(len: usize, version: i16, ec: ErrorCorrection) -> bool {
    let mut bits = Bits::new(Version::Normal(version));
    bits.push_byte_data(&vec![0; len]).is_ok() && bits.push_terminator(ec.level()).is_ok()
}

/// Largest byte-mode payload of a symbol of `version` (1 to 40) at `ec`.
pub fn byte_capacity(version: i16, ec: ErrorCorrection) -> usize {
    assert!((1..=40).contains(&version), "QR version {version} out of range");
    // fits() is monotone in len, so search for the last length that fits.
    let (mut lo, mut hi) = (0, MAX_QR_BYTES + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fits(mid, version, ec) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Builds the smallest symbol holding `bytes` as one byte-mode segment.
pub fn encode_qr(bytes: &[u8], ec: ErrorCorrection) -> Result<QrCode, PackagingError> {
    if bytes.is_empty() {
        return Err(PackagingError::Empty);
    }
    QrBudget::for_level(ec).check_bits(bytes.len() * 8)?;
    for v in 1..=40 {
        let mut bits = Bits::new(Version::Normal(v));
        if bits.push_byte_data(bytes).is_err() || bits.push_terminator(ec.level()).is_err() {
            continue;
        }
        return QrCode::with_bits(bits, ec.level()).map_err(|e| PackagingError::Encode(e.to_string()));
    }
    Err(PackagingError::CapacityExceeded {
        bits: bytes.len() * 8,
        budget: QrBudget::for_level(ec).max_bytes,
    })
}

/// Renders `bytes` as a black-on-white QR image with a quiet zone.
pub fn render_qr(bytes: &[u8], ec: ErrorCorrection) -> Result<GrayImage, PackagingError> {
    render_qr_scaled(bytes, ec, MODULE_PX)
}

/// [`render_qr`] with `module_px` pixels per module side.
pub fn render_qr_scaled(bytes: &[u8], ec: ErrorCorrection, module_px: u32) -> Result<GrayImage, PackagingError> {
    let code = encode_qr(bytes, ec)?;
    let width = code.width() as u32;
    let colors = code.to_colors();
    let side = (width + 2 * QUIET_ZONE) * module_px;
    Ok(GrayImage::from_fn(side, side, |x, y| {
        let (mx, my) = (x / module_px, y / module_px);
        let inside = (QUIET_ZONE..QUIET_ZONE + width).contains(&mx) && (QUIET_ZONE..QUIET_ZONE + width).contains(&my);
        let dark = inside && colors[((my - QUIET_ZONE) * width + (mx - QUIET_ZONE)) as usize] == Color::Dark;
        Luma([if dark { 0 } else { 255 }])
    }))
}

/// Writes a PNG QR image of `bytes` to `path`.
pub fn emit_qr(bytes: &[u8], path: &Path, ec: ErrorCorrection) -> Result<(), PackagingError> {
    render_qr(bytes, ec)?.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Decodes the bytes of the single QR symbol in `img`. Detector panics on
/// degenerate images are reported as [`PackagingError::Unreadable`].
pub fn read_qr_image(img: GrayImage) -> Result<Vec<u8>, PackagingError> {
    let (width, height) = img.dimensions();
    let decoded = panic::catch_unwind(move || {
        let source = Luma8LuminanceSource::new(img.into_raw(), width, height);
        let mut bitmap = BinaryBitmap::new(HybridBinarizer::new(source));
        let hints = DecodeHints::default().with(DecodeHintValue::TryHarder(true));
        // This reader reports the concatenated segment bytes as raw bytes.
        QrReader
            .decode_with_hints(&mut bitmap, &hints)
            .map(|r| r.getRawBytes().to_vec())
    });
    match decoded {
        Ok(Ok(bytes)) => Ok(bytes),
        Ok(Err(Exceptions::NotFoundException(_))) => Err(PackagingError::NoSymbol),
        Ok(Err(e)) => Err(PackagingError::Unreadable(e.to_string())),
        Err(_) => Err(PackagingError::Unreadable("detector failed".into())),
    }
}

pub fn read_qr(path: &Path) -> Result<Vec<u8>, PackagingError> {
    read_qr_image(image::open(path)?.to_luma8())
}
