use std::io::Cursor;

use png::{BitDepth, ColorType, Transformations};

use super::{Palette, TraceError};
use crate::grid::{LabelMask, LabelPlane};

/// Writes an 8-bit indexed PNG whose pixel indices are the label values.
pub fn encode_mask_png(mask: &impl LabelPlane, palette: &Palette) -> Result<Vec<u8>, TraceError> {
    if let Some(&v) = mask.labels().iter().find(|&&v| !palette.contains(v)) {
        return Err(TraceError::UnknownCategoryValue(v));
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, mask.width(), mask.height());
        enc.set_color(ColorType::Indexed);
        enc.set_depth(BitDepth::Eight);
        enc.set_palette(palette.plte());
        let mut writer = enc.write_header().map_err(|e| TraceError::MalformedPng(e.to_string()))?;
        writer.write_image_data(mask.labels()).map_err(|e| TraceError::MalformedPng(e.to_string()))?;
        writer.finish().map_err(|e| TraceError::MalformedPng(e.to_string()))?;
    }
    Ok(out)
}

/// Reads the raw indices of an indexed (or 8-bit grayscale) PNG.
pub fn decode_mask_png(bytes: &[u8]) -> Result<LabelMask, TraceError> {
    let malformed = |e: png::DecodingError| TraceError::MalformedPng(e.to_string());
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(Transformations::IDENTITY);
    let mut reader = dec.read_info().map_err(malformed)?;
    let (width, height, color, depth) = {
        let info = reader.info();
        (info.width, info.height, info.color_type, info.bit_depth)
    };
    match (color, depth) {
        (ColorType::Indexed, _) | (ColorType::Grayscale, BitDepth::Eight) => {}
        _ => {
            return Err(TraceError::MalformedPng(format!(
                "expected an indexed or 8-bit grayscale image, found {color:?} at {depth:?}"
            )))
        }
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| TraceError::MalformedPng("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(malformed)?;
    let bits = depth as usize;
    let stride = frame.line_size;
    let mut labels = Vec::with_capacity(width as usize * height as usize);
    for row in buf[..stride * height as usize].chunks_exact(stride) {
        if bits == 8 {
            labels.extend_from_slice(&row[..width as usize]);
        } else {
            let per_byte = 8 / bits;
            let mask = (1u8 << bits) - 1;
            for x in 0..width as usize {
                let byte = row[x / per_byte];
                let shift = 8 - bits * (x % per_byte + 1);
                labels.push((byte >> shift) & mask);
            }
        }
    }
    LabelMask::from_raw(width, height, labels).map_err(|e| TraceError::MalformedPng(e.to_string()))
}

/// Like [`decode_mask_png`], also requiring every value to be a palette
/// category or void.
pub fn decode_mask_png_checked(bytes: &[u8], palette: &Palette) -> Result<LabelMask, TraceError> {
    let mask = decode_mask_png(bytes)?;
    if let Some(&v) = mask.labels().iter().find(|&&v| !palette.contains(v)) {
        return Err(TraceError::UnknownCategoryValue(v));
    }
    Ok(mask)
}
