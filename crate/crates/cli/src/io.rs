use std::fs;
use std::path::{Path, PathBuf};

use tracegrow_core::trace::decode_mask_png;
use tracegrow_core::{
    raster_from_strokes, LabelMask, LabelPlane, Palette, RgbImage, StrokeDocument, TraceRaster, UNLABELED,
};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::input(path, e))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::input(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::input(path, e))
}

pub fn rgb_image(path: &Path) -> Result<RgbImage, CliError> {
    if !path.is_file() {
        return Err(CliError::input(path, "no such file"));
    }
    tracegrow_service::load_rgb_image(path).map_err(|e| CliError::input(path, e))
}

pub fn mask(path: &Path) -> Result<LabelMask, CliError> {
    decode_mask_png(&read(path)?).map_err(|e| CliError::input(path, e))
}

pub fn strokes(path: &Path) -> Result<StrokeDocument, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    StrokeDocument::from_json(&text).map_err(|e| CliError::input(path, e))
}

/// A trace from either a stroke document (`.json`) or an indexed PNG.
pub fn trace(path: &Path, width: u32, height: u32) -> Result<TraceRaster, CliError> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let doc = strokes(path)?;
        return raster_from_strokes(width, height, &doc.strokes).map_err(|e| CliError::input(path, e));
    }
    let m = mask(path)?;
    if (m.width(), m.height()) != (width, height) {
        return Err(CliError::input(
            path,
            format!("trace is {}x{} but the image is {width}x{height}", m.width(), m.height()),
        ));
    }
    TraceRaster::from_raw(width, height, m.into_labels()).map_err(|e| CliError::Internal(e.to_string()))
}

/// VOC colors for every category value present.
pub fn palette_for(labels: &[u8]) -> Palette {
    let top = labels.iter().copied().filter(|&l| l != UNLABELED).max().map_or(0, |m| m as usize + 1);
    Palette::voc(top.max(21)).expect("at most 255 categories")
}

/// Sorted `*.png` files directly inside `dir`.
pub fn png_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::input(dir, "not a directory"));
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::input(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
        .collect();
    out.sort();
    Ok(out)
}

pub fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn encode_gray16(width: u32, height: u32, values: Vec<u16>) -> Result<Vec<u8>, CliError> {
    let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(width, height, values)
        .ok_or_else(|| CliError::Internal("buffer size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn encode_gray8(width: u32, height: u32, values: Vec<u8>) -> Result<Vec<u8>, CliError> {
    let buf = image::GrayImage::from_raw(width, height, values)
        .ok_or_else(|| CliError::Internal("buffer size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(out.into_inner())
}
