//! Raster output of intensity maps: 16-bit grayscale PGM (P5, big-endian)
//! always; PNG as an alternative container for the same samples.

use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::config::ImageFormat;

/// What was written, and how the image was normalized.
#[derive(Debug, Clone)]
pub struct ImageReport {
    pub path: PathBuf,
    /// Peak intensity the image was normalized to.
    pub peak: f64,
    /// True when the field was identically zero and no normalization was
    /// possible (an all-zero image is emitted).
    pub degenerate_normalization: bool,
}

fn quantize(intensity: &Array2<f64>) -> (Vec<u16>, f64, bool) {
    let peak = intensity.iter().copied().fold(0.0, f64::max);
    let degenerate = peak.is_nan() || peak <= 0.0;
    let scale = if degenerate { 0.0 } else { 65535.0 / peak };
    let samples = intensity
        .iter()
        .map(|&v| (v * scale).round().clamp(0.0, 65535.0) as u16)
        .collect();
    (samples, peak, degenerate)
}

/// Write a normalized intensity map. Rows are emitted top to bottom in
/// row-major order; samples are peak-normalized to the 16-bit range.
pub fn emit_image(
    intensity: &Array2<f64>,
    path: &Path,
    format: ImageFormat,
) -> std::io::Result<ImageReport> {
    let (samples, peak, degenerate_normalization) = quantize(intensity);
    let (height, width) = (intensity.nrows(), intensity.ncols());
    match format {
        ImageFormat::Pgm => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write!(file, "P5\n{width} {height}\n65535\n")?;
            for value in &samples {
                file.write_all(&value.to_be_bytes())?;
            }
            file.flush()?;
        }
        ImageFormat::Png => {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            let mut encoder = png::Encoder::new(file, width as u32, height as u32);
            encoder.set_color(png::ColorType::Grayscale);
            encoder.set_depth(png::BitDepth::Sixteen);
            let mut writer = encoder.write_header()?;
            let mut bytes = Vec::with_capacity(samples.len() * 2);
            for value in &samples {
                bytes.extend_from_slice(&value.to_be_bytes());
            }
            writer.write_image_data(&bytes)?;
            writer.finish()?;
        }
    }
    Ok(ImageReport {
        path: path.to_path_buf(),
        peak,
        degenerate_normalization,
    })
}
