//! Image file IO: 8-bit PNG (gray or RGB) and binary PGM/PPM with maxval 255.

use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat};
use qomega_core::LumaImage;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: unsupported {property}")]
    Format { path: PathBuf, property: String },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: qomega_core::Error,
    },
}

impl IoError {
    fn format(path: &Path, property: impl Into<String>) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            property: property.into(),
        }
    }
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a PNG, PGM or PPM file into a luma image in `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<LumaImage, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(path, &bytes)
}

fn decode(path: &Path, bytes: &[u8]) -> Result<LumaImage, IoError> {
    let img = if bytes.starts_with(PNG_MAGIC) {
        decode_png(path, bytes)?
    } else if bytes.starts_with(b"P") && bytes.len() >= 2 {
        decode_pnm(path, bytes)?
    } else {
        return Err(IoError::format(path, "container (expected PNG, PGM or PPM)"));
    };
    img.map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<qomega_core::Result<LumaImage>, IoError> {
    let dynimg = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| IoError::format(path, format!("PNG stream ({e})")))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    Ok(match dynimg {
        DynamicImage::ImageLuma8(buf) => LumaImage::from_gray8(w, h, buf.as_raw()),
        DynamicImage::ImageRgb8(buf) => LumaImage::from_rgb8(w, h, buf.as_raw()),
        other => {
            let ct = other.color();
            let property = if ct.bits_per_pixel() / u16::from(ct.channel_count()) != 8 {
                format!(
                    "bit depth {} (only 8-bit is supported)",
                    ct.bits_per_pixel() / u16::from(ct.channel_count())
                )
            } else {
                format!("color type {ct:?} (only grayscale or RGB is supported)")
            };
            return Err(IoError::format(path, property));
        }
    })
}

struct PnmHeader {
    channels: usize,
    width: usize,
    height: usize,
    data_offset: usize,
}

fn parse_pnm_header(path: &Path, bytes: &[u8]) -> Result<PnmHeader, IoError> {
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        b"P2" | b"P3" => return Err(IoError::format(path, "ASCII netpbm variant (only binary P5/P6)")),
        m => {
            return Err(IoError::format(
                path,
                format!("netpbm type {} (only P5/P6)", String::from_utf8_lossy(m)),
            ))
        }
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| IoError::format(path, "netpbm header (malformed number)"))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(IoError::format(path, "netpbm header (missing separator)"));
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(IoError::format(
            path,
            format!("maxval {maxval} (only 255 is supported)"),
        ));
    }
    Ok(PnmHeader {
        channels,
        width,
        height,
        data_offset: pos + 1,
    })
}

fn decode_pnm(path: &Path, bytes: &[u8]) -> Result<qomega_core::Result<LumaImage>, IoError> {
    let h = parse_pnm_header(path, bytes)?;
    let len = h.width * h.height * h.channels;
    let raster = bytes
        .get(h.data_offset..h.data_offset + len)
        .ok_or_else(|| IoError::format(path, "netpbm raster (truncated)"))?;
    Ok(if h.channels == 1 {
        LumaImage::from_gray8(h.width, h.height, raster)
    } else {
        LumaImage::from_rgb8(h.width, h.height, raster)
    })
}

/// Writes an 8-bit grayscale PNG or PGM, chosen by the file extension.
pub fn save_image(img: &LumaImage, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let codes = img.to_gray8();
    let (w, h) = img.dims();
    let io_err = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    match ext.as_str() {
        "png" => {
            let buf = image::GrayImage::from_raw(w as u32, h as u32, codes).expect("buffer matches dimensions");
            buf.save_with_format(path, ImageFormat::Png).map_err(|e| match e {
                image::ImageError::IoError(source) => io_err(source),
                other => IoError::format(path, format!("PNG encoding ({other})")),
            })
        }
        "pgm" => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend_from_slice(&codes);
            fs::write(path, out).map_err(io_err)
        }
        _ => Err(IoError::format(
            path,
            format!("output extension `{ext}` (use .png or .pgm)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pnm_header_with_comments() {
        let bytes = b"P5\n# a comment\n3 2\n# another\n255\n\x00\x80\xff\x10\x20\x30";
        let img = decode(Path::new("x.pgm"), bytes).unwrap();
        assert_eq!(img.dims(), (3, 2));
        assert_eq!(img.get(2, 0), 1.0);
        assert_eq!(img.get(1, 0), 128.0 / 255.0);
    }

    #[test]
    fn ppm_luma() {
        let bytes = b"P6 1 1 255\n\xff\x00\x00";
        let img = decode(Path::new("x.ppm"), bytes).unwrap();
        assert!((img.get(0, 0) - 0.299).abs() < 1e-12);
    }

    #[test]
    fn pnm_errors_name_the_property() {
        let err = decode(Path::new("x.pgm"), b"P5 1 1 65535\n\x00\x00").unwrap_err();
        assert!(err.to_string().contains("maxval 65535"), "{err}");
        let err = decode(Path::new("x.pgm"), b"P2 1 1 255\n0").unwrap_err();
        assert!(err.to_string().contains("ASCII"), "{err}");
        let err = decode(Path::new("x.pgm"), b"P5 4 4 255\n\x00").unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
        let err = decode(Path::new("x.bmp"), b"BM......").unwrap_err();
        assert!(err.to_string().contains("container"), "{err}");
    }
}
