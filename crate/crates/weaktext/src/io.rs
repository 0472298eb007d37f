//! File formats: binary PGM images, optional PNG input, box sidecar files,
//! and atomic writes (temp file then rename) so that interrupted runs never
//! leave half-written outputs behind.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imgproc::{BinaryMap, GrayImage, WordBox};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `path` through a sibling temp file and a rename, so
/// the destination is always either absent, the old content, or the
/// complete new content.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp: PathBuf = {
        let mut name = path
            .file_name()
            .ok_or_else(|| {
                io_err(
                    path,
                    std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"),
                )
            })?
            .to_os_string();
        name.push(".tmp");
        path.with_file_name(name)
    };
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads a binary (P5) PGM with maxval 255.
pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let data = fs::read(path).map_err(|e| io_err(path, e))?;
    parse_pgm(&data).map_err(|reason| Error::ImageFormat {
        path: path.to_path_buf(),
        reason,
    })
}

fn parse_pgm(data: &[u8]) -> std::result::Result<GrayImage, String> {
    let mut pos = 0usize;

    // One header token, skipping whitespace and '#' comment lines.
    let mut token = |data: &[u8]| -> std::result::Result<String, String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };

    let magic = token(data)?;
    if magic != "P5" {
        return Err(format!("expected P5 magic, found {magic:?}"));
    }
    let width: u32 = token(data)?
        .parse()
        .map_err(|_| "width is not a valid integer".to_string())?;
    let height: u32 = token(data)?
        .parse()
        .map_err(|_| "height is not a valid integer".to_string())?;
    let maxval: u32 = token(data)?
        .parse()
        .map_err(|_| "maxval is not a valid integer".to_string())?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}, only 255 is handled"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err("missing separator before raster".into());
    }
    pos += 1;

    let need = width as usize * height as usize;
    let raster = &data[pos..];
    if raster.len() < need {
        return Err(format!(
            "raster holds {} bytes, {width}x{height} needs {need}",
            raster.len()
        ));
    }
    GrayImage::new(width, height, raster[..need].to_vec()).map_err(|e| e.to_string())
}

/// Writes a binary (P5) PGM with maxval 255, atomically.
pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    atomic_write(path, &out)
}

/// Writes a binary map as a PGM mask: set pixels become 255, clear pixels 0.
pub fn write_map_pgm(path: &Path, map: &BinaryMap) -> Result<()> {
    let pixels: Vec<u8> = map.bits().iter().map(|&b| b * 255).collect();
    let img = GrayImage::new(map.width(), map.height(), pixels).expect("map dims are valid");
    write_pgm(path, &img)
}

/// Loads a grayscale image, dispatching on the file extension: `.pgm` is
/// read natively, `.png` is decoded and reduced to 8-bit luma with
/// `Y = round(0.299 R + 0.587 G + 0.114 B)`.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => read_pgm(path),
        Some("png") => read_png(path),
        other => Err(Error::ImageFormat {
            path: path.to_path_buf(),
            reason: format!(
                "unsupported image extension {:?}, expected pgm or png",
                other.unwrap_or("<none>")
            ),
        }),
    }
}

fn read_png(path: &Path) -> Result<GrayImage> {
    let dynamic = image::open(path).map_err(|e| Error::ImageFormat {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let fail = |reason: String| Error::ImageFormat {
        path: path.to_path_buf(),
        reason,
    };
    let (w, h) = (dynamic.width(), dynamic.height());
    let luma = |r: u8, g: u8, b: u8| -> u8 {
        (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round() as u8
    };
    let pixels: Vec<u8> = match dynamic {
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        image::DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        image::DynamicImage::ImageRgb8(buf) => {
            buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect()
        }
        image::DynamicImage::ImageRgba8(buf) => {
            buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect()
        }
        other => {
            return Err(fail(format!(
                "unsupported PNG pixel format {:?}, expected 8-bit gray or RGB",
                other.color()
            )))
        }
    };
    GrayImage::new(w, h, pixels).map_err(|e| fail(e.to_string()))
}

/// Reads a box sidecar: one `x y w h` quadruple of non-negative integers
/// per line, `#` starting a comment, blank lines ignored. Malformed content
/// reports the offending line number.
pub fn read_boxes(path: &Path) -> Result<Vec<WordBox>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(cut) => &raw_line[..cut],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::BoxFormat {
            path: path.to_path_buf(),
            line: idx + 1,
            reason,
        };
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad(format!(
                "expected 4 fields (x y w h), found {}",
                fields.len()
            )));
        }
        let mut vals = [0u32; 4];
        for (slot, field) in vals.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| bad(format!("{field:?} is not a non-negative integer")))?;
        }
        out.push(WordBox::new(vals[0], vals[1], vals[2], vals[3]));
    }
    Ok(out)
}

/// Writes a box sidecar atomically, one `x y w h` line per box.
pub fn write_boxes(path: &Path, boxes: &[WordBox]) -> Result<()> {
    let mut text = String::new();
    for b in boxes {
        text.push_str(&format!("{} {} {} {}\n", b.x, b.y, b.w, b.h));
    }
    atomic_write(path, text.as_bytes())
}
