use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::error::{Error, Result};

/// On-disk encodings for 8-bit grayscale images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    /// Binary PGM (P5), maxval 255.
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(Error::Format(format!(
                "cannot infer image format from {}",
                path.display()
            ))),
        }
    }
}

/// Reads a PGM or PNG file, chosen by extension.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path)?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    match format {
        ImageFormat::Pgm => {
            let mut bytes = Vec::new();
            reader
                .read_to_end(&mut bytes)
                .map_err(|e| Error::io(path, e))?;
            decode_pgm(&bytes)
        }
        ImageFormat::Png => decode_png(reader),
    }
}

/// Writes `image` as PGM or PNG, chosen by extension.
pub fn save_image(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    match format {
        ImageFormat::Pgm => writer
            .write_all(&encode_pgm(image))
            .map_err(|e| Error::io(path, e))?,
        ImageFormat::Png => encode_png(image, &mut writer)?,
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

pub(crate) fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let magic = pgm_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Format(format!(
            "expected binary PGM magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = pgm_number(bytes, &mut pos, "width")?;
    let height = pgm_number(bytes, &mut pos, "height")?;
    let maxval = pgm_number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "only 8-bit PGM with maxval 255 is supported, found maxval {maxval}"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format(
            "PGM header not terminated by whitespace".into(),
        ));
    }
    pos += 1;
    let len = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("PGM dimensions overflow".into()))?;
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| Error::Format(format!("PGM raster truncated, expected {len} bytes")))?;
    GrayImage::new(width, height, raster.to_vec()).map_err(|e| Error::Format(e.to_string()))
}

fn pgm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(_) => break,
            None => return Err(Error::Format("PGM header truncated".into())),
        }
    }
    let start = *pos;
    while bytes
        .get(*pos)
        .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
    {
        *pos += 1;
    }
    Ok(&bytes[start..*pos])
}

fn pgm_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let token = pgm_token(bytes, pos)?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Format(format!(
                "invalid PGM {what} {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}

fn decode_png<R: std::io::BufRead + std::io::Seek>(reader: R) -> Result<GrayImage> {
    let fmt = |e: png::DecodingError| Error::Format(format!("PNG decode failed: {e}"));
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(fmt)?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Format(format!(
            "only 8-bit grayscale PNG is supported, found {:?} at {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let mut buf = vec![0; width * height];
    reader.next_frame(&mut buf).map_err(fmt)?;
    GrayImage::new(width, height, buf).map_err(|e| Error::Format(e.to_string()))
}

fn encode_png<W: Write>(image: &GrayImage, writer: W) -> Result<()> {
    let fmt = |e: png::EncodingError| Error::Format(format!("PNG encode failed: {e}"));
    let mut encoder = png::Encoder::new(writer, image.width() as u32, image.height() as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(fmt)?;
    writer.write_image_data(image.pixels()).map_err(fmt)?;
    writer.finish().map_err(fmt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GrayImage {
        GrayImage::new(5, 3, (0..15).map(|v| v * 17).collect()).unwrap()
    }

    #[test]
    fn pgm_header_dimensions() {
        let mut bytes = b"P5 792 777 255\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 792 * 777));
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (792, 777));
    }

    #[test]
    fn pgm_comments_skipped() {
        let mut bytes = b"P5\n# made by hand\n2 1\n# depth\n255\n".to_vec();
        bytes.extend([0, 255]);
        assert_eq!(decode_pgm(&bytes).unwrap().pixels(), &[0, 255]);
    }

    #[test]
    fn pgm_rejects_bad_input() {
        assert!(matches!(
            decode_pgm(b"P2 1 1 255\n0"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5 2 2 255\n\0\0"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5 1 1 65535\n\0\0"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5 x 1 255\n\0"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.pgm", "a.png"] {
            let path = dir.path().join(name);
            save_image(&sample(), &path).unwrap();
            assert_eq!(load_image(&path).unwrap(), sample());
        }
    }

    #[test]
    fn color_png_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        let file = File::create(&path).unwrap();
        let mut enc = png::Encoder::new(BufWriter::new(file), 2, 2);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[0; 12]).unwrap();
        w.finish().unwrap();
        assert!(matches!(load_image(&path), Err(Error::Format(_))));
    }

    #[test]
    fn unknown_extension() {
        assert!(matches!(load_image("image.bmp"), Err(Error::Format(_))));
    }
}
