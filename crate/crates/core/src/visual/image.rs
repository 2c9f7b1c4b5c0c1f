//! Grayscale frames, foreground masks and binary PGM I/O.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Smallest accepted frame side, in pixels.
pub const MIN_SIDE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::Shape(format!(
                "{width}x{height} image is smaller than {MIN_SIDE}x{MIN_SIDE}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Shape(format!(
                "{} pixels do not fill a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn same_shape(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Per-pixel foreground flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForegroundMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl ForegroundMask {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The mask as a 0/255 image.
    pub fn to_image(&self) -> Result<GrayImage> {
        GrayImage::new(
            self.width,
            self.height,
            self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        )
    }
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let decoded = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?
        .into_luma8();
    let (w, h) = decoded.dimensions();
    GrayImage::new(w as usize, h as usize, decoded.into_raw())
}

/// Writes an 8-bit binary (P5) PGM.
pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
    use image::ImageEncoder;

    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    PnmEncoder::new(std::io::BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            &img.pixels,
            img.width as u32,
            img.height as u32,
            image::ExtendedColorType::L8,
        )
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:04}.pgm")
}

/// Reads `frame_0000.pgm`, `frame_0001.pgm`, ... from a shot directory.
pub fn read_shot(dir: impl AsRef<Path>) -> Result<Vec<GrayImage>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".pgm"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{}: no frame_*.pgm files",
            dir.display()
        )));
    }
    paths.iter().map(read_pgm).collect()
}

pub fn write_shot(frames: &[GrayImage], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, f) in frames.iter().enumerate() {
        write_pgm(f, dir.join(frame_file_name(i)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(GrayImage::new(7, 10, vec![0; 70]).is_err());
        assert!(GrayImage::new(8, 8, vec![0; 63]).is_err());
        assert!(GrayImage::new(8, 8, vec![0; 64]).is_ok());
    }

    #[test]
    fn pgm_round_trip_is_p5() {
        let dir = tempfile::tempdir().unwrap();
        let pixels: Vec<u8> = (0..12 * 9).map(|i| (i * 7 % 256) as u8).collect();
        let img = GrayImage::new(12, 9, pixels).unwrap();
        write_shot(&[img.clone(), img.clone()], dir.path()).unwrap();
        let bytes = std::fs::read(dir.path().join("frame_0000.pgm")).unwrap();
        assert_eq!(&bytes[..2], b"P5");
        let frames = read_shot(dir.path()).unwrap();
        assert_eq!(frames, vec![img.clone(), img]);
    }
}
