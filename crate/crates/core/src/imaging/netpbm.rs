//! ASCII netpbm readers and writers: PGM (P2) and PPM (P3), maxval 255.
//!
//! The writer emits canonical whitespace (one header field per rule, one
//! pixel row per line, single spaces) so golden files are byte-stable.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GrayImage, ImageError, RgbImage};

#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("expected magic {expected}, found {found:?}")]
    BadMagic {
        expected: &'static str,
        found: String,
    },
    #[error("unexpected end of file in {0}")]
    UnexpectedEof(&'static str),
    #[error("invalid integer {0:?}")]
    BadInteger(String),
    #[error("unsupported maxval {0}, only 255 is supported")]
    BadMaxval(u32),
    #[error("pixel value {0} out of range 0..=255")]
    PixelRange(u32),
    #[error("trailing data after pixel raster")]
    TrailingData,
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Whitespace/comment-skipping integer tokenizer shared by both readers.
struct Tokens<'a> {
    rest: &'a str,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { rest: text }
    }

    fn skip_separators(&mut self) {
        loop {
            self.rest = self.rest.trim_start();
            if let Some(stripped) = self.rest.strip_prefix('#') {
                match stripped.find('\n') {
                    Some(i) => self.rest = &stripped[i + 1..],
                    None => self.rest = "",
                }
            } else {
                return;
            }
        }
    }

    fn next_word(&mut self) -> Option<&'a str> {
        self.skip_separators();
        if self.rest.is_empty() {
            return None;
        }
        let end = self
            .rest
            .find(|c: char| c.is_ascii_whitespace())
            .unwrap_or(self.rest.len());
        let (word, rest) = self.rest.split_at(end);
        self.rest = rest;
        Some(word)
    }

    fn next_u32(&mut self, what: &'static str) -> Result<u32, NetpbmError> {
        let w = self.next_word().ok_or(NetpbmError::UnexpectedEof(what))?;
        w.parse()
            .map_err(|_| NetpbmError::BadInteger(w.to_string()))
    }

    fn finished(&mut self) -> bool {
        self.skip_separators();
        self.rest.is_empty()
    }
}

fn parse_raster(
    magic: &'static str,
    text: &str,
    samples_per_pixel: u32,
) -> Result<(u32, u32, Vec<u8>), NetpbmError> {
    let mut tokens = Tokens::new(text);
    let found = tokens.next_word().unwrap_or("").to_string();
    if found != magic {
        return Err(NetpbmError::BadMagic {
            expected: magic,
            found,
        });
    }
    let width = tokens.next_u32("width")?;
    let height = tokens.next_u32("height")?;
    let maxval = tokens.next_u32("maxval")?;
    if maxval != 255 {
        return Err(NetpbmError::BadMaxval(maxval));
    }
    let count = width as u64 * height as u64 * samples_per_pixel as u64;
    let mut pixels = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let v = tokens.next_u32("pixel")?;
        if v > 255 {
            return Err(NetpbmError::PixelRange(v));
        }
        pixels.push(v as u8);
    }
    if !tokens.finished() {
        return Err(NetpbmError::TrailingData);
    }
    Ok((width, height, pixels))
}

pub fn read_pgm(text: &str) -> Result<GrayImage, NetpbmError> {
    let (w, h, px) = parse_raster("P2", text, 1)?;
    Ok(GrayImage::new(w, h, px)?)
}

pub fn read_ppm(text: &str) -> Result<RgbImage, NetpbmError> {
    let (w, h, px) = parse_raster("P3", text, 3)?;
    Ok(RgbImage::new(w, h, px)?)
}

pub fn write_pgm(img: &GrayImage) -> String {
    let mut out = String::new();
    writeln!(out, "P2").unwrap();
    writeln!(out, "{} {}", img.width, img.height).unwrap();
    writeln!(out, "255").unwrap();
    for row in img.pixels.chunks(img.width as usize) {
        let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn write_ppm(img: &RgbImage) -> String {
    let mut out = String::new();
    writeln!(out, "P3").unwrap();
    writeln!(out, "{} {}", img.width, img.height).unwrap();
    writeln!(out, "255").unwrap();
    for row in img.pixels.chunks(img.width as usize * 3) {
        let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}
