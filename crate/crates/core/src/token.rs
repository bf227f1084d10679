//! Data tokens flowing through dataflow graphs and NoC links.

use std::fmt;

use crate::imaging::{GrayImage, RgbImage};

/// A single data token. `Null` carries no information but keeps stream
/// indices aligned, so skewed input streams can be resynchronized without
/// extra index metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Null,
    Scalar(i64),
    Image(ImageData),
}

/// Image payload of an image token: one or three channels, 8-bit pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageData {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl Token {
    pub fn gray(img: GrayImage) -> Self {
        Token::Image(ImageData::Gray(img))
    }

    pub fn rgb(img: RgbImage) -> Self {
        Token::Image(ImageData::Rgb(img))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Token::Null)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Null => write!(f, "N"),
            Token::Scalar(v) => write!(f, "{v}"),
            Token::Image(ImageData::Gray(img)) => {
                write!(f, "<gray {}x{}>", img.width, img.height)
            }
            Token::Image(ImageData::Rgb(img)) => write!(f, "<rgb {}x{}>", img.width, img.height),
        }
    }
}

/// A finite ordered token sequence. The token index is the synchronization
/// key; endless streams are approximated by prefix closure.
pub type Stream = Vec<Token>;

/// Aligns skewed streams by token index: tuple `k` holds token `k` of every
/// stream. Tuples are produced only while every stream still has a token, so
/// the result length is the minimum stream length. Null tokens are delivered
/// in their slot, never skipped.
pub fn resynchronize(streams: &[Stream]) -> Vec<Vec<Token>> {
    let len = streams.iter().map(|s| s.len()).min().unwrap_or(0);
    (0..len)
        .map(|k| streams.iter().map(|s| s[k].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resynchronize_zips_by_index() {
        let a = vec![Token::Scalar(1), Token::Scalar(2)];
        let b = vec![Token::Scalar(10), Token::Scalar(20)];
        let tuples = resynchronize(&[a, b]);
        assert_eq!(
            tuples,
            vec![
                vec![Token::Scalar(1), Token::Scalar(10)],
                vec![Token::Scalar(2), Token::Scalar(20)],
            ]
        );
    }

    #[test]
    fn resynchronize_delivers_null_in_slot() {
        let a = vec![Token::Scalar(1), Token::Null, Token::Scalar(3)];
        let b = vec![Token::Scalar(4), Token::Scalar(5), Token::Scalar(6)];
        let tuples = resynchronize(&[a, b]);
        assert_eq!(tuples[1], vec![Token::Null, Token::Scalar(5)]);
        assert_eq!(tuples.len(), 3);
    }

    #[test]
    fn resynchronize_empty_input() {
        assert!(resynchronize(&[]).is_empty());
        assert!(resynchronize(&[vec![], vec![Token::Scalar(1)]]).is_empty());
    }
}
