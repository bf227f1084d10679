//! Operator registry: maps type labels to arity specs and pure firing
//! functions on token tuples.
//!
//! Library operators return Null on any Null input unless an entry opts out,
//! so null tokens propagate through pipelines and keep stream indices
//! aligned. All firing functions must be pure: same inputs, same outputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::TypeLabel;
use crate::imaging::{self, ImageError};
use crate::token::{ImageData, Token};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("operator {op} expects {expected} input(s), got {got}")]
    Arity {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("operator {op} applied to {got} token, expects {expected}")]
    Domain {
        op: String,
        expected: &'static str,
        got: &'static str,
    },
    #[error("operator {op}: {source}")]
    Image { op: String, source: ImageError },
}

fn kind_of(t: &Token) -> &'static str {
    match t {
        Token::Null => "null",
        Token::Scalar(_) => "scalar",
        Token::Image(ImageData::Gray(_)) => "gray image",
        Token::Image(ImageData::Rgb(_)) => "rgb image",
    }
}

fn want_gray(op: &str, t: &Token) -> Result<imaging::GrayImage, OpError> {
    match t {
        Token::Image(ImageData::Gray(img)) => Ok(img.clone()),
        other => Err(OpError::Domain {
            op: op.to_string(),
            expected: "gray image",
            got: kind_of(other),
        }),
    }
}

fn want_rgb(op: &str, t: &Token) -> Result<imaging::RgbImage, OpError> {
    match t {
        Token::Image(ImageData::Rgb(img)) => Ok(img.clone()),
        other => Err(OpError::Domain {
            op: op.to_string(),
            expected: "rgb image",
            got: kind_of(other),
        }),
    }
}

fn want_scalar(op: &str, t: &Token) -> Result<i64, OpError> {
    match t {
        Token::Scalar(v) => Ok(*v),
        other => Err(OpError::Domain {
            op: op.to_string(),
            expected: "scalar",
            got: kind_of(other),
        }),
    }
}

type FiringFn = Arc<dyn Fn(&[Token]) -> Result<Vec<Token>, OpError> + Send + Sync>;

/// One registered operator: fixed arities and a pure firing function.
#[derive(Clone)]
pub struct Operator {
    pub in_arity: usize,
    pub out_arity: usize,
    /// When set (the library default), any Null input short-circuits the
    /// firing to all-Null outputs.
    pub null_on_null: bool,
    fire: FiringFn,
}

/// Registry of operators keyed by type label. `CONST_<v>` labels are resolved
/// dynamically to zero-input sources emitting the scalar `v`.
#[derive(Clone, Default)]
pub struct OperatorRegistry {
    ops: BTreeMap<TypeLabel, Operator>,
}

impl OperatorRegistry {
    pub fn new() -> Self {
        OperatorRegistry::default()
    }

    /// Registry with the imaging library and scalar helpers:
    /// GAUSS3, GRAYWORLD, HISTEQ, CANNY, LUMA, SPLIT_RGB, MERGE_RGB,
    /// ID, ADDER, SINK, and dynamic CONST_<v> sources.
    pub fn standard() -> Self {
        let mut r = OperatorRegistry::new();
        r.register("GAUSS3", 1, 1, |inp| {
            Ok(vec![Token::gray(imaging::gauss3(&want_gray(
                "GAUSS3", &inp[0],
            )?))])
        });
        r.register("GRAYWORLD", 1, 1, |inp| {
            Ok(vec![Token::rgb(imaging::grayworld(&want_rgb(
                "GRAYWORLD",
                &inp[0],
            )?))])
        });
        r.register("HISTEQ", 1, 1, |inp| {
            Ok(vec![Token::gray(imaging::hist_eq(&want_gray(
                "HISTEQ", &inp[0],
            )?))])
        });
        r.register("CANNY", 1, 1, |inp| {
            let img = want_gray("CANNY", &inp[0])?;
            let out = imaging::canny(&img).map_err(|source| OpError::Image {
                op: "CANNY".to_string(),
                source,
            })?;
            Ok(vec![Token::gray(out)])
        });
        r.register("LUMA", 1, 1, |inp| {
            Ok(vec![Token::gray(imaging::luma(&want_rgb(
                "LUMA", &inp[0],
            )?))])
        });
        r.register("SPLIT_RGB", 1, 3, |inp| {
            let (a, b, c) = imaging::split_rgb(&want_rgb("SPLIT_RGB", &inp[0])?);
            Ok(vec![Token::gray(a), Token::gray(b), Token::gray(c)])
        });
        r.register("MERGE_RGB", 3, 1, |inp| {
            let r = want_gray("MERGE_RGB", &inp[0])?;
            let g = want_gray("MERGE_RGB", &inp[1])?;
            let b = want_gray("MERGE_RGB", &inp[2])?;
            let merged = imaging::merge_rgb(&r, &g, &b).map_err(|source| OpError::Image {
                op: "MERGE_RGB".to_string(),
                source,
            })?;
            Ok(vec![Token::rgb(merged)])
        });
        r.register("ID", 1, 1, |inp| Ok(vec![inp[0].clone()]));
        r.register("ADDER", 2, 1, |inp| {
            let a = want_scalar("ADDER", &inp[0])?;
            let b = want_scalar("ADDER", &inp[1])?;
            Ok(vec![Token::Scalar(a.wrapping_add(b))])
        });
        r.register("SINK", 1, 0, |_| Ok(vec![]));
        r
    }

    pub fn register(
        &mut self,
        label: &str,
        in_arity: usize,
        out_arity: usize,
        fire: impl Fn(&[Token]) -> Result<Vec<Token>, OpError> + Send + Sync + 'static,
    ) {
        self.register_operator(
            label,
            Operator {
                in_arity,
                out_arity,
                null_on_null: true,
                fire: Arc::new(fire),
            },
        );
    }

    pub fn register_operator(&mut self, label: &str, op: Operator) {
        let label = TypeLabel::new(label).expect("operator labels are identifiers");
        self.ops.insert(label, op);
    }

    /// Looks up an operator, resolving dynamic `CONST_<v>` labels.
    pub fn lookup(&self, label: &TypeLabel) -> Option<Operator> {
        if let Some(op) = self.ops.get(label) {
            return Some(op.clone());
        }
        let value: i64 = label.as_str().strip_prefix("CONST_")?.parse().ok()?;
        Some(Operator {
            in_arity: 0,
            out_arity: 1,
            null_on_null: false,
            fire: Arc::new(move |_| Ok(vec![Token::Scalar(value)])),
        })
    }

    pub fn arity_of(&self, label: &TypeLabel) -> Option<(usize, usize)> {
        self.lookup(label).map(|op| (op.in_arity, op.out_arity))
    }

    /// Fires an operator on one token tuple, applying the Null rule and
    /// checking arities.
    pub fn fire(&self, label: &TypeLabel, inputs: &[Token]) -> Result<Vec<Token>, OpError> {
        let op = self.lookup(label).ok_or_else(|| OpError::Domain {
            op: label.to_string(),
            expected: "registered operator",
            got: "unknown label",
        })?;
        if inputs.len() != op.in_arity {
            return Err(OpError::Arity {
                op: label.to_string(),
                expected: op.in_arity,
                got: inputs.len(),
            });
        }
        if op.null_on_null && inputs.iter().any(Token::is_null) {
            return Ok(vec![Token::Null; op.out_arity]);
        }
        let out = (op.fire)(inputs)?;
        debug_assert_eq!(out.len(), op.out_arity, "operator {label} arity mismatch");
        Ok(out)
    }

    pub fn contains(&self, label: &TypeLabel) -> bool {
        self.lookup(label).is_some()
    }
}
