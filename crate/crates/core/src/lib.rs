//! Exact-arithmetic workbench for non-positive DG-rings.
//!
//! The pipeline: human-authored presentations of graded rings, DG-rings and
//! modules ([`presentation`]) are compiled into finite bigraded
//! structure-constant data within a truncation window ([`truncated`]);
//! minimal semifree resolutions ([`resolve`]) then feed derived tensor,
//! derived Hom, Ext/Tor tables and the reduction/coreduction/forgetful
//! functors ([`derived`]). [`scenarios`] packages named end-to-end
//! computations with expected values.

pub mod derived;
pub mod linalg;
pub mod presentation;
pub mod resolve;
pub mod scenarios;
pub mod table;
pub mod truncated;

use thiserror::Error;

/// Cohomological degree `n` paired with internal (weight) degree `d`.
/// Differentials move by exactly `(+1, 0)`.
pub type Bidegree = (i32, i32);

/// Finite bidegree box all computation happens in.
/// `d_min` is 0 for compiled algebras and presented modules; complexes built
/// from Hom or shifts may occupy negative internal degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub n_min: i32,
    pub n_max: i32,
    pub d_max: i32,
}

impl Window {
    pub fn new(n_min: i32, n_max: i32, d_max: i32) -> Self {
        assert!(n_min <= n_max && d_max >= 0, "malformed window");
        Window { n_min, n_max, d_max }
    }
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("compilation failed: {0}")]
    Compile(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
