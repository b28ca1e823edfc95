//! Semi-quantitative group testing: multiplier sequences for arbitrary
//! quantizer thresholds, SQ-separable codes built by concatenating scaled
//! binary disjunct codes, and zero-error decoders.

pub mod bench;
pub mod campaign;
pub mod channel;
pub mod codebook;
pub mod decoders;
pub mod disjunct;
pub mod error;
pub mod matrix;
pub mod quantization;
pub mod sequences;

pub use channel::{DefectiveSet, ErrorPolicy, TestOutcome};
pub use codebook::{HeadroomMode, SqgtCode};
pub use decoders::DecodedResult;
pub use disjunct::{BinaryDisjunctCode, Provenance};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use quantization::Thresholds;
pub use sequences::{BaseFamily, BaseSequence, MultiplierSequence, SequenceKind};
