//! Reversible circuits for binary-field arithmetic: additions, linear maps,
//! squaring, Karatsuba sub-multipliers, CRT modular multiplication and
//! FLT inversion.

mod chain;
mod correction;
mod crt;
mod flt;
pub mod karatsuba;
mod linear;

pub use chain::{AdditionChain, ChainStep, StepKind};
pub use correction::{correction_counts, emit_correction, synth_correction};
pub use crt::{
    auto_modulus_set, default_modulus_set, inner_modulus_set, synth_crt_modmult,
    synth_crt_modmult_counts, CrtPlan, ModmultReport,
};
pub use flt::{synth_flt_inversion, synth_flt_inversion_with, InversionLayout, InversionReport};
pub use karatsuba::{emit_kmult, synth_kmult, FormulaSource, FormulaTable, KaratsubaFormula};
pub use linear::{
    emit_addition, emit_in_place, emit_in_place_inverse, emit_out_of_place_mul, square_ops,
    synth_addition, synth_in_place_mul, synth_out_of_place_mul, synth_square, AdditionMode,
    LinearOps, SquareChoice,
};

use thiserror::Error;

use crate::gf2_field::FieldError;
use crate::gf2_linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no Karatsuba formula for {0}-term operands")]
    MissingFormula(usize),
    #[error("formula for {formula} terms does not match modulus degree {modulus}")]
    DegreeMismatch { formula: usize, modulus: usize },
    #[error("formula for d = {d} fails on f = {f:#x}, g = {g:#x}")]
    BadFormula { d: usize, f: u64, g: u64 },
    #[error("formula file {path}: {msg}")]
    FormulaFile { path: String, msg: String },
    #[error("correction needs 1 <= omega <= n, got omega = {omega}, n = {n}")]
    BadOmega { omega: usize, n: usize },
    #[error("addition chain: {0}")]
    Chain(String),
    #[error("recombination map for factor {index} is rank deficient")]
    RankDeficient { index: usize },
}

pub type Result<T> = std::result::Result<T, ArithError>;
