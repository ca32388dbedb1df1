//! Reversible circuits and resource estimates for elliptic-curve discrete
//! logarithms over binary fields.

pub mod arith_synth;
pub mod circuit_ir;
pub mod data;
pub mod ecc;
pub mod gf2_field;
pub mod gf2_linalg;
pub mod phys_estimate;
pub mod shor_cost;
pub mod validate;
pub mod pipeline;
