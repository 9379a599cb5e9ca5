//! Horizontal calculus, Pucci extremal operators and sampled verification
//! of Lyapunov-type conditions for sub-Riemannian vector fields.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod expr;
pub mod extremal;
pub mod geometry;
pub mod hcalc;
pub mod liouville;
pub mod report;
pub mod sampling;
pub mod scalar;
