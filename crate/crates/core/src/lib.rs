#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod specfun;
pub mod quadrature;
pub mod green;
pub mod sommerfeld;
pub mod expr;
pub mod surface;
pub mod bie;
pub mod nystrom;
pub mod potentials;
pub mod cli;
