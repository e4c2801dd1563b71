//! Lévy–Khintchine triplets, characteristic functions and sample paths
//! attached to Selberg-class L-functions through their zeros.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fmt;
pub mod levy;
pub mod lfunc;
pub mod qexp;
pub mod sim;
pub mod special;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
