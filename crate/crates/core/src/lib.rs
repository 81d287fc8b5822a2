#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod besov;
pub mod characterization;
pub mod error;
pub mod examples;
pub mod indicators;
pub mod numerics;
pub mod oracle;
pub mod profiles;
pub mod semigroup;
pub mod suite;

pub use error::{Error, Result};
