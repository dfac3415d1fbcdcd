#![no_std]
//! Exact dynamics of rational maps on the projective line over the
//! algebraic closure of a finite field, with the trivially valued
//! Berkovich line, symmetric-product surfaces and `p`-adic good reduction.

extern crate alloc;

pub mod algebra;
pub mod berkovich;
pub mod error;
pub mod measures;
pub mod p2;
pub mod reduction;
pub mod scheme;

pub use error::{Error, Result};
