//! Genus-3 curves over `GF(2^n)` with three elliptic quotients.

pub mod covers;
pub mod ec;
pub mod error;
pub mod genus3;
pub mod gf2;
pub mod maximal;
pub mod quartic;
pub mod quotients;
pub mod sweep;

pub(crate) mod codec;

pub use error::{Error, Result};
