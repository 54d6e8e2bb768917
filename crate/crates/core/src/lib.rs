#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod array;
pub mod error;
pub mod fft;
pub mod grid;
pub mod hermite;
pub mod linalg;
mod par;
pub mod restriction;
pub mod schatten;
pub mod weyl;

pub use error::{Error, Result};
