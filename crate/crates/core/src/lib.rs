//! Locally H2-optimal rational approximation on simply connected domains.
//!
//! A target transfer function `G`, analytic on a domain `A`, is pulled back
//! to the unit disk through a conformal map `phi`. The disk-side function
//! is approximated by a Loewner-matrix fixed-point iteration whose
//! interpolation points are the reflections of the reduced poles through
//! the unit circle.

pub mod aaa;
pub mod error;
pub mod conformal;
pub mod hardy;
pub mod irka;
pub mod linalg;
pub mod models;
pub mod simulate;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
