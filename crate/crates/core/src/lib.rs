//! Exact computations with geodesic currents on finitely generated free
//! groups: cyclic words and occurrence counts, marked graphs with rational
//! metrics, endomorphisms, finite-level current coordinates, the
//! intersection form, local formulas, generic stretching factors and
//! distortion extrema.

pub mod charts;
pub mod cli;
pub mod currents;
pub mod error;
pub mod morphisms;
pub mod pairing;
pub mod rational;
pub mod spectra;
pub mod words;

pub use error::{Error, Result};
