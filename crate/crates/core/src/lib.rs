//! Simulation toolkit for Gaussian free field flow lines and the SLE fan.

pub mod analysis;
pub mod bessel;
pub mod error;
pub mod fan;
pub mod geometry;
pub mod harness;
pub mod gff;
pub mod loewner;
pub mod raster;
pub mod rng;
pub mod special;
pub mod stats;
pub mod topology;
pub mod trace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use raster::BitGrid;
pub use rng::{stream, StreamKey, StreamRng};
pub use trace::{Termination, Trace, TraceMeta};
