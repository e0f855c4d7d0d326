//! Beam-squint simulation core.
//!
//! Everything in this crate is pure computation over immutable inputs and
//! runs without `std` (only `alloc` is required). File formats, the CLI and
//! parallel orchestration live in the `squint-sim` companion crate.
//!
//! Conventions used throughout:
//!
//! * frequencies are in GHz, angles in degrees, lengths in meters unless a
//!   name says otherwise;
//! * `e^{+jωt}` time dependence, so a propagation delay is `e^{-jk·L}` and a
//!   lossy permittivity has a non-positive imaginary part;
//! * azimuth angles are measured from array/lens boresight, positive towards
//!   the `+x` side of the aperture.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod array;
pub mod beampattern;
mod error;
pub mod lens;
pub mod materials;
pub mod metrics;
pub mod raytrace;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wavelength in meters for a frequency in GHz.
#[inline]
pub fn wavelength_m(f_ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (f_ghz * 1e9)
}

/// Free-space wavenumber in rad/m for a frequency in GHz.
#[inline]
pub fn wavenumber(f_ghz: f64) -> f64 {
    core::f64::consts::TAU / wavelength_m(f_ghz)
}

/// Evaluation model for an analog beamformer.
///
/// `Em1` keeps the narrowband behaviour of the radiating elements (the
/// "external" squint factor); `Em2` replaces every element by an ideal,
/// frequency-flat one so only the structure's own squint remains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvalModel {
    Em1,
    Em2,
}

impl EvalModel {
    pub const ALL: [EvalModel; 2] = [EvalModel::Em1, EvalModel::Em2];

    pub fn as_str(self) -> &'static str {
        match self {
            EvalModel::Em1 => "EM1",
            EvalModel::Em2 => "EM2",
        }
    }
}

impl core::fmt::Display for EvalModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for EvalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EM1" | "em1" => Ok(EvalModel::Em1),
            "EM2" | "em2" => Ok(EvalModel::Em2),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown evaluation model `{s}`"))),
        }
    }
}
