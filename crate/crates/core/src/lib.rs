//! Line-of-sight and coverage probability for an outdoor base station (BS)
//! reaching a mobile station (MS) inside a square room through a single
//! window.
//!
//! The window edges act as knife edges. A BS–MS path is line-of-sight when
//! both edges keep at least 0.6 of the first Fresnel radius clear of the
//! direct ray. On top of that condition the crate provides:
//!
//! * [`geometry`]: the planar room/window/BS frame and path distances.
//! * [`diffraction`]: Fresnel integrals, knife-edge excess loss and
//!   free-space loss.
//! * [`los`]: closed-form, optical and grid-oracle LoS probability, plus the
//!   critical frequency below which the window admits no LoS at normal
//!   incidence.
//! * [`coverage`]: mean SNR, LoS probability at a fixed MS distance and
//!   Nakagami-m coverage probability with a Monte Carlo cross-check.
//! * [`sweep`]: the flat config format, parameter sweeps and CSV output used
//!   by the `o2i-los` binary.

pub mod coverage;
pub mod diffraction;
pub mod error;
pub mod geometry;
pub mod los;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wavelength in meters for a carrier frequency in Hz.
pub fn wavelength(frequency_hz: f64) -> Result<f64> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / frequency_hz)
}
