//! Knife-edge diffraction (KED) at a window edge and free-space loss.
//!
//! Intrusion distances `Δ` follow the clearance-positive convention used
//! throughout the crate: `Δ > 0` means the edge is clear of the direct ray.
//! The classical KED loss curve is written for an obstruction-positive
//! argument, so [`ked_excess_loss_db`] evaluates it at `-v`.

use std::f64::consts::PI;

use crate::special;
use crate::{Error, Result};

/// Fresnel cosine and sine integrals at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelValue {
    pub c: f64,
    pub s: f64,
}

/// Dimensionless Fresnel–Kirchhoff parameter `v`, positive for clearance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DiffractionParameter(pub f64);

impl DiffractionParameter {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `C(v)` and `S(v)`. Arguments beyond ±50 return the ±1/2 limits.
pub fn fresnel_integrals(v: f64) -> Result<FresnelValue> {
    if !v.is_finite() {
        return Err(Error::InvalidDiffractionParameter);
    }
    let (c, s) = special::fresnel(v);
    Ok(FresnelValue { c, s })
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

/// `v = Δ·√(2/λ·(1/d₁ + 1/d₂))`.
pub fn diffraction_parameter(
    delta: f64,
    d1: f64,
    d2: f64,
    wavelength: f64,
) -> Result<DiffractionParameter> {
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    check_positive("wavelength", wavelength)?;
    if !delta.is_finite() {
        return Err(Error::InvalidDiffractionParameter);
    }
    Ok(DiffractionParameter(
        delta * (2.0 / wavelength * (1.0 / d1 + 1.0 / d2)).sqrt(),
    ))
}

/// Radius of the first Fresnel zone at the edge plane, `√(λ·d₁·d₂/(d₁+d₂))`.
pub fn fresnel_radius(d1: f64, d2: f64, wavelength: f64) -> Result<f64> {
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    check_positive("wavelength", wavelength)?;
    Ok((wavelength * d1 * d2 / (d1 + d2)).sqrt())
}

/// Excess loss over free space caused by a single knife edge, in dB.
///
/// 6.02 dB at grazing (`v = 0`), tending to 0 dB with growing clearance and
/// rising steadily as the edge moves into the ray.
pub fn ked_excess_loss_db(v: DiffractionParameter) -> f64 {
    let (c, s) = special::fresnel(-v.0);
    let magnitude = ((1.0 - c - s).powi(2) + (c - s).powi(2)).sqrt() / 2.0;
    -20.0 * magnitude.log10()
}

/// `20·log₁₀(4πd/λ)`.
pub fn free_space_path_loss_db(d: f64, wavelength: f64) -> Result<f64> {
    check_positive("distance", d)?;
    check_positive("wavelength", wavelength)?;
    Ok(20.0 * (4.0 * PI * d / wavelength).log10())
}

/// Free-space loss over `d1 + d2` plus the knife-edge excess loss of an
/// edge at intrusion `delta`.
pub fn total_path_loss_db(d1: f64, d2: f64, delta: f64, wavelength: f64) -> Result<f64> {
    let v = diffraction_parameter(delta, d1, d2, wavelength)?;
    Ok(free_space_path_loss_db(d1 + d2, wavelength)? + ked_excess_loss_db(v))
}
