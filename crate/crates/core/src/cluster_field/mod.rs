//! Equal-time two-point function of a free massive scalar field in three
//! space dimensions (natural units `ħ = c = 1`).
//!
//! The Hankel form `−(m/8π) H₁⁽¹⁾(imr)/r` is evaluated through
//! `H₁⁽¹⁾(ix) = −(2/π) K₁(x)`, giving the positive expression
//! `m K₁(mr)/(4π² r)`, which decays like `e^{−mr}` beyond the Compton length
//! `1/m`.

mod bessel;

pub use bessel::{bessel_k1, bessel_k1_scaled, K1Value, K1_SWITCH};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// Electron rest mass, kg.
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("argument must be positive and finite, got {0}")]
    NonPositiveArgument(f64),
    #[error("field mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),
    #[error("separation must be positive and finite, got {0}")]
    NonPositiveSeparation(f64),
    #[error("degenerate fit range: {0}")]
    DegenerateRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    mass: f64,
}

impl FieldParams {
    pub fn new(mass: f64) -> Result<Self, FieldError> {
        if mass.is_finite() && mass > 0.0 {
            Ok(Self { mass })
        } else {
            Err(FieldError::NonPositiveMass(mass))
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn compton_length(&self) -> f64 {
        1.0 / self.mass
    }
}

fn check_r(r: f64) -> Result<f64, FieldError> {
    if r.is_finite() && r > 0.0 {
        Ok(r)
    } else {
        Err(FieldError::NonPositiveSeparation(r))
    }
}

/// `ω(Φ(t,x)Φ(t,y))` at `|x − y| = r`, i.e. `m K₁(mr)/(4π² r)`.
/// Returns 0 once `K₁` underflows (`mr` beyond about 700).
pub fn two_point(params: &FieldParams, r: f64) -> Result<f64, FieldError> {
    let r = check_r(r)?;
    let m = params.mass;
    Ok(m * bessel_k1(m * r)?.value / (4.0 * PI * PI * r))
}

/// `ln ω(Φ(t,x)Φ(t,y))`, usable where the value itself underflows.
pub fn log_two_point(params: &FieldParams, r: f64) -> Result<f64, FieldError> {
    let r = check_r(r)?;
    let m = params.mass;
    let x = m * r;
    Ok((m / (4.0 * PI * PI * r)).ln() + bessel_k1_scaled(x)?.ln() - x)
}

/// Leading large-distance form `(m/8π) sqrt(2/(mπr)) e^{−mr}/r`.
pub fn two_point_asymptotic(params: &FieldParams, r: f64) -> Result<f64, FieldError> {
    let r = check_r(r)?;
    let m = params.mass;
    Ok(m / (8.0 * PI) * (2.0 / (m * PI * r)).sqrt() * (-m * r).exp() / r)
}

/// Least-squares slope of `−ln(ω · r^{3/2})` against `r` on `n` log-spaced
/// separations in `[r_min, r_max]`; approaches the field mass.
pub fn decay_rate_fit(params: &FieldParams, r_min: f64, r_max: f64, n: usize) -> Result<f64, FieldError> {
    let r_min = check_r(r_min)?;
    let r_max = check_r(r_max)?;
    if r_max <= r_min {
        return Err(FieldError::DegenerateRange(format!("r_max {r_max} must exceed r_min {r_min}")));
    }
    if n < 8 {
        return Err(FieldError::DegenerateRange(format!("need at least 8 samples, got {n}")));
    }
    if params.mass * r_min < 5.0 {
        return Err(FieldError::DegenerateRange(format!(
            "m·r_min = {} is inside the non-exponential region (< 5)",
            params.mass * r_min
        )));
    }
    let ratio = (r_max / r_min).ln() / (n - 1) as f64;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let r = r_min * (ratio * i as f64).exp();
        let y = -(log_two_point(params, r)? + 1.5 * r.ln());
        points.push((r, y));
    }
    let nf = n as f64;
    let mean_r = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = points.iter().map(|(r, y)| (r - mean_r) * (y - mean_y)).sum();
    let sxx: f64 = points.iter().map(|(r, _)| (r - mean_r).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `ħ/(mc)` in metres for a rest mass in kilograms.
pub fn compton_wavelength_m(mass_kg: f64) -> Result<f64, FieldError> {
    if !(mass_kg.is_finite() && mass_kg > 0.0) {
        return Err(FieldError::NonPositiveMass(mass_kg));
    }
    Ok(HBAR_SI / (mass_kg * SPEED_OF_LIGHT_SI))
}
