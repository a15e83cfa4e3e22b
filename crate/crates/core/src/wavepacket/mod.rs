//! Free Gaussian wave packets in one dimension and their overlap with
//! Gaussian detector windows.
//!
//! A packet of width `σ` and mean momentum `p0` evolves under `H = p²/2m`
//! into a chirped Gaussian of width `σ_t = sqrt(σ² + ħ²t²/(m²σ²))` centred at
//! `x0 + (p0/m)t`. The probability of registering it in the window `φ_η` of
//! width `Δ` centred at `η` has a closed form ([`detection_probability_closed`])
//! that is cross-checked against spectral propagation on a grid
//! ([`detection_probability_numeric`]).
//!
//! Only moduli of overlaps are physical, so phases independent of `x` are
//! dropped throughout.

mod oracle;
mod overlap;

pub use oracle::{detection_probability_numeric, GridSpec, MAX_GRID_POINTS, TAIL_MASS_LIMIT};
pub use overlap::{riemann_lebesgue_overlap, SampledFunction};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PacketError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("grid step {dx} does not resolve {what} (need at most {limit})")]
    GridTooCoarse { dx: f64, limit: f64, what: &'static str },
    #[error("probability mass {mass:e} lies outside the grid [{x_min}, {x_max}]")]
    GridTailMass { mass: f64, x_min: f64, x_max: f64 },
    #[error("grid needs {needed} points, above the limit of {limit}")]
    GridTooLarge { needed: usize, limit: usize },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("sampled functions live on different grids")]
    GridMismatch,
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, PacketError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(PacketError::NonPositive { name, value })
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64, PacketError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(PacketError::NonFinite { name, value })
    }
}

/// Initial state `(πσ²)^{-1/4} exp(−(x−x0)²/(2σ²) + i p0 x/ħ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    x0: f64,
    p0: f64,
    sigma: f64,
    mass: f64,
    hbar: f64,
}

impl GaussianPacket {
    pub fn new(x0: f64, p0: f64, sigma: f64, mass: f64, hbar: f64) -> Result<Self, PacketError> {
        Ok(Self {
            x0: finite("x0", x0)?,
            p0: finite("p0", p0)?,
            sigma: positive("sigma", sigma)?,
            mass: positive("mass", mass)?,
            hbar: positive("hbar", hbar)?,
        })
    }

    /// Centred at the origin with `σ = m = ħ = 1`.
    pub fn natural(p0: f64) -> Result<Self, PacketError> {
        Self::new(0.0, p0, 1.0, 1.0, 1.0)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Same packet with the mean momentum reversed: the partner particle.
    pub fn mirrored(&self) -> Self {
        Self { x0: -self.x0, p0: -self.p0, ..*self }
    }

    pub fn group_velocity(&self) -> f64 {
        self.p0 / self.mass
    }

    /// `ħt/(mσ²)`, the dimensionless spreading time.
    pub fn chirp(&self, t: f64) -> f64 {
        self.hbar * t / (self.mass * self.sigma * self.sigma)
    }

    pub fn width_at(&self, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let tau = self.hbar * t / self.mass;
        (s2 + tau * tau / s2).sqrt()
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let d = x - self.x0;
        let norm = (PI * self.sigma * self.sigma).powf(-0.25);
        let phase = self.p0 * x / self.hbar;
        Complex64::from_polar(norm * (-d * d / (2.0 * self.sigma * self.sigma)).exp(), phase)
    }

    /// Momentum-space amplitude with the convention
    /// `ψ̃(p) = (2πħ)^{-1/2} ∫ e^{−ipx/ħ} ψ(x) dx`.
    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let h2 = self.hbar * self.hbar;
        let norm = (s2 / (PI * h2)).powf(0.25);
        let dp = p - self.p0;
        let phase = -(p - self.p0) * self.x0 / self.hbar;
        Complex64::from_polar(norm * (-s2 * dp * dp / (2.0 * h2)).exp(), phase)
    }

    pub fn evolve(&self, t: f64) -> EvolvedPacketView {
        EvolvedPacketView {
            packet: *self,
            time: t,
            center: self.x0 + self.group_velocity() * t,
            sigma_t: self.width_at(t),
            chirp: self.chirp(t),
        }
    }
}

/// `U_t G` described by its centre, width and chirp at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolvedPacketView {
    pub packet: GaussianPacket,
    pub time: f64,
    pub center: f64,
    pub sigma_t: f64,
    pub chirp: f64,
}

impl EvolvedPacketView {
    /// `(πσ_t²)^{-1/4} exp(−(x−c)²(1 − iħt/(mσ²))/(2σ_t²) + i p0 x/ħ)`, up to an
    /// `x`-independent phase.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let p = &self.packet;
        let d = x - self.center;
        let s2t = self.sigma_t * self.sigma_t;
        let norm = (PI * s2t).powf(-0.25);
        let re = -d * d / (2.0 * s2t);
        let im = d * d * self.chirp / (2.0 * s2t) + p.p0 * x / p.hbar;
        Complex64::from_polar(norm * re.exp(), im)
    }

    pub fn density(&self, x: f64) -> f64 {
        let d = x - self.center;
        let s2t = self.sigma_t * self.sigma_t;
        (-d * d / s2t).exp() / (PI.sqrt() * self.sigma_t)
    }
}

/// Gaussian detection window `(πΔ²)^{-1/4} exp(−(x−η)²/(2Δ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorWindow {
    eta: f64,
    delta: f64,
}

impl DetectorWindow {
    pub fn new(eta: f64, delta: f64) -> Result<Self, PacketError> {
        Ok(Self { eta: finite("eta", eta)?, delta: positive("delta", delta)? })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mirrored(&self) -> Self {
        Self { eta: -self.eta, ..*self }
    }

    pub fn amplitude(&self, x: f64) -> f64 {
        let d = x - self.eta;
        (PI * self.delta * self.delta).powf(-0.25) * (-d * d / (2.0 * self.delta * self.delta)).exp()
    }
}

/// `L_t = [(σ_t² + Δ²)² + (ħt/m)²(Δ/σ)⁴]^{1/4}`.
pub fn l_t(sigma: f64, delta: f64, t: f64, mass: f64, hbar: f64) -> Result<f64, PacketError> {
    let sigma = positive("sigma", sigma)?;
    let delta = positive("delta", delta)?;
    let mass = positive("mass", mass)?;
    let hbar = positive("hbar", hbar)?;
    let t = finite("t", t)?;
    Ok(l_t_unchecked(sigma, delta, t, mass, hbar))
}

fn l_t_unchecked(sigma: f64, delta: f64, t: f64, mass: f64, hbar: f64) -> f64 {
    let s2 = sigma * sigma;
    let tau = hbar * t / mass;
    let s2t = s2 + tau * tau / s2;
    let ratio2 = delta * delta / s2;
    let a = s2t + delta * delta;
    (a * a + tau * tau * ratio2 * ratio2).sqrt().sqrt()
}

/// `|<U_t G | φ_η>|²` in closed form:
///
/// `2Δσ_t/L_t² · exp(−p0²Δ⁴σ_t²/(ħ²L_t⁴)) · exp(−(η − p0t/m)²(Δ² + σ_t²)/L_t⁴)
///  · exp(−Δ²(p0σ²/ħ + ħtη/(mσ²))²/L_t⁴)`.
///
/// The expression is written for a packet starting at the origin; a packet at
/// `x0` is handled by translating the window to `η − x0`.
pub fn detection_probability_closed(
    packet: &GaussianPacket,
    det: &DetectorWindow,
    t: f64,
) -> Result<f64, PacketError> {
    let t = finite("t", t)?;
    let GaussianPacket { x0, p0, sigma, mass, hbar } = *packet;
    let delta = det.delta;
    let eta = det.eta - x0;

    let s2 = sigma * sigma;
    let d2 = delta * delta;
    let sigma_t = packet.width_at(t);
    let s2t = sigma_t * sigma_t;
    let l = l_t_unchecked(sigma, delta, t, mass, hbar);
    let l2 = l * l;
    let l4 = l2 * l2;

    let prefactor = 2.0 * delta * sigma_t / l2;
    let momentum = p0 * p0 * d2 * d2 * s2t / (hbar * hbar * l4);
    let offset = eta - p0 * t / mass;
    let position = offset * offset * (d2 + s2t) / l4;
    let mixed = p0 * s2 / hbar + hbar * t * eta / (mass * s2);
    let chirp = d2 * mixed * mixed / l4;
    Ok(prefactor * (-(momentum + position + chirp)).exp())
}
