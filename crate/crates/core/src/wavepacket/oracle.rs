//! Spectral propagation on a periodic grid, used as an independent check of
//! the closed-form detection probability.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::PI;

use super::{finite, DetectorWindow, GaussianPacket, PacketError};

/// Largest probability mass allowed to fall outside the grid.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;
/// Upper bound on grid size accepted by [`GridSpec::auto`].
pub const MAX_GRID_POINTS: usize = 1 << 24;

const AUTO_WIDTHS: f64 = 10.0;
const STEPS_PER_WIDTH: f64 = 16.0;
const MOMENTUM_WIDTHS: f64 = 6.0;

/// Uniform periodic grid `x_j = x_min + j·(x_max − x_min)/points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self, PacketError> {
        finite("x_min", x_min)?;
        finite("x_max", x_max)?;
        if x_max <= x_min {
            return Err(PacketError::BadGrid(format!("x_max {x_max} must exceed x_min {x_min}")));
        }
        if points < 16 {
            return Err(PacketError::BadGrid(format!("{points} points is too few")));
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Covers ten widths around the initial packet, the evolved packet and
    /// the window, with a power-of-two number of points.
    pub fn auto(packet: &GaussianPacket, det: &DetectorWindow, t: f64) -> Result<Self, PacketError> {
        let view = packet.evolve(t);
        let spans = [
            (packet.x0(), packet.sigma()),
            (view.center, view.sigma_t),
            (det.eta(), det.delta()),
        ];
        let x_min = spans.iter().map(|(c, w)| c - AUTO_WIDTHS * w).fold(f64::INFINITY, f64::min);
        let x_max = spans.iter().map(|(c, w)| c + AUTO_WIDTHS * w).fold(f64::NEG_INFINITY, f64::max);
        let dx = required_step(packet, det);
        let needed = ((x_max - x_min) / dx).ceil() as usize;
        let points = needed.max(16).next_power_of_two();
        if points > MAX_GRID_POINTS {
            return Err(PacketError::GridTooLarge { needed: points, limit: MAX_GRID_POINTS });
        }
        Self::new(x_min, x_max, points)
    }

    /// Same span with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { points: self.points * 2, ..*self }
    }

    fn wavenumber(&self, k: usize) -> f64 {
        let n = self.points as i64;
        let k = k as i64;
        let signed = if k <= n / 2 { k } else { k - n };
        2.0 * PI * signed as f64 / (self.x_max - self.x_min)
    }
}

fn required_step(packet: &GaussianPacket, det: &DetectorWindow) -> f64 {
    let spatial = packet.sigma().min(det.delta()) / STEPS_PER_WIDTH;
    let p_max = packet.p0().abs() + MOMENTUM_WIDTHS * packet.hbar() / packet.sigma();
    let spectral = PI * packet.hbar() / p_max;
    spatial.min(spectral)
}

/// Mass of a Gaussian density `∝ exp(−(x−c)²/w²)` outside `[a, b]`.
fn gaussian_tail(center: f64, w: f64, a: f64, b: f64) -> f64 {
    0.5 * erfc((center - a) / w) + 0.5 * erfc((b - center) / w)
}

fn check_grid(packet: &GaussianPacket, det: &DetectorWindow, t: f64, grid: &GridSpec) -> Result<(), PacketError> {
    let dx = grid.dx();
    let limit = packet.sigma().min(det.delta()) / STEPS_PER_WIDTH;
    if dx > limit * (1.0 + 1e-12) {
        return Err(PacketError::GridTooCoarse { dx, limit, what: "the narrowest width" });
    }
    let p_max = packet.p0().abs() + MOMENTUM_WIDTHS * packet.hbar() / packet.sigma();
    let limit = PI * packet.hbar() / p_max;
    if dx > limit {
        return Err(PacketError::GridTooCoarse { dx, limit, what: "the momentum content" });
    }
    let view = packet.evolve(t);
    let (a, b) = (grid.x_min, grid.x_max);
    let mass = gaussian_tail(packet.x0(), packet.sigma(), a, b)
        .max(gaussian_tail(view.center, view.sigma_t, a, b))
        .max(gaussian_tail(det.eta(), det.delta(), a, b));
    if mass > TAIL_MASS_LIMIT {
        return Err(PacketError::GridTailMass { mass, x_min: a, x_max: b });
    }
    Ok(())
}

/// Propagates the sampled initial packet by the exact free phase
/// `exp(−iħk²t/(2m))` in Fourier space and returns `|Σ_j φ(x_j)ψ_t(x_j) dx|²`.
pub fn detection_probability_numeric(
    packet: &GaussianPacket,
    det: &DetectorWindow,
    t: f64,
    grid: &GridSpec,
) -> Result<f64, PacketError> {
    let t = finite("t", t)?;
    check_grid(packet, det, t, grid)?;
    let n = grid.points;
    let mut psi: Vec<Complex64> = (0..n).map(|j| packet.amplitude(grid.x(j))).collect();

    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut psi);
    let scale = packet.hbar() * t / (2.0 * packet.mass());
    for (k, c) in psi.iter_mut().enumerate() {
        let kk = grid.wavenumber(k);
        *c *= Complex64::from_polar(1.0 / n as f64, -scale * kk * kk);
    }
    planner.plan_fft_inverse(n).process(&mut psi);

    let dx = grid.dx();
    let overlap: Complex64 = psi.iter().enumerate().map(|(j, c)| c * det.amplitude(grid.x(j))).sum::<Complex64>() * dx;
    Ok(overlap.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::super::detection_probability_closed;
    use super::*;

    #[test]
    fn identical_states() {
        let p = GaussianPacket::natural(0.0).unwrap();
        let d = DetectorWindow::new(0.0, 1.0).unwrap();
        let g = GridSpec::auto(&p, &d, 0.0).unwrap();
        let v = detection_probability_numeric(&p, &d, 0.0, &g).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn evolved_amplitude_matches_propagation() {
        // third route: quadrature of the analytic evolved packet
        let p = GaussianPacket::new(0.0, 1.5, 1.0, 1.0, 1.0).unwrap();
        let d = DetectorWindow::new(4.0, 0.5).unwrap();
        let t = 3.0;
        let g = GridSpec::auto(&p, &d, t).unwrap();
        let view = p.evolve(t);
        let dx = g.dx();
        let direct: Complex64 = (0..g.points).map(|j| view.amplitude(g.x(j)) * d.amplitude(g.x(j))).sum::<Complex64>() * dx;
        let numeric = detection_probability_numeric(&p, &d, t, &g).unwrap();
        assert!((direct.norm_sqr() / numeric - 1.0).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_closed_form() {
        let p = GaussianPacket::natural(1.0).unwrap();
        for (eta, delta, t) in [(0.0, 1.0, 0.0), (1.0, 0.25, 1.0), (10.0, 2.0, 10.0), (3.0, 1.0, 5.0)] {
            let d = DetectorWindow::new(eta, delta).unwrap();
            let g = GridSpec::auto(&p, &d, t).unwrap();
            let num = detection_probability_numeric(&p, &d, t, &g).unwrap();
            let closed = detection_probability_closed(&p, &d, t).unwrap();
            assert!((num / closed - 1.0).abs() < 1e-9, "{eta} {delta} {t}: {num} vs {closed}");
        }
    }

    #[test]
    fn refinement_converges() {
        let p = GaussianPacket::natural(3.0).unwrap();
        let d = DetectorWindow::new(3.0, 0.25).unwrap();
        let g = GridSpec::auto(&p, &d, 1.0).unwrap();
        let a = detection_probability_numeric(&p, &d, 1.0, &g).unwrap();
        let b = detection_probability_numeric(&p, &d, 1.0, &g.refined()).unwrap();
        assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn insufficient_grids_reported() {
        let p = GaussianPacket::natural(1.0).unwrap();
        let d = DetectorWindow::new(0.0, 1.0).unwrap();
        let narrow = GridSpec::new(-3.0, 3.0, 1024).unwrap();
        assert!(matches!(
            detection_probability_numeric(&p, &d, 0.0, &narrow),
            Err(PacketError::GridTailMass { .. })
        ));
        let coarse = GridSpec::new(-20.0, 20.0, 64).unwrap();
        assert!(matches!(
            detection_probability_numeric(&p, &d, 0.0, &coarse),
            Err(PacketError::GridTooCoarse { .. })
        ));
        // packet runs off the grid by t = 50
        let g = GridSpec::new(-20.0, 20.0, 1024).unwrap();
        assert!(detection_probability_numeric(&p, &d, 0.0, &g).is_ok());
        assert!(matches!(
            detection_probability_numeric(&p, &d, 50.0, &g),
            Err(PacketError::GridTailMass { .. })
        ));
        assert!(GridSpec::new(1.0, 0.0, 64).is_err());
    }
}
