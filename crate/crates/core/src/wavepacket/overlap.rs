use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{finite, positive, PacketError};

const GRID_TOL: f64 = 1e-12;
const LATTICE_TOL: f64 = 1e-9;

/// Complex samples `f(x_min + j·dx)`; the function is taken to vanish off the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    x_min: f64,
    dx: f64,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(x_min: f64, dx: f64, values: Vec<Complex64>) -> Result<Self, PacketError> {
        finite("x_min", x_min)?;
        positive("dx", dx)?;
        if values.is_empty() {
            return Err(PacketError::BadGrid("no samples".into()));
        }
        Ok(Self { x_min, dx, values })
    }

    pub fn from_fn(x_min: f64, dx: f64, points: usize, f: impl Fn(f64) -> Complex64) -> Result<Self, PacketError> {
        let values = (0..points).map(|j| f(x_min + j as f64 * dx)).collect();
        Self::new(x_min, dx, values)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    fn same_grid(&self, other: &Self) -> bool {
        let scale = self.dx.max(1.0);
        self.values.len() == other.values.len()
            && (self.dx - other.dx).abs() <= GRID_TOL * scale
            && (self.x_min - other.x_min).abs() <= GRID_TOL * scale.max(self.x_min.abs())
    }
}

/// `∫ f(x + y) g*(x) dx` for two functions sampled on the same grid.
///
/// Shifts that are whole multiples of the step are applied by reindexing, so
/// functions whose shifted supports are disjoint give exactly zero. Other
/// shifts use band-limited interpolation through the momentum representation
/// `∫ e^{iky} f̃(k) g̃*(k) dk` on a zero-padded grid.
pub fn riemann_lebesgue_overlap(f: &SampledFunction, g: &SampledFunction, y: f64) -> Result<Complex64, PacketError> {
    let y = finite("y", y)?;
    if !f.same_grid(g) {
        return Err(PacketError::GridMismatch);
    }
    let n = f.len();
    let shift = y / f.dx;
    if shift.abs() >= n as f64 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let nearest = shift.round();
    if (shift - nearest).abs() <= LATTICE_TOL {
        let s = nearest as i64;
        let sum: Complex64 = (0..n as i64)
            .filter_map(|j| {
                let i = j + s;
                (0..n as i64).contains(&i).then(|| f.values[i as usize] * g.values[j as usize].conj())
            })
            .sum();
        return Ok(sum * f.dx);
    }

    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let padded = |v: &[Complex64]| {
        let mut out = v.to_vec();
        out.resize(m, Complex64::new(0.0, 0.0));
        out
    };
    let mut ff = padded(&f.values);
    let mut gg = padded(&g.values);
    fft.process(&mut ff);
    fft.process(&mut gg);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let weight = ff[k] * gg[k].conj();
        if k == m / 2 {
            // Nyquist term: real interpolant
            sum += weight * (std::f64::consts::PI * shift).cos();
        } else {
            let signed = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
            sum += weight * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * signed * shift / m as f64);
        }
    }
    Ok(sum * f.dx / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(sigma: f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new((PI * sigma * sigma).powf(-0.25) * (-x * x / (2.0 * sigma * sigma)).exp(), 0.0)
    }

    #[test]
    fn normalized_self_overlap() {
        let f = SampledFunction::from_fn(-15.0, 0.01, 3000, gaussian(1.0)).unwrap();
        let v = riemann_lebesgue_overlap(&f, &f, 0.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_shift_oracle() {
        let sigma = 1.3;
        let f = SampledFunction::from_fn(-30.0, 0.02, 3000, gaussian(sigma)).unwrap();
        for y in [0.5, 1.0, 2.5, 4.0, 8.0] {
            let v = riemann_lebesgue_overlap(&f, &f, y).unwrap();
            let expected = (-y * y / (4.0 * sigma * sigma)).exp();
            assert!((v.re - expected).abs() < 1e-8 && v.im.abs() < 1e-8, "lattice y={y}: {v}");
        }
        for y in [0.513, 1.2345, 3.0001, 7.777] {
            let v = riemann_lebesgue_overlap(&f, &f, y).unwrap();
            let expected = (-y * y / (4.0 * sigma * sigma)).exp();
            assert!((v - expected).norm() < 1e-8, "interpolated y={y}: {v} vs {expected}");
        }
    }

    #[test]
    fn disjoint_supports_vanish() {
        let bump = |x: f64| {
            if x.abs() < 1.0 {
                Complex64::new((1.0 - x * x).powi(2), 0.3 * x)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let f = SampledFunction::from_fn(-5.0, 0.01, 1000, bump).unwrap();
        assert!(riemann_lebesgue_overlap(&f, &f, 0.0).unwrap().norm() > 0.1);
        assert_eq!(riemann_lebesgue_overlap(&f, &f, 2.5).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(riemann_lebesgue_overlap(&f, &f, -3.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(riemann_lebesgue_overlap(&f, &f, 100.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oscillating_overlap_decays() {
        // a momentum-kicked packet against a resting one: decays with the shift
        let f = SampledFunction::from_fn(-40.0, 0.02, 4000, |x| gaussian(1.0)(x) * Complex64::from_polar(1.0, 2.0 * x))
            .unwrap();
        let g = SampledFunction::from_fn(-40.0, 0.02, 4000, gaussian(1.5)).unwrap();
        let mags: Vec<f64> = [0.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|y| riemann_lebesgue_overlap(&f, &g, *y).unwrap().norm())
            .collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]));
        assert!(mags[4] < 1e-10);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let f = SampledFunction::from_fn(-5.0, 0.01, 1000, gaussian(1.0)).unwrap();
        let g = SampledFunction::from_fn(-5.0, 0.02, 500, gaussian(1.0)).unwrap();
        assert!(matches!(riemann_lebesgue_overlap(&f, &g, 0.0), Err(PacketError::GridMismatch)));
        let h = SampledFunction::from_fn(-4.0, 0.01, 1000, gaussian(1.0)).unwrap();
        assert!(matches!(riemann_lebesgue_overlap(&f, &h, 0.0), Err(PacketError::GridMismatch)));
    }
}
