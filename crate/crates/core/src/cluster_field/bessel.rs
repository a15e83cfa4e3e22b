//! Modified Bessel function of the second kind, order one.
//!
//! Below [`K1_SWITCH`] the ascending series
//!
//! `K1(x) = 1/x + ln(x/2) I1(x) − (x/4) Σ_k [ψ(k+1) + ψ(k+2)] (x²/4)^k / (k!(k+1)!)`
//!
//! is summed directly. Above it, the large-argument form
//! `K1(x) = sqrt(π/(2x)) e^{−x} · S(x)` is used, with the factor `S(x)` that
//! the asymptotic series `1 + 3/(8x) − 15/(128x²) + …` approximates obtained
//! instead from Steed's continued fraction, which converges for all `x ≥ 2`.

use serde::{Deserialize, Serialize};

use super::FieldError;

/// Argument at which evaluation switches from the series to the continued fraction.
pub const K1_SWITCH: f64 = 2.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K1Value {
    pub value: f64,
    /// Set when the true value is below the smallest normal `f64`.
    pub underflow: bool,
}

pub fn bessel_k1(x: f64) -> Result<K1Value, FieldError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(FieldError::NonPositiveArgument(x));
    }
    if x < K1_SWITCH {
        return Ok(K1Value { value: k1_series(x), underflow: false });
    }
    let scaled = k1_scaled_large(x);
    let log_value = scaled.ln() - x;
    if log_value < f64::MIN_POSITIVE.ln() {
        return Ok(K1Value { value: 0.0, underflow: true });
    }
    Ok(K1Value { value: scaled * (-x).exp(), underflow: false })
}

/// `e^x K1(x)`, finite for every positive argument.
pub fn bessel_k1_scaled(x: f64) -> Result<f64, FieldError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(FieldError::NonPositiveArgument(x));
    }
    if x < K1_SWITCH {
        Ok(k1_series(x) * x.exp())
    } else {
        Ok(k1_scaled_large(x))
    }
}

pub(crate) fn k1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x²/4)^k / (k!(k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    for k in 0..MAX_TERMS {
        i1_sum += term;
        psi_sum += term * (psi_k1 + psi_k2);
        if term < 1e-17 * i1_sum {
            break;
        }
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 2.0));
        psi_k1 += 1.0 / (kf + 1.0);
        psi_k2 += 1.0 / (kf + 2.0);
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
}

/// Steed's continued fraction (Temme's variant) for `e^x K_0` and `e^x K_1`.
pub(crate) fn k1_scaled_large(x: f64) -> f64 {
    let a1 = 0.25; // 1/4 − μ² with μ = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0_scaled = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    k0_scaled * (x + 0.5 - h) / x
}
