//! Spatially resolved CHSH experiment: two packets with momenta `±p0` leave
//! the origin, each is registered by a Gaussian window, and the spin pair is
//! in the singlet.
//!
//! Every mean value factorizes into a spatial part, the joint detection
//! probability `|<U_t G_{p0}|φ_η>|² |<U_t G_{−p0}|φ_{−η}>|²`, times the spin
//! correlator. Where the windows sit at time `t` is decided by a
//! [`DetectorStrategy`].

mod montecarlo;
mod significance;

pub use montecarlo::{
    estimate_chsh, estimate_chsh_with, sample_correlator, sample_run, CorrelatorSample, LhvSource, OutcomeSource,
    RunRecord, SingletSource, CHUNK_TRIALS, WORDS_PER_TRIAL,
};
pub use significance::{
    coincidences_for_significance, scaling_exponent, trials_for_significance, TrialRequirement,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spin_chsh::{chsh_value, singlet_state, spin_correlator, ChshSetting, SpinDirection};
use crate::wavepacket::{detection_probability_closed, DetectorWindow, GaussianPacket, PacketError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("detector schedule covers [{start}, {end}], not t = {t}")]
    ScheduleNotCovering { t: f64, start: f64, end: f64 },
    #[error("schedule times must be finite and strictly increasing")]
    BadSchedule,
    #[error("setting gives |S| = {0}, which does not exceed the classical bound")]
    NoViolation(f64),
}

/// Where the `+p0` particle's window sits at time `t`; the partner window is
/// always its mirror image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DetectorStrategy {
    /// Fixed at `η` for all times.
    Static { eta: f64 },
    /// Follows the ballistic centre `η(t) = (p0/m) t`.
    Adaptive,
    /// Piecewise-linear interpolation through `(time, η)` knots.
    Schedule(Vec<(f64, f64)>),
}

impl DetectorStrategy {
    pub fn schedule(points: Vec<(f64, f64)>) -> Result<Self, ExperimentError> {
        if points.is_empty()
            || points.iter().any(|(t, e)| !t.is_finite() || !e.is_finite())
            || points.windows(2).any(|w| w[1].0 <= w[0].0)
        {
            return Err(ExperimentError::BadSchedule);
        }
        Ok(Self::Schedule(points))
    }

    pub fn eta_at(&self, p0: f64, mass: f64, t: f64) -> Result<f64, ExperimentError> {
        match self {
            Self::Static { eta } => Ok(*eta),
            Self::Adaptive => Ok(p0 / mass * t),
            Self::Schedule(points) => {
                let (start, end) = (points[0].0, points[points.len() - 1].0);
                if !(start..=end).contains(&t) {
                    return Err(ExperimentError::ScheduleNotCovering { t, start, end });
                }
                let i = points.partition_point(|(ti, _)| *ti <= t);
                if i == points.len() {
                    return Ok(points[i - 1].1);
                }
                let (t0, e0) = points[i - 1];
                let (t1, e1) = points[i];
                Ok(e0 + (e1 - e0) * (t - t0) / (t1 - t0))
            }
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        match self {
            Self::Static { eta } if !eta.is_finite() => {
                Err(ExperimentError::InvalidConfig(format!("static eta {eta} is not finite")))
            }
            Self::Schedule(points) => Self::schedule(points.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Complete parameter bundle for sweeps and Monte Carlo runs.
///
/// `trials` counts repetitions per analyser pair; a CHSH estimate uses four pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sigma: f64,
    pub delta: f64,
    pub p0: f64,
    pub mass: f64,
    pub hbar: f64,
    pub setting: ChshSetting,
    pub strategy: DetectorStrategy,
    pub times: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    /// `σ = Δ = m = ħ = 1`, `p0 = 1`, maximal-violation directions, adaptive windows.
    fn default() -> Self {
        Self {
            sigma: 1.0,
            delta: 1.0,
            p0: 1.0,
            mass: 1.0,
            hbar: 1.0,
            setting: ChshSetting::maximal_violation(),
            strategy: DetectorStrategy::Adaptive,
            times: vec![0.0],
            trials: 10_000,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        for (name, v) in [("sigma", self.sigma), ("delta", self.delta), ("mass", self.mass), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ExperimentError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.p0.is_finite() {
            return Err(ExperimentError::InvalidConfig(format!("p0 must be finite, got {}", self.p0)));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(ExperimentError::InvalidConfig("times must be nonempty and nonnegative".into()));
        }
        if self.trials == 0 {
            return Err(ExperimentError::InvalidConfig("trials must be at least 1".into()));
        }
        self.strategy.validate()
    }

    pub fn packet(&self) -> Result<GaussianPacket, ExperimentError> {
        Ok(GaussianPacket::new(0.0, self.p0, self.sigma, self.mass, self.hbar)?)
    }

    /// Window of the `+p0` particle at time `t`.
    pub fn window(&self, t: f64) -> Result<DetectorWindow, ExperimentError> {
        let eta = self.strategy.eta_at(self.p0, self.mass, t)?;
        Ok(DetectorWindow::new(eta, self.delta)?)
    }

    pub fn with_strategy(&self, strategy: DetectorStrategy) -> Self {
        Self { strategy, ..self.clone() }
    }
}

/// Single-side detection probabilities `(p_+, p_−)` at time `t`.
pub fn side_probabilities(cfg: &ExperimentConfig, t: f64) -> Result<(f64, f64), ExperimentError> {
    cfg.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(ExperimentError::InvalidConfig(format!("time must be nonnegative, got {t}")));
    }
    let packet = cfg.packet()?;
    let window = cfg.window(t)?;
    let plus = detection_probability_closed(&packet, &window, t)?;
    let minus = detection_probability_closed(&packet.mirrored(), &window.mirrored(), t)?;
    Ok((plus, minus))
}

pub fn joint_detection_probability(cfg: &ExperimentConfig, t: f64) -> Result<f64, ExperimentError> {
    let (plus, minus) = side_probabilities(cfg, t)?;
    Ok(plus * minus)
}

/// Spatial × spin mean value `p_joint(t) · <(σ·a)⊗(σ·b)>_singlet`.
pub fn damped_correlator(
    cfg: &ExperimentConfig,
    t: f64,
    a: &SpinDirection,
    b: &SpinDirection,
) -> Result<f64, ExperimentError> {
    Ok(joint_detection_probability(cfg, t)? * spin_correlator(&singlet_state(), a, b))
}

/// `p_joint(t) · S_singlet(setting)`; exceeds 2 only while `p_joint > 2/|S|`.
pub fn damped_chsh(cfg: &ExperimentConfig, t: f64) -> Result<f64, ExperimentError> {
    Ok(joint_detection_probability(cfg, t)? * chsh_value(&singlet_state(), &cfg.setting))
}
