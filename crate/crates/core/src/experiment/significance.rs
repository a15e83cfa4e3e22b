use serde::{Deserialize, Serialize};

use super::{joint_detection_probability, ExperimentConfig, ExperimentError};
use crate::spin_chsh::{chsh_value, singlet_state, spin_correlator, ChshSetting};

/// Run length needed to separate the conditioned CHSH estimate from 2 by `k`
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRequirement {
    pub time: f64,
    pub k: f64,
    pub p_joint: f64,
    pub coincidences_per_setting: f64,
    /// `None` when the joint detection probability is zero.
    pub trials_per_setting: Option<f64>,
    pub trials_per_setting_ceil: Option<u64>,
    pub total_trials: Option<f64>,
    pub unreachable: bool,
}

/// Coincidences per analyser pair so that `(|S| − 2)/SE(Ŝ) ≥ k`, where the
/// standard error of each conditioned correlator is `sqrt((1 − E²)/n)`.
pub fn coincidences_for_significance(setting: &ChshSetting, k: f64) -> Result<f64, ExperimentError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(ExperimentError::InvalidConfig(format!("significance k must be positive, got {k}")));
    }
    let rho = singlet_state();
    let s = chsh_value(&rho, setting);
    let excess = s.abs() - 2.0;
    if excess <= 0.0 {
        return Err(ExperimentError::NoViolation(s));
    }
    let variance: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| 1.0 - spin_correlator(&rho, &setting.alice(i), &setting.bob(j)).powi(2))
        .sum();
    Ok(k * k * variance / (excess * excess))
}

pub fn trials_for_significance(cfg: &ExperimentConfig, t: f64, k: f64) -> Result<TrialRequirement, ExperimentError> {
    let n = coincidences_for_significance(&cfg.setting, k)?;
    let p_joint = joint_detection_probability(cfg, t)?;
    let unreachable = p_joint <= 0.0;
    let per_setting = (!unreachable).then(|| n / p_joint).filter(|v| v.is_finite());
    Ok(TrialRequirement {
        time: t,
        k,
        p_joint,
        coincidences_per_setting: n,
        trials_per_setting: per_setting,
        trials_per_setting_ceil: per_setting.filter(|v| *v < u64::MAX as f64).map(|v| v.ceil() as u64),
        total_trials: per_setting.map(|v| 4.0 * v),
        unreachable: unreachable || per_setting.is_none(),
    })
}

/// Least-squares slope of `ln N` against `ln t`.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<f64, ExperimentError> {
    if points.len() < 2 {
        return Err(ExperimentError::InvalidConfig("need at least two points for a scaling fit".into()));
    }
    if points.iter().any(|(t, n)| !(t.is_finite() && *t > 0.0 && n.is_finite() && *n > 0.0)) {
        return Err(ExperimentError::InvalidConfig("scaling fit needs positive finite values".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, n)| (t.ln(), n.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ExperimentError::InvalidConfig("scaling fit needs distinct times".into()));
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
