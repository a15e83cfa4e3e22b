//! Event-by-event simulation of the detection-gated CHSH experiment.
//!
//! Randomness is counter based: analyser pair `(i, j)` reads ChaCha8 stream
//! `2i + j`, and trial `n` starts at word `n · WORDS_PER_TRIAL`. Each chunk of
//! trials seeks to its own offset, so the tallies do not depend on how rayon
//! schedules the chunks or on the size of the thread pool.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{side_probabilities, ExperimentConfig, ExperimentError};
use crate::spin_chsh::{ChshSetting, LhvModel, SpinDirection};

/// 32-bit words consumed per trial (four `u64` draws).
pub const WORDS_PER_TRIAL: u64 = 8;
/// Trials per parallel work item.
pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Produces `±1` outcome pairs for an analyser pair from two uniform variates.
pub trait OutcomeSource: Sync {
    fn outcomes(&self, alice: usize, bob: usize, u: [f64; 2]) -> (i8, i8);
}

/// Singlet statistics: `P(s1, s2) = (1 − s1 s2 a·b)/4`.
///
/// Alice's outcome is fair, Bob's is anti-aligned with probability `(1 + a·b)/2`,
/// which reproduces the marginals and the correlator `−a·b`.
#[derive(Debug, Clone, Copy)]
pub struct SingletSource {
    dots: [[f64; 2]; 2],
}

impl SingletSource {
    pub fn new(setting: &ChshSetting) -> Self {
        let mut dots = [[0.0; 2]; 2];
        for (i, row) in dots.iter_mut().enumerate() {
            for (j, d) in row.iter_mut().enumerate() {
                *d = setting.alice(i).dot(&setting.bob(j));
            }
        }
        Self { dots }
    }
}

impl OutcomeSource for SingletSource {
    fn outcomes(&self, alice: usize, bob: usize, u: [f64; 2]) -> (i8, i8) {
        let s1 = if u[0] < 0.5 { 1 } else { -1 };
        let anti = u[1] < 0.5 * (1.0 + self.dots[alice][bob]);
        (s1, if anti { -s1 } else { s1 })
    }
}

/// Draws a hidden state per trial and reads off its predetermined outcomes.
#[derive(Debug, Clone)]
pub struct LhvSource {
    model: LhvModel,
}

impl LhvSource {
    pub fn new(model: LhvModel) -> Self {
        Self { model }
    }
}

impl OutcomeSource for LhvSource {
    fn outcomes(&self, alice: usize, bob: usize, u: [f64; 2]) -> (i8, i8) {
        let lambda = self.model.sample(u[0]);
        (lambda.alice(alice).sign(), lambda.bob(bob).sign())
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    trials: u64,
    coincidences: u64,
    product_sum: i64,
}

impl Tally {
    fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            coincidences: self.coincidences + other.coincidences,
            product_sum: self.product_sum + other.product_sum,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Statistics for one analyser pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSample {
    pub alice: usize,
    pub bob: usize,
    pub trials: u64,
    pub coincidences: u64,
    pub product_sum: i64,
    /// Mean product over coincidences; `None` when nothing was detected.
    pub correlator: Option<f64>,
    pub std_error: Option<f64>,
    /// Mean product over all trials with non-detections scored 0; estimates the damped correlator.
    pub unconditional: f64,
}

impl CorrelatorSample {
    fn from_tally(alice: usize, bob: usize, t: Tally) -> Self {
        let (correlator, std_error) = if t.coincidences == 0 {
            (None, None)
        } else {
            let n = t.coincidences as f64;
            let e = t.product_sum as f64 / n;
            (Some(e), Some(((1.0 - e * e).max(0.0) / n).sqrt()))
        };
        Self {
            alice,
            bob,
            trials: t.trials,
            coincidences: t.coincidences,
            product_sum: t.product_sum,
            correlator,
            std_error,
            unconditional: t.product_sum as f64 / t.trials as f64,
        }
    }
}

fn run_pair<S: OutcomeSource + ?Sized>(
    source: &S,
    alice: usize,
    bob: usize,
    p_plus: f64,
    p_minus: f64,
    trials: u64,
    seed: u64,
) -> CorrelatorSample {
    let stream = (2 * alice + bob) as u64;
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_TRIALS;
            let count = CHUNK_TRIALS.min(trials - start);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            rng.set_word_pos(start as u128 * WORDS_PER_TRIAL as u128);
            let mut t = Tally { trials: count, ..Default::default() };
            for _ in 0..count {
                let hit_plus = uniform(&mut rng) < p_plus;
                let hit_minus = uniform(&mut rng) < p_minus;
                let u = [uniform(&mut rng), uniform(&mut rng)];
                if hit_plus && hit_minus {
                    let (s1, s2) = source.outcomes(alice, bob, u);
                    t.coincidences += 1;
                    t.product_sum += (s1 * s2) as i64;
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    CorrelatorSample::from_tally(alice, bob, tally)
}

fn check_time(t: f64) -> Result<(), ExperimentError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(ExperimentError::InvalidConfig(format!("time must be nonnegative, got {t}")))
    }
}

/// `cfg.trials` repetitions for a single analyser pair `(a_alice, b_bob)` of
/// `cfg.setting`, with singlet spin statistics.
pub fn sample_correlator<S: OutcomeSource + ?Sized>(
    cfg: &ExperimentConfig,
    t: f64,
    source: &S,
    alice: usize,
    bob: usize,
) -> Result<CorrelatorSample, ExperimentError> {
    check_time(t)?;
    if alice > 1 || bob > 1 {
        return Err(ExperimentError::InvalidConfig(format!("analyser pair ({alice}, {bob}) out of range")));
    }
    let (p_plus, p_minus) = side_probabilities(cfg, t)?;
    Ok(run_pair(source, alice, bob, p_plus, p_minus, cfg.trials, cfg.seed))
}

/// One run with arbitrary analyser directions `a` and `b`.
pub fn sample_run(
    cfg: &ExperimentConfig,
    t: f64,
    a: &SpinDirection,
    b: &SpinDirection,
) -> Result<CorrelatorSample, ExperimentError> {
    let setting = ChshSetting::new(*a, *a, *b, *b);
    sample_correlator(cfg, t, &SingletSource::new(&setting), 0, 0)
}

/// Summary of a four-setting CHSH run at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub time: f64,
    pub eta: f64,
    pub p_side_plus: f64,
    pub p_side_minus: f64,
    pub p_joint: f64,
    /// `p_joint · S_quantum`.
    pub damped_chsh: f64,
    /// Total over the four analyser pairs.
    pub trials: u64,
    pub coincidences: u64,
    pub e11: Option<f64>,
    pub e12: Option<f64>,
    pub e21: Option<f64>,
    pub e22: Option<f64>,
    /// CHSH combination of the coincidence-conditioned correlators.
    pub empirical_chsh: Option<f64>,
    pub std_error: Option<f64>,
    /// CHSH combination of the unconditional correlators.
    pub unconditional_chsh: f64,
    /// At least one analyser pair recorded no coincidences.
    pub zero_coincidences: bool,
}

pub fn estimate_chsh(cfg: &ExperimentConfig, t: f64) -> Result<RunRecord, ExperimentError> {
    estimate_chsh_with(cfg, t, &SingletSource::new(&cfg.setting))
}

pub fn estimate_chsh_with<S: OutcomeSource + ?Sized>(
    cfg: &ExperimentConfig,
    t: f64,
    source: &S,
) -> Result<RunRecord, ExperimentError> {
    check_time(t)?;
    let (p_plus, p_minus) = side_probabilities(cfg, t)?;
    let eta = cfg.strategy.eta_at(cfg.p0, cfg.mass, t)?;
    let samples: Vec<CorrelatorSample> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(i, j)| run_pair(source, i, j, p_plus, p_minus, cfg.trials, cfg.seed))
        .collect();

    let signs = [1.0, 1.0, 1.0, -1.0];
    let zero = samples.iter().any(|s| s.coincidences == 0);
    let (empirical_chsh, std_error) = if zero {
        (None, None)
    } else {
        let s = samples.iter().zip(signs).map(|(c, g)| g * c.correlator.unwrap_or(0.0)).sum();
        let var: f64 = samples.iter().map(|c| c.std_error.unwrap_or(0.0).powi(2)).sum();
        (Some(s), Some(var.sqrt()))
    };
    let p_joint = p_plus * p_minus;
    let s_quantum = crate::spin_chsh::chsh_value(&crate::spin_chsh::singlet_state(), &cfg.setting);
    Ok(RunRecord {
        time: t,
        eta,
        p_side_plus: p_plus,
        p_side_minus: p_minus,
        p_joint,
        damped_chsh: p_joint * s_quantum,
        trials: samples.iter().map(|s| s.trials).sum(),
        coincidences: samples.iter().map(|s| s.coincidences).sum(),
        e11: samples[0].correlator,
        e12: samples[1].correlator,
        e21: samples[2].correlator,
        e22: samples[3].correlator,
        empirical_chsh,
        std_error,
        unconditional_chsh: samples.iter().zip(signs).map(|(c, g)| g * c.unconditional).sum(),
        zero_coincidences: zero,
    })
}
