use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpinError;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A classical ±1 measurement result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn from_sign(v: i64) -> Result<Self, SpinError> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(SpinError::BadOutcome(other)),
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.sign())
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// Predetermined results `a1(λ), a2(λ), b1(λ), b2(λ)` of one hidden state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalAssignment {
    pub a1: Outcome,
    pub a2: Outcome,
    pub b1: Outcome,
    pub b2: Outcome,
}

impl LocalAssignment {
    /// Bit `k` of `pattern` set means the k-th of (a1, a2, b1, b2) is −1.
    pub fn from_pattern(pattern: u8) -> Self {
        let o = |bit: u8| if pattern >> bit & 1 == 1 { Outcome::Minus } else { Outcome::Plus };
        Self { a1: o(0), a2: o(1), b1: o(2), b2: o(3) }
    }

    pub fn from_signs(signs: [i64; 4]) -> Result<Self, SpinError> {
        Ok(Self {
            a1: Outcome::from_sign(signs[0])?,
            a2: Outcome::from_sign(signs[1])?,
            b1: Outcome::from_sign(signs[2])?,
            b2: Outcome::from_sign(signs[3])?,
        })
    }

    pub fn alice(&self, i: usize) -> Outcome {
        if i == 0 {
            self.a1
        } else {
            self.a2
        }
    }

    pub fn bob(&self, j: usize) -> Outcome {
        if j == 0 {
            self.b1
        } else {
            self.b2
        }
    }

    /// Flips all four outcomes; every product, hence the CHSH value, is unchanged.
    pub fn flipped(&self) -> Self {
        Self { a1: self.a1.flipped(), a2: self.a2.flipped(), b1: self.b1.flipped(), b2: self.b2.flipped() }
    }

    /// Flips Bob's outcomes only, which negates every correlator.
    pub fn bob_flipped(&self) -> Self {
        Self { b1: self.b1.flipped(), b2: self.b2.flipped(), ..*self }
    }

    /// `a1(b1 + b2) + a2(b1 − b2)`, always ±2.
    pub fn chsh(&self) -> f64 {
        let (a1, a2, b1, b2) = (self.a1.value(), self.a2.value(), self.b1.value(), self.b2.value());
        a1 * (b1 + b2) + a2 * (b1 - b2)
    }
}

/// A finite local hidden variable model: weights `p(λ)` and assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    weights: Vec<f64>,
    assignments: Vec<LocalAssignment>,
    cumulative: Vec<f64>,
}

impl LhvModel {
    pub fn new(weights: Vec<f64>, assignments: Vec<LocalAssignment>) -> Result<Self, SpinError> {
        if weights.len() != assignments.len() {
            return Err(SpinError::LengthMismatch { weights: weights.len(), assignments: assignments.len() });
        }
        if weights.is_empty() {
            return Err(SpinError::EmptySupport);
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(SpinError::BadWeights(sum));
        }
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Self { weights, assignments, cumulative })
    }

    /// Raw `[a1, a2, b1, b2]` sign rows; every entry must be exactly ±1.
    pub fn from_signs(weights: Vec<f64>, rows: &[[i64; 4]]) -> Result<Self, SpinError> {
        let assignments = rows.iter().map(|r| LocalAssignment::from_signs(*r)).collect::<Result<_, _>>()?;
        Self::new(weights, assignments)
    }

    pub fn deterministic(assignment: LocalAssignment) -> Self {
        Self::new(vec![1.0], vec![assignment]).expect("single point model is valid")
    }

    /// Random support of 1..=`max_support` hidden states with uniform-then-normalized
    /// weights and independent fair ±1 assignments.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_support: usize) -> Self {
        let n = rng.random_range(1..=max_support.max(1));
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + f64::EPSILON).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        let assignments = (0..n).map(|_| LocalAssignment::from_pattern(rng.random::<u8>() & 0x0f)).collect();
        Self::new(weights, assignments).expect("normalized random model is valid")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn assignments(&self) -> &[LocalAssignment] {
        &self.assignments
    }

    /// Inverse-CDF draw of a hidden state from a uniform variate in [0, 1).
    pub fn sample(&self, u: f64) -> &LocalAssignment {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let target = u * total;
        let idx = self.cumulative.partition_point(|c| *c <= target).min(self.assignments.len() - 1);
        &self.assignments[idx]
    }

    /// Uniform mixture of this model and its copy with Bob's outcomes flipped.
    pub fn balanced(&self) -> Self {
        let mut weights: Vec<f64> = self.weights.iter().map(|w| 0.5 * w).collect();
        weights.extend(self.weights.iter().map(|w| 0.5 * w));
        let mut assignments = self.assignments.clone();
        assignments.extend(self.assignments.iter().map(LocalAssignment::bob_flipped));
        Self::new(weights, assignments).expect("halved weights still sum to one")
    }
}

/// `Σ_λ p(λ)[a1(λ)(b1(λ)+b2(λ)) + a2(λ)(b1(λ)−b2(λ))]`.
pub fn lhv_chsh_value(model: &LhvModel) -> f64 {
    model.weights.iter().zip(&model.assignments).map(|(w, a)| w * a.chsh()).sum()
}

/// All 16 deterministic strategies with their CHSH value.
pub fn lhv_extremal_scan() -> Vec<(LocalAssignment, f64)> {
    (0u8..16)
        .map(|p| {
            let a = LocalAssignment::from_pattern(p);
            (a, a.chsh())
        })
        .collect()
}

/// Extremum of a batch of random mixed models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhvScanSummary {
    pub models: u64,
    pub max_abs_chsh: f64,
    /// Index of the first model attaining the maximum.
    pub argmax: u64,
}

/// Draws `models` random models and records the largest `|S|`. Model `i`
/// comes from ChaCha8 stream `i` under `seed`, so the result does not depend
/// on the thread count.
pub fn lhv_random_scan(models: u64, seed: u64, max_support: usize) -> LhvScanSummary {
    let (max_abs_chsh, argmax) = (0..models)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            (lhv_chsh_value(&LhvModel::random(&mut rng, max_support)).abs(), i)
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    LhvScanSummary { models, max_abs_chsh, argmax }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_scan_is_reproducible() {
        let a = lhv_random_scan(5000, 3, 6);
        let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| lhv_random_scan(5000, 3, 6));
        assert_eq!(a, b);
        assert!(a.max_abs_chsh <= 2.0 + 1e-12);
        assert!(a.max_abs_chsh > 1.9);
    }

    #[test]
    fn extremal_point() {
        let m = LhvModel::from_signs(vec![1.0], &[[1, 1, 1, -1]]).unwrap();
        assert_eq!(lhv_chsh_value(&m), 2.0);
    }

    #[test]
    fn symmetric_mixture_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = LhvModel::random(&mut rng, 8);
            assert!(lhv_chsh_value(&m.balanced()).abs() < 1e-13);
            let all_flipped = LhvModel::new(
                m.weights().to_vec(),
                m.assignments().iter().map(LocalAssignment::flipped).collect(),
            )
            .unwrap();
            assert_eq!(lhv_chsh_value(&all_flipped), lhv_chsh_value(&m));
        }
    }

    #[test]
    fn scan_enumerates_sixteen_strategies() {
        let scan = lhv_extremal_scan();
        assert_eq!(scan.len(), 16);
        let distinct: std::collections::HashSet<_> = scan.iter().map(|(a, _)| *a).collect();
        assert_eq!(distinct.len(), 16);
        let max = scan.iter().map(|(_, v)| *v).fold(f64::MIN, f64::max);
        let min = scan.iter().map(|(_, v)| *v).fold(f64::MAX, f64::min);
        assert_eq!(max, 2.0);
        assert_eq!(min, -2.0);
        assert!(scan.iter().all(|(_, v)| *v == 2.0 || *v == -2.0));
        assert_eq!(scan.iter().filter(|(_, v)| *v == 2.0).count(), 8);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(matches!(LhvModel::from_signs(vec![1.0], &[[1, 0, 1, 1]]), Err(SpinError::BadOutcome(0))));
        assert!(matches!(LhvModel::from_signs(vec![0.5], &[[1, 1, 1, 1]]), Err(SpinError::BadWeights(_))));
        assert!(matches!(
            LhvModel::from_signs(vec![1.2, -0.2], &[[1, 1, 1, 1], [1, 1, 1, 1]]),
            Err(SpinError::BadWeights(_))
        ));
        assert!(matches!(
            LhvModel::from_signs(vec![0.5, 0.5], &[[1, 1, 1, 1]]),
            Err(SpinError::LengthMismatch { .. })
        ));
        assert!(matches!(LhvModel::new(vec![], vec![]), Err(SpinError::EmptySupport)));
    }

    #[test]
    fn inverse_cdf_sampling() {
        let m = LhvModel::from_signs(vec![0.25, 0.75], &[[1, 1, 1, 1], [-1, -1, -1, -1]]).unwrap();
        assert_eq!(m.sample(0.0).a1, Outcome::Plus);
        assert_eq!(m.sample(0.2499).a1, Outcome::Plus);
        assert_eq!(m.sample(0.25).a1, Outcome::Minus);
        assert_eq!(m.sample(0.999_999).a1, Outcome::Minus);
    }
}
