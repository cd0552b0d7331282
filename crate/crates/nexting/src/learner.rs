//! One linear TD(λ) learner: a weight vector, an eligibility trace, and the
//! per-step update, with support for state-dependent discounting.
//!
//! The update for a transition from step t to t+1 is
//!
//! ```text
//! e     <- gamma_t * lambda * e + phi_t
//! delta <- r_{t+1} + gamma_{t+1} * theta.phi_{t+1} - theta.phi_t
//! theta <- theta + alpha * delta * e
//! ```
//!
//! with a constant discount passing the same gamma for both roles.
//!
//! Traces are semantically dense (same length as theta). The implementation
//! keeps an explicit list of indices with nonzero trace and touches only
//! those, evicting entries the moment they decay to exactly zero. Every
//! arithmetic step matches the dense decay-then-add pass bit for bit; the
//! test suite checks this against a naive dense reference.

use crate::error::{Error, Result};
use crate::features::{FeatureVector, SensorFrame};
use crate::horde::TargetSelector;

/// Discount-rate rule for one prediction: a fixed timescale, or a discount
/// that drops when a trigger channel saturates (pseudo-termination).
#[derive(Debug, Clone, PartialEq)]
pub enum DiscountRule {
    Constant {
        gamma: f64,
    },
    /// `throttled_gamma` applies whenever the trigger channel reads at or
    /// above the threshold; `gamma` otherwise.
    Throttled {
        gamma: f64,
        throttled_gamma: f64,
        trigger_channel: usize,
        trigger_threshold: f64,
    },
}

impl DiscountRule {
    pub fn validate(&self) -> Result<()> {
        let check = |g: f64| -> Result<()> {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::Config(format!("discount {g} outside [0, 1)")));
            }
            Ok(())
        };
        match *self {
            DiscountRule::Constant { gamma } => check(gamma),
            DiscountRule::Throttled {
                gamma,
                throttled_gamma,
                trigger_threshold,
                ..
            } => {
                check(gamma)?;
                check(throttled_gamma)?;
                if !(0.0..=1.0).contains(&trigger_threshold) {
                    return Err(Error::Config(format!(
                        "trigger threshold {trigger_threshold} outside [0, 1]"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Discount for the given frame's state.
    pub fn resolve(&self, frame: &SensorFrame) -> f64 {
        match *self {
            DiscountRule::Constant { gamma } => gamma,
            DiscountRule::Throttled {
                gamma,
                throttled_gamma,
                trigger_channel,
                trigger_threshold,
            } => {
                if frame.channels[trigger_channel] >= trigger_threshold {
                    throttled_gamma
                } else {
                    gamma
                }
            }
        }
    }

    /// Largest discount the rule can produce; bounds the return horizon.
    pub fn max_gamma(&self) -> f64 {
        match *self {
            DiscountRule::Constant { gamma } => gamma,
            DiscountRule::Throttled {
                gamma, throttled_gamma, ..
            } => gamma.max(throttled_gamma),
        }
    }
}

/// One nexting question: what to predict, at which timescale, learned how.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSpec {
    pub id: usize,
    pub target: TargetSelector,
    pub discount: DiscountRule,
    pub lambda: f64,
    /// Absolute step size. Callers usually derive it as 0.1 / active features.
    pub alpha: f64,
}

impl PredictionSpec {
    pub fn validate(&self) -> Result<()> {
        self.discount.validate()?;
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "prediction {}: lambda {} outside [0, 1]",
                self.id, self.lambda
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "prediction {}: alpha {} must be positive and finite",
                self.id, self.alpha
            )));
        }
        Ok(())
    }
}

/// Reusable workspace for [`Learner::td_step`]. One per worker thread; the
/// mark array is clean (all false) between calls.
pub struct TdScratch {
    mark: Vec<bool>,
}

impl TdScratch {
    pub fn new(n: usize) -> Self {
        Self { mark: vec![false; n] }
    }
}

/// Weights and eligibility trace for a single prediction.
#[derive(Debug, Clone)]
pub struct Learner {
    id: usize,
    theta: Box<[f64]>,
    trace: Box<[f64]>,
    /// Indices with nonzero trace. Invariant: trace[i] != 0 iff i is listed.
    support: Vec<u32>,
    last_prediction: f64,
}

impl Learner {
    /// Fresh learner with zero weights and traces.
    pub fn new(id: usize, n: usize) -> Self {
        Self {
            id,
            theta: vec![0.0; n].into_boxed_slice(),
            trace: vec![0.0; n].into_boxed_slice(),
            support: Vec::new(),
            last_prediction: 0.0,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Overwrites the weights, e.g. when resuming from a checkpoint.
    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.theta.len() {
            return Err(Error::Input(format!(
                "weight vector length {} does not match dimension {}",
                theta.len(),
                self.theta.len()
            )));
        }
        self.theta.copy_from_slice(theta);
        Ok(())
    }

    /// Most recent post-update prediction.
    pub fn last_prediction(&self) -> f64 {
        self.last_prediction
    }

    /// Inner product of the weights with a binary feature vector: a sparse
    /// gather-sum over the active indices, in ascending index order.
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        assert_eq!(fv.n(), self.theta.len(), "feature dimension mismatch");
        fv.dot(&self.theta)
    }

    /// Zeroes the eligibility trace, leaving the weights untouched.
    pub fn reset_traces(&mut self) {
        for &i in &self.support {
            self.trace[i as usize] = 0.0;
        }
        self.support.clear();
    }

    /// Applies one TD(λ) update for the transition (fv_prev -> fv_next) with
    /// reward observed at the next step. `gamma_prev` discounts the trace,
    /// `gamma_next` the bootstrap target. Returns the post-update prediction
    /// for `fv_next`.
    #[allow(clippy::too_many_arguments)]
    pub fn td_step(
        &mut self,
        scratch: &mut TdScratch,
        fv_prev: &FeatureVector,
        fv_next: &FeatureVector,
        reward: f64,
        gamma_prev: f64,
        gamma_next: f64,
        lambda: f64,
        alpha: f64,
    ) -> Result<f64> {
        let n = self.theta.len();
        if fv_prev.n() != n || fv_next.n() != n {
            return Err(Error::Input(format!(
                "prediction {}: feature dimension {}/{} does not match weights {}",
                self.id,
                fv_prev.n(),
                fv_next.n(),
                n
            )));
        }
        debug_assert_eq!(scratch.mark.len(), n);
        if !reward.is_finite() {
            return Err(Error::Numeric {
                id: self.id,
                message: format!("non-finite reward {reward}"),
            });
        }

        let v_prev = fv_prev.dot(&self.theta);
        let v_next = fv_next.dot(&self.theta);
        let delta = reward + gamma_next * v_next - v_prev;
        if !delta.is_finite() {
            return Err(Error::Numeric {
                id: self.id,
                message: format!("non-finite TD error (v_prev {v_prev}, v_next {v_next})"),
            });
        }
        let decay = gamma_prev * lambda;
        let scale = alpha * delta;

        for &i in fv_prev.active() {
            scratch.mark[i as usize] = true;
        }

        // One pass over the trace support: decay, add the marked actives,
        // update weights, evict entries that decayed to exact zero.
        let mut poison = 0.0f64;
        let theta = &mut self.theta;
        let trace = &mut self.trace;
        self.support.retain(|&iu| {
            let i = iu as usize;
            let mut e = trace[i] * decay;
            if scratch.mark[i] {
                e += 1.0;
                scratch.mark[i] = false;
            }
            trace[i] = e;
            if e == 0.0 {
                false
            } else {
                let w = theta[i] + scale * e;
                theta[i] = w;
                poison += w;
                true
            }
        });
        // Actives that were not yet in the support.
        for &iu in fv_prev.active() {
            let i = iu as usize;
            if scratch.mark[i] {
                scratch.mark[i] = false;
                trace[i] = 1.0;
                let w = theta[i] + scale * 1.0;
                theta[i] = w;
                poison += w;
                self.support.push(iu);
            }
        }
        if !poison.is_finite() {
            return Err(Error::Numeric {
                id: self.id,
                message: "non-finite weights after update".into(),
            });
        }

        self.last_prediction = fv_next.dot(&self.theta);
        Ok(self.last_prediction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand::Rng as _;
    use rand_chacha::ChaCha8Rng;

    fn fv(active: Vec<u32>, n: usize) -> FeatureVector {
        FeatureVector::new(active, n).unwrap()
    }

    /// Naive dense TD(λ): the unambiguous correctness oracle.
    struct DenseRef {
        theta: Vec<f64>,
        trace: Vec<f64>,
    }

    impl DenseRef {
        fn new(n: usize) -> Self {
            Self { theta: vec![0.0; n], trace: vec![0.0; n] }
        }

        #[allow(clippy::too_many_arguments)]
        fn td_step(
            &mut self,
            fv_prev: &FeatureVector,
            fv_next: &FeatureVector,
            reward: f64,
            gamma_prev: f64,
            gamma_next: f64,
            lambda: f64,
            alpha: f64,
        ) {
            let v_prev = fv_prev.dot(&self.theta);
            let v_next = fv_next.dot(&self.theta);
            let delta = reward + gamma_next * v_next - v_prev;
            let decay = gamma_prev * lambda;
            for e in self.trace.iter_mut() {
                *e *= decay;
            }
            for &i in fv_prev.active() {
                self.trace[i as usize] += 1.0;
            }
            let scale = alpha * delta;
            for (w, &e) in self.theta.iter_mut().zip(self.trace.iter()) {
                *w += scale * e;
            }
        }
    }

    #[test]
    fn predict_zero_weights() {
        let learner = Learner::new(0, 100);
        assert_eq!(learner.predict(&fv(vec![0, 3, 99], 100)), 0.0);
    }

    #[test]
    fn predict_sums_active_weights() {
        let mut learner = Learner::new(0, 457);
        learner.set_theta(&vec![1.0; 457]).unwrap();
        let active: Vec<u32> = (0..457).collect();
        assert_eq!(learner.predict(&fv(active, 457)), 457.0);
    }

    #[test]
    fn predict_matches_dense_dot() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 64;
        let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut learner = Learner::new(0, n);
        learner.set_theta(&theta).unwrap();
        for _ in 0..50 {
            let active: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.2)).collect();
            let f = fv(active.clone(), n);
            let dense: f64 = (0..n)
                .map(|i| if f.contains(i) { theta[i] } else { 0.0 })
                .sum::<f64>();
            let sparse: f64 = active.iter().map(|&i| theta[i as usize]).sum();
            assert_eq!(learner.predict(&f), sparse);
            assert!((learner.predict(&f) - dense).abs() < 1e-12);
        }
    }

    #[test]
    fn single_step_bias_only() {
        // theta = 0, gamma = 0, alpha = 0.5, r = 1: delta = 1, trace = phi.
        let mut learner = Learner::new(0, 1);
        let mut scratch = TdScratch::new(1);
        let bias = fv(vec![0], 1);
        learner
            .td_step(&mut scratch, &bias, &bias, 1.0, 0.0, 0.0, 0.0, 0.5)
            .unwrap();
        assert_eq!(learner.theta()[0], 0.5);
    }

    #[test]
    fn bias_fixed_point() {
        // Constant r = 1, gamma = 0.8, lambda = 0: fixed point 1/(1-gamma) = 5.
        let mut learner = Learner::new(0, 1);
        let mut scratch = TdScratch::new(1);
        let bias = fv(vec![0], 1);
        for _ in 0..100_000 {
            learner
                .td_step(&mut scratch, &bias, &bias, 1.0, 0.8, 0.8, 0.0, 0.1)
                .unwrap();
        }
        assert!((learner.theta()[0] - 5.0).abs() < 1e-6);
    }

    #[test]
    fn trace_accumulates_per_eq4() {
        // Same feature active twice at gamma 0.95, lambda 0.9:
        // e = 0.95 * 0.9 * 1 + 1 = 1.855.
        let mut learner = Learner::new(0, 4);
        let mut scratch = TdScratch::new(4);
        let f = fv(vec![2], 4);
        learner
            .td_step(&mut scratch, &f, &f, 0.0, 0.95, 0.95, 0.9, 0.1)
            .unwrap();
        learner
            .td_step(&mut scratch, &f, &f, 0.0, 0.95, 0.95, 0.9, 0.1)
            .unwrap();
        assert!((learner.trace[2] - 1.855).abs() < 1e-15);
    }

    #[test]
    fn reset_traces_is_idempotent_and_keeps_theta() {
        let mut learner = Learner::new(0, 8);
        let mut scratch = TdScratch::new(8);
        let f = fv(vec![0, 3], 8);
        learner
            .td_step(&mut scratch, &f, &f, 1.0, 0.9, 0.9, 0.9, 0.2)
            .unwrap();
        let theta_before = learner.theta().to_vec();
        let pred_before = learner.predict(&f);
        learner.reset_traces();
        assert!(learner.trace.iter().all(|&e| e == 0.0));
        assert!(learner.support.is_empty());
        assert_eq!(learner.theta(), theta_before.as_slice());
        assert_eq!(learner.predict(&f), pred_before);
        learner.reset_traces();
        assert!(learner.trace.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn matches_dense_reference_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 40;
        let mut learner = Learner::new(0, n);
        let mut dense = DenseRef::new(n);
        let mut scratch = TdScratch::new(n);
        for step in 0..400 {
            let prev: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.15)).collect();
            let next: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.15)).collect();
            let fv_prev = fv(prev, n);
            let fv_next = fv(next, n);
            let r = rng.gen_range(-1.0..1.0);
            // Mix of timescales, including gamma = 0 and a state-dependent flip.
            let g_prev = [0.0, 0.8, 0.95, 0.9875][step % 4];
            let g_next = [0.0, 0.8, 0.95, 0.9875][(step + rng.gen_range(0..2)) % 4];
            learner
                .td_step(&mut scratch, &fv_prev, &fv_next, r, g_prev, g_next, 0.9, 0.05)
                .unwrap();
            dense.td_step(&fv_prev, &fv_next, r, g_prev, g_next, 0.9, 0.05);
            for i in 0..n {
                assert_eq!(learner.theta[i].to_bits(), dense.theta[i].to_bits(), "theta[{i}] at step {step}");
                assert_eq!(learner.trace[i].to_bits(), dense.trace[i].to_bits(), "trace[{i}] at step {step}");
            }
        }
    }

    #[test]
    fn gamma_zero_reduces_to_lms() {
        // With gamma = 0 the update is supervised regression toward r on the
        // previous features: theta += alpha * (r - theta.phi) * phi.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 16;
        let mut learner = Learner::new(0, n);
        let mut scratch = TdScratch::new(n);
        let mut lms = vec![0.0f64; n];
        for _ in 0..200 {
            let prev: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.3)).collect();
            let next: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.3)).collect();
            let fv_prev = fv(prev.clone(), n);
            let fv_next = fv(next, n);
            let r = rng.gen_range(-1.0..1.0);
            learner
                .td_step(&mut scratch, &fv_prev, &fv_next, r, 0.0, 0.0, 0.9, 0.1)
                .unwrap();
            let v: f64 = prev.iter().map(|&i| lms[i as usize]).sum();
            let scale = 0.1 * (r - v);
            for &i in &prev {
                lms[i as usize] += scale * 1.0;
            }
            for (w, l) in learner.theta.iter().zip(&lms) {
                assert_eq!(w.to_bits(), l.to_bits());
            }
        }
    }

    #[test]
    fn non_finite_reward_reports_id() {
        let mut learner = Learner::new(1234, 4);
        let mut scratch = TdScratch::new(4);
        let f = fv(vec![0], 4);
        let err = learner
            .td_step(&mut scratch, &f, &f, f64::NAN, 0.8, 0.8, 0.9, 0.1)
            .unwrap_err();
        match err {
            Error::Numeric { id, .. } => assert_eq!(id, 1234),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn divergence_is_detected() {
        // An absurd step size blows the weights up; the error names the id.
        let mut learner = Learner::new(7, 2);
        let mut scratch = TdScratch::new(2);
        let f = fv(vec![0, 1], 2);
        let mut saw_error = false;
        for _ in 0..2000 {
            match learner.td_step(&mut scratch, &f, &f, 1.0, 0.99, 0.99, 1.0, 80.0) {
                Ok(_) => {}
                Err(Error::Numeric { id, .. }) => {
                    assert_eq!(id, 7);
                    saw_error = true;
                    break;
                }
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert!(saw_error, "runaway step size never tripped the finiteness check");
    }

    proptest! {
        // Each trace component gains at most 1 per step, so it is bounded by
        // the geometric series 1/(1 - gamma*lambda); the L1 norm by c times that.
        #[test]
        fn trace_bounds(seed in 0u64..500, gamma in 0.0f64..0.99, lambda in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 24usize;
            let c = 4usize;
            let mut learner = Learner::new(0, n);
            let mut scratch = TdScratch::new(n);
            let bound = 1.0 / (1.0 - gamma * lambda);
            for _ in 0..300 {
                let mut active: Vec<u32> = (0..n as u32).collect();
                active.shuffle(&mut rng);
                active.truncate(c);
                let f = fv(active, n);
                learner.td_step(&mut scratch, &f, &f, rng.gen_range(-1.0..1.0), gamma, gamma, lambda, 0.01).unwrap();
                let max = learner.trace.iter().cloned().fold(0.0f64, f64::max);
                let l1: f64 = learner.trace.iter().map(|e| e.abs()).sum();
                prop_assert!(max <= bound * (1.0 + 1e-12));
                prop_assert!(l1 <= c as f64 * bound * (1.0 + 1e-12));
            }
        }
    }
}
