//! The prediction bank: thousands of independent TD(λ) learners advanced in
//! lockstep over a shared feature stream.
//!
//! Learners never share mutable state, so a step can be split across worker
//! threads by slicing the bank; results are bit-identical for any worker
//! count. Each step's wall-clock duration is recorded for throughput
//! reporting.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, SensorFrame};
use crate::learner::{Learner, PredictionSpec, TdScratch};

/// What a prediction's target signal is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSelector {
    /// The raw reading of one sensor channel.
    SensorChannel { channel: usize },
    /// One binary component of the feature vector (1 if active, else 0).
    FeatureComponent { index: usize },
    /// Total instantaneous motor power: sum over three wheels of the
    /// (voltage channel x current channel) product.
    WheelPower { wheels: [(usize, usize); 3] },
}

/// Resolves a spec's target signal at one time step. The reward for a
/// transition is resolved on the *next* frame and feature vector.
pub fn resolve_target(selector: &TargetSelector, frame: &SensorFrame, fv: &FeatureVector) -> f64 {
    match selector {
        TargetSelector::SensorChannel { channel } => frame.channels[*channel],
        TargetSelector::FeatureComponent { index } => {
            if fv.contains(*index) {
                1.0
            } else {
                0.0
            }
        }
        TargetSelector::WheelPower { wheels } => wheels
            .iter()
            .map(|&(v, c)| frame.channels[v] * frame.channels[c])
            .sum(),
    }
}

/// The full bank of prediction specs and learner states, parallel arrays
/// indexed by prediction id.
pub struct PredictionBank {
    specs: Vec<PredictionSpec>,
    learners: Vec<Learner>,
    n: usize,
    channel_count: usize,
    workers: usize,
    cycle_stats: Vec<Duration>,
}

impl PredictionBank {
    /// Builds a bank with all learners initialized to zero weights and
    /// traces. Spec ids must be dense 0..k-1 and every selector reference
    /// must be valid for the feature dimension and channel count.
    pub fn new(specs: Vec<PredictionSpec>, n: usize, channel_count: usize) -> Result<Self> {
        for (i, spec) in specs.iter().enumerate() {
            if spec.id != i {
                return Err(Error::Config(format!(
                    "spec ids must be dense 0..k-1; position {i} has id {}",
                    spec.id
                )));
            }
            spec.validate()?;
            let check_channel = |ch: usize, what: &str| -> Result<()> {
                if ch >= channel_count {
                    return Err(Error::Config(format!(
                        "prediction {i}: {what} channel {ch} out of range (have {channel_count})"
                    )));
                }
                Ok(())
            };
            match &spec.target {
                TargetSelector::SensorChannel { channel } => check_channel(*channel, "target")?,
                TargetSelector::FeatureComponent { index } => {
                    if *index >= n {
                        return Err(Error::Config(format!(
                            "prediction {i}: feature target {index} out of range (n = {n})"
                        )));
                    }
                }
                TargetSelector::WheelPower { wheels } => {
                    for &(v, c) in wheels {
                        check_channel(v, "voltage")?;
                        check_channel(c, "current")?;
                    }
                }
            }
            if let crate::learner::DiscountRule::Throttled { trigger_channel, .. } = spec.discount {
                check_channel(trigger_channel, "discount trigger")?;
            }
        }
        let learners = specs
            .iter()
            .map(|spec| Learner::new(spec.id, n))
            .collect();
        Ok(Self {
            specs,
            learners,
            n,
            channel_count,
            workers: 1,
            cycle_stats: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn specs(&self) -> &[PredictionSpec] {
        &self.specs
    }

    pub fn learner(&self, id: usize) -> &Learner {
        &self.learners[id]
    }

    pub fn learners(&self) -> &[Learner] {
        &self.learners
    }

    pub fn learners_mut(&mut self) -> &mut [Learner] {
        &mut self.learners
    }

    /// Worker threads used by [`bank_step`](Self::bank_step). The final
    /// weights do not depend on this.
    pub fn set_workers(&mut self, workers: usize) {
        self.workers = workers.max(1);
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Measured wall-clock duration of every step so far.
    pub fn cycle_stats(&self) -> &[Duration] {
        &self.cycle_stats
    }

    /// Advances every prediction one transition: resolves each spec's reward
    /// on the next frame and its discounts on both frames, applies the TD
    /// update, and returns the post-update predictions for `fv_next` along
    /// with the measured cycle duration.
    pub fn bank_step(
        &mut self,
        fv_prev: &FeatureVector,
        fv_next: &FeatureVector,
        frame_prev: &SensorFrame,
        frame_next: &SensorFrame,
    ) -> Result<(Vec<f64>, Duration)> {
        let start = Instant::now();
        if fv_prev.n() != self.n || fv_next.n() != self.n {
            return Err(Error::Input(format!(
                "feature dimension {}/{} does not match bank dimension {}",
                fv_prev.n(),
                fv_next.n(),
                self.n
            )));
        }
        if frame_prev.channels.len() < self.channel_count
            || frame_next.channels.len() < self.channel_count
        {
            return Err(Error::Input(format!(
                "frames carry fewer than the {} channels the bank references",
                self.channel_count
            )));
        }

        let k = self.specs.len();
        let mut predictions = vec![0.0f64; k];
        if k > 0 {
            let workers = self.workers.min(k);
            let n = self.n;
            let chunk = k.div_ceil(workers);
            if workers == 1 {
                let mut scratch = TdScratch::new(n);
                run_chunk(
                    &self.specs,
                    &mut self.learners,
                    &mut predictions,
                    &mut scratch,
                    fv_prev,
                    fv_next,
                    frame_prev,
                    frame_next,
                )?;
            } else {
                let specs = &self.specs;
                let results: Vec<Result<()>> = std::thread::scope(|scope| {
                    let mut handles = Vec::with_capacity(workers);
                    for (spec_chunk, (learner_chunk, pred_chunk)) in specs
                        .chunks(chunk)
                        .zip(self.learners.chunks_mut(chunk).zip(predictions.chunks_mut(chunk)))
                    {
                        handles.push(scope.spawn(move || {
                            let mut scratch = TdScratch::new(n);
                            run_chunk(
                                spec_chunk,
                                learner_chunk,
                                pred_chunk,
                                &mut scratch,
                                fv_prev,
                                fv_next,
                                frame_prev,
                                frame_next,
                            )
                        }));
                    }
                    handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
                });
                for result in results {
                    result?;
                }
            }
        }

        let duration = start.elapsed();
        self.cycle_stats.push(duration);
        Ok((predictions, duration))
    }
}

#[allow(clippy::too_many_arguments)]
fn run_chunk(
    specs: &[PredictionSpec],
    learners: &mut [Learner],
    predictions: &mut [f64],
    scratch: &mut TdScratch,
    fv_prev: &FeatureVector,
    fv_next: &FeatureVector,
    frame_prev: &SensorFrame,
    frame_next: &SensorFrame,
) -> Result<()> {
    for ((spec, learner), out) in specs.iter().zip(learners).zip(predictions) {
        let reward = resolve_target(&spec.target, frame_next, fv_next);
        let gamma_prev = spec.discount.resolve(frame_prev);
        let gamma_next = spec.discount.resolve(frame_next);
        *out = learner.td_step(
            scratch,
            fv_prev,
            fv_next,
            reward,
            gamma_prev,
            gamma_next,
            spec.lambda,
            spec.alpha,
        )?;
    }
    Ok(())
}

/// Duration at quantile `q` (0..=1) of the recorded cycle times.
pub fn cycle_percentile(stats: &[Duration], q: f64) -> Duration {
    if stats.is_empty() {
        return Duration::ZERO;
    }
    let mut sorted: Vec<Duration> = stats.to_vec();
    sorted.sort_unstable();
    let idx = ((sorted.len() - 1) as f64 * q.clamp(0.0, 1.0)).round() as usize;
    sorted[idx]
}

/// Samples `count` distinct feature indices from [0, n) with a seeded
/// partial Fisher-Yates shuffle; the draw is recorded in run manifests.
pub fn sample_feature_targets(n: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    use rand::prelude::*;
    if count > n {
        return Err(Error::Config(format!(
            "cannot sample {count} distinct feature targets from dimension {n}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(count);
    Ok(pool)
}

/// Builds the default spec bank: every sensor channel at every discount,
/// then `feature_targets` sampled feature components at every discount.
/// Ids are dense in that order.
#[allow(clippy::too_many_arguments)]
pub fn generate_spec_bank(
    channel_count: usize,
    n: usize,
    discounts: &[f64],
    feature_targets: usize,
    feature_seed: u64,
    lambda: f64,
    alpha: f64,
) -> Result<(Vec<PredictionSpec>, Vec<usize>)> {
    use crate::learner::DiscountRule;
    let sampled = sample_feature_targets(n, feature_targets, feature_seed)?;
    let mut specs = Vec::with_capacity((channel_count + sampled.len()) * discounts.len());
    let mut id = 0usize;
    for channel in 0..channel_count {
        for &gamma in discounts {
            specs.push(PredictionSpec {
                id,
                target: TargetSelector::SensorChannel { channel },
                discount: DiscountRule::Constant { gamma },
                lambda,
                alpha,
            });
            id += 1;
        }
    }
    for &index in &sampled {
        for &gamma in discounts {
            specs.push(PredictionSpec {
                id,
                target: TargetSelector::FeatureComponent { index },
                discount: DiscountRule::Constant { gamma },
                lambda,
                alpha,
            });
            id += 1;
        }
    }
    Ok((specs, sampled))
}

/// Formats specs in the prediction-spec file format, one per line:
///
/// ```text
/// pred <id> <target> <discount> <lambda> <alpha>
/// ```
///
/// Targets are `sensor:<ch>`, `feature:<idx>`, or
/// `power:<v0>:<c0>:<v1>:<c1>:<v2>:<c2>`; discounts are `gamma:<g>` or
/// `throttle:<gamma>:<throttled>:<channel>:<threshold>`. Floats use the
/// shortest round-trip form.
pub fn format_prediction_specs(specs: &[PredictionSpec]) -> String {
    use crate::learner::DiscountRule;
    let mut out = String::new();
    for spec in specs {
        let target = match &spec.target {
            TargetSelector::SensorChannel { channel } => format!("sensor:{channel}"),
            TargetSelector::FeatureComponent { index } => format!("feature:{index}"),
            TargetSelector::WheelPower { wheels } => format!(
                "power:{}:{}:{}:{}:{}:{}",
                wheels[0].0, wheels[0].1, wheels[1].0, wheels[1].1, wheels[2].0, wheels[2].1
            ),
        };
        let discount = match &spec.discount {
            DiscountRule::Constant { gamma } => format!("gamma:{gamma}"),
            DiscountRule::Throttled {
                gamma,
                throttled_gamma,
                trigger_channel,
                trigger_threshold,
            } => format!("throttle:{gamma}:{throttled_gamma}:{trigger_channel}:{trigger_threshold}"),
        };
        out.push_str(&format!(
            "pred {} {} {} {} {}\n",
            spec.id, target, discount, spec.lambda, spec.alpha
        ));
    }
    out
}

/// Parses the prediction-spec file format written by
/// [`format_prediction_specs`].
pub fn parse_prediction_specs(text: &str, path: &str) -> Result<Vec<PredictionSpec>> {
    use crate::learner::DiscountRule;
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_string(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] != "pred" {
            return Err(err(format!("unknown directive `{}`", fields[0])));
        }
        if fields.len() != 6 {
            return Err(err(format!(
                "pred takes 5 fields (id target discount lambda alpha), got {}",
                fields.len() - 1
            )));
        }
        let id: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("invalid id `{}`", fields[1])))?;

        let tparts: Vec<&str> = fields[2].split(':').collect();
        let parse_usize = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| err(format!("invalid {what} `{s}`")))
        };
        let target = match tparts[0] {
            "sensor" if tparts.len() == 2 => TargetSelector::SensorChannel {
                channel: parse_usize(tparts[1], "channel")?,
            },
            "feature" if tparts.len() == 2 => TargetSelector::FeatureComponent {
                index: parse_usize(tparts[1], "feature index")?,
            },
            "power" if tparts.len() == 7 => {
                let mut ch = [0usize; 6];
                for (slot, s) in ch.iter_mut().zip(&tparts[1..]) {
                    *slot = parse_usize(s, "power channel")?;
                }
                TargetSelector::WheelPower {
                    wheels: [(ch[0], ch[1]), (ch[2], ch[3]), (ch[4], ch[5])],
                }
            }
            _ => return Err(err(format!("invalid target `{}`", fields[2]))),
        };

        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| err(format!("invalid {what} `{s}`")))
        };
        let dparts: Vec<&str> = fields[3].split(':').collect();
        let discount = match dparts[0] {
            "gamma" if dparts.len() == 2 => DiscountRule::Constant {
                gamma: parse_f64(dparts[1], "gamma")?,
            },
            "throttle" if dparts.len() == 5 => DiscountRule::Throttled {
                gamma: parse_f64(dparts[1], "gamma")?,
                throttled_gamma: parse_f64(dparts[2], "throttled gamma")?,
                trigger_channel: parse_usize(dparts[3], "trigger channel")?,
                trigger_threshold: parse_f64(dparts[4], "trigger threshold")?,
            },
            _ => return Err(err(format!("invalid discount rule `{}`", fields[3]))),
        };

        specs.push(PredictionSpec {
            id,
            target,
            discount,
            lambda: parse_f64(fields[4], "lambda")?,
            alpha: parse_f64(fields[5], "alpha")?,
        });
    }
    Ok(specs)
}
