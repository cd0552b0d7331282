//! Shared helpers for the subcommands.

use anyhow::{bail, Context, Result};
use std::path::Path;

use nexting::features::{FeatureVector, SensorFrame, TileCoder};
use nexting::horde::TargetSelector;
use nexting::learner::{DiscountRule, PredictionSpec};

/// Loads a sensor log and reports its shape.
pub fn load_log(path: &Path) -> Result<(Vec<SensorFrame>, Vec<String>)> {
    let (frames, names) = nexting::sim::load_log(path)
        .with_context(|| format!("failed to load log {}", path.display()))?;
    if frames.is_empty() {
        bail!("log {} contains no frames", path.display());
    }
    Ok((frames, names))
}

/// Encodes every frame of a log. Used by the offline stages, which need the
/// full feature series for Gram accumulation and feature-component targets.
pub fn encode_all(coder: &TileCoder, frames: &[SensorFrame]) -> Result<Vec<FeatureVector>> {
    frames
        .iter()
        .map(|f| coder.encode(f).map_err(Into::into))
        .collect()
}

/// Parses `0,0.8,0.95,0.9875`-style discount lists.
pub fn parse_discounts(text: &str) -> Result<Vec<f64>> {
    let discounts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("invalid discount `{s}`")))
        .collect::<Result<_>>()?;
    if discounts.is_empty() {
        bail!("discount list is empty");
    }
    for &g in &discounts {
        if !(0.0..1.0).contains(&g) {
            bail!("discount {g} outside [0, 1)");
        }
    }
    Ok(discounts)
}

/// Parses `3,17,42`-style id lists.
pub fn parse_ids(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("invalid id `{s}`")))
        .collect()
}

/// Canonical signature of what a prediction asks: its target and discount
/// rule, without learner parameters. Two probes with equal signatures have
/// identical ideal returns on the same log.
pub fn probe_signature(spec: &PredictionSpec) -> String {
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
    format!("{target} {discount}")
}

pub fn create_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .with_context(|| format!("cannot create output directory {}", path.display()))
}
