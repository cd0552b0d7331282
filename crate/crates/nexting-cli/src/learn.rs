use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use nexting::checkpoint;
use nexting::horde::{self, cycle_percentile, PredictionBank, TargetSelector};
use nexting::learner::{DiscountRule, PredictionSpec};
use nexting::manifest::{self, LearnManifest};

use crate::common;

#[derive(Args)]
pub struct LearnArgs {
    /// Input sensor log (CSV).
    #[arg(long)]
    pub log: PathBuf,
    /// Tiling config file; an empty config means the bias-only representation.
    #[arg(long)]
    pub tiling: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Prediction-spec file. When omitted, the default bank is generated and
    /// written to `<out>/specs.txt`.
    #[arg(long)]
    pub specs: Option<PathBuf>,
    /// Trace-decay parameter (0 = one-step TD, 1 = return regression).
    #[arg(long, default_value_t = 0.9)]
    pub lambda: f64,
    /// Step size as a fraction of the active feature count:
    /// alpha = alpha_scale / active_per_step.
    #[arg(long, default_value_t = 0.1)]
    pub alpha_scale: f64,
    /// Discount set for generated specs.
    #[arg(long, default_value = "0,0.8,0.95,0.9875")]
    pub discounts: String,
    /// Number of feature-component targets to sample for generated specs.
    #[arg(long, default_value_t = 528)]
    pub feature_targets: usize,
    /// Seed for the feature-target draw; recorded in the manifest.
    #[arg(long, default_value_t = 1)]
    pub feature_seed: u64,
    /// Add wheel-power specs (throttled and constant discount) to a
    /// generated bank. Assumes the simulator channel layout.
    #[arg(long, default_value_t = false)]
    pub power_specs: bool,
    /// Probe ids whose per-step predictions are persisted. Default: the
    /// light-sensor targets plus any wheel-power specs.
    #[arg(long)]
    pub probes: Option<String>,
    /// Sensor channel treated as "the light sensor" for default probes.
    #[arg(long, default_value_t = nexting::sim::CH_LIGHT)]
    pub probe_channel: usize,
    /// Worker threads for the bank update.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

pub fn run(args: LearnArgs) -> Result<()> {
    let (frames, channel_names) = common::load_log(&args.log)?;
    let coder = nexting::features::load_tile_coder(&args.tiling)?;
    let channel_count = channel_names.len();
    if coder.min_channels() > channel_count {
        bail!(
            "tiling config references channel {} but the log has only {channel_count} channels",
            coder.min_channels() - 1
        );
    }
    common::create_out_dir(&args.out)?;

    let alpha = args.alpha_scale / coder.active_per_step() as f64;
    let discounts = common::parse_discounts(&args.discounts)?;

    // Load or generate the spec bank; either way the file that defines it
    // ends up hashed into the manifest.
    let (specs, feature_indices, spec_path) = match &args.specs {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read spec file {}", path.display()))?;
            let specs = horde::parse_prediction_specs(&text, &path.to_string_lossy())?;
            (specs, Vec::new(), path.clone())
        }
        None => {
            let (mut specs, indices) = horde::generate_spec_bank(
                channel_count,
                coder.n(),
                &discounts,
                args.feature_targets,
                args.feature_seed,
                args.lambda,
                alpha,
            )?;
            if args.power_specs {
                append_power_specs(&mut specs, args.probe_channel, args.lambda, alpha)?;
            }
            let path = args.out.join("specs.txt");
            std::fs::write(&path, horde::format_prediction_specs(&specs))?;
            (specs, indices, path)
        }
    };

    let mut bank = PredictionBank::new(specs, coder.n(), channel_count)?;
    bank.set_workers(args.workers);

    let probes: Vec<usize> = match &args.probes {
        Some(text) => common::parse_ids(text)?,
        None => default_probes(bank.specs(), args.probe_channel),
    };
    for &p in &probes {
        if p >= bank.len() {
            bail!("probe id {p} out of range (bank has {} specs)", bank.len());
        }
    }

    // Stream the log: record probe predictions before each update (strictly
    // causal), then apply the transition ending at the current frame.
    let mut pred_out = std::io::BufWriter::new(std::fs::File::create(args.out.join("predictions.csv"))?);
    write!(pred_out, "step")?;
    for p in &probes {
        write!(pred_out, ",p{p}")?;
    }
    writeln!(pred_out)?;

    let mut prev: Option<(&nexting::SensorFrame, nexting::FeatureVector)> = None;
    for frame in &frames {
        let fv = coder.encode(frame)?;
        write!(pred_out, "{}", frame.step)?;
        for &p in &probes {
            write!(pred_out, ",{}", bank.learner(p).predict(&fv))?;
        }
        writeln!(pred_out)?;
        if let Some((prev_frame, prev_fv)) = &prev {
            bank.bank_step(prev_fv, &fv, prev_frame, frame)
                .with_context(|| format!("learning aborted at step {}", frame.step))?;
        }
        prev = Some((frame, fv));
    }
    pred_out.flush()?;

    let mut cycle_out = std::io::BufWriter::new(std::fs::File::create(args.out.join("cycle_stats.csv"))?);
    writeln!(cycle_out, "step,micros")?;
    for (i, d) in bank.cycle_stats().iter().enumerate() {
        writeln!(cycle_out, "{},{}", i + 1, d.as_micros())?;
    }
    cycle_out.flush()?;

    checkpoint::write_checkpoint(&args.out.join("checkpoint.nxw"), bank.learners())?;

    let probe_signatures: Vec<(usize, String)> = probes
        .iter()
        .map(|&p| (p, common::probe_signature(&bank.specs()[p])))
        .collect();
    let manifest = LearnManifest {
        kind: "learn-run".into(),
        log_sha256: manifest::sha256_file(&args.log)?,
        tiling_sha256: manifest::sha256_file(&args.tiling)?,
        spec_sha256: manifest::sha256_file(&spec_path)?,
        steps: frames.len() as u64,
        n: coder.n(),
        active_per_step: coder.active_per_step(),
        spec_count: bank.len(),
        lambda: args.lambda,
        alpha,
        discounts,
        feature_target_indices: feature_indices,
        feature_seed: args.feature_seed,
        probes: probes.clone(),
        probe_signatures,
        workers: args.workers,
    };
    manifest::save_json(&args.out.join("manifest.json"), &manifest)?;

    let stats = bank.cycle_stats();
    eprintln!(
        "learned {} predictions over {} steps (n = {}, {} active): cycle p50 {:?}, p99 {:?}, max {:?}",
        bank.len(),
        frames.len(),
        coder.n(),
        coder.active_per_step(),
        cycle_percentile(stats, 0.5),
        cycle_percentile(stats, 0.99),
        cycle_percentile(stats, 1.0),
    );
    Ok(())
}

/// Two wheel-power predictions: one that terminates on light saturation and
/// one at a constant two-second timescale.
fn append_power_specs(
    specs: &mut Vec<PredictionSpec>,
    light_channel: usize,
    lambda: f64,
    alpha: f64,
) -> Result<()> {
    let wheels = nexting::sim::WHEEL_POWER_PAIRS;
    let id = specs.len();
    specs.push(PredictionSpec {
        id,
        target: TargetSelector::WheelPower { wheels },
        discount: DiscountRule::Throttled {
            gamma: 0.95,
            throttled_gamma: 0.1,
            trigger_channel: light_channel,
            trigger_threshold: 1.0,
        },
        lambda,
        alpha,
    });
    specs.push(PredictionSpec {
        id: id + 1,
        target: TargetSelector::WheelPower { wheels },
        discount: DiscountRule::Constant { gamma: 0.95 },
        lambda,
        alpha,
    });
    Ok(())
}

fn default_probes(specs: &[PredictionSpec], light_channel: usize) -> Vec<usize> {
    specs
        .iter()
        .filter(|s| {
            matches!(s.target, TargetSelector::SensorChannel { channel } if channel == light_channel)
                || matches!(s.target, TargetSelector::WheelPower { .. })
        })
        .map(|s| s.id)
        .collect()
}
