use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use nexting::eval;
use nexting::manifest::{self, LearnManifest, SolveManifest};
use nexting::oracle;

use crate::common;

#[derive(Args)]
pub struct ReportArgs {
    /// Learn runs to report, as `<label>=<dir>`; repeatable. Labels name the
    /// algorithm variants (e.g. `td_lambda=runs/learn`).
    #[arg(long = "learn", required = true)]
    pub learn_runs: Vec<String>,
    /// Solve run directory providing returns and offline residuals.
    #[arg(long)]
    pub solve: PathBuf,
    /// The sensor log all runs consumed (for event alignment).
    #[arg(long)]
    pub log: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Learning-curve bin size in steps.
    #[arg(long, default_value_t = 1000)]
    pub bin_size: usize,
    /// Event-alignment window before onset.
    #[arg(long, default_value_t = 100)]
    pub before: usize,
    /// Event-alignment window after onset.
    #[arg(long, default_value_t = 200)]
    pub after: usize,
    /// Saturation threshold for event detection.
    #[arg(long, default_value_t = 0.99)]
    pub threshold: f64,
    /// Refractory steps between detected events.
    #[arg(long, default_value_t = 100)]
    pub refractory: usize,
    /// Channel used for event onsets (default: the simulator light channel).
    #[arg(long, default_value_t = nexting::sim::CH_LIGHT)]
    pub event_channel: usize,
    /// Allow learn runs with different representations (tiling/spec files)
    /// than the solve run; probes are then matched by target signature and
    /// only log identity is enforced.
    #[arg(long, default_value_t = false)]
    pub allow_variants: bool,
}

pub fn run(args: ReportArgs) -> Result<()> {
    let solve_manifest: SolveManifest = manifest::load_json(&args.solve.join("manifest.json"))?;
    let log_sha = manifest::sha256_file(&args.log)?;
    if log_sha != solve_manifest.log_sha256 {
        bail!(
            "manifest mismatch: --log {} is not the log the solve run consumed",
            args.log.display()
        );
    }

    let mut runs = Vec::new();
    for entry in &args.learn_runs {
        let (label, dir) = entry
            .split_once('=')
            .with_context(|| format!("--learn takes `<label>=<dir>`, got `{entry}`"))?;
        let dir = PathBuf::from(dir);
        let learn_manifest: LearnManifest = manifest::load_json(&dir.join("manifest.json"))?;
        if learn_manifest.log_sha256 != log_sha {
            bail!("manifest mismatch: learn run `{label}` consumed a different log");
        }
        if !args.allow_variants {
            manifest::check_chain(
                &format!("learn run `{label}`"),
                (
                    &learn_manifest.log_sha256,
                    &learn_manifest.tiling_sha256,
                    &learn_manifest.spec_sha256,
                ),
                "solve run",
                (
                    &solve_manifest.log_sha256,
                    &solve_manifest.tiling_sha256,
                    &solve_manifest.spec_sha256,
                ),
            )?;
        }
        runs.push((label.to_string(), dir, learn_manifest));
    }

    common::create_out_dir(&args.out)?;
    let (frames, _) = common::load_log(&args.log)?;
    let event_signal: Vec<f64> = frames
        .iter()
        .map(|f| f.channels[args.event_channel])
        .collect();
    let onsets = eval::detect_events(&event_signal, args.threshold, args.refractory);
    let residuals: HashMap<usize, f64> = solve_manifest.residuals.iter().copied().collect();
    let solve_signatures: HashMap<&str, usize> = solve_manifest
        .probe_signatures
        .iter()
        .map(|(id, sig)| (sig.as_str(), *id))
        .collect();

    let mut summary = std::io::BufWriter::new(std::fs::File::create(args.out.join("summary.csv"))?);
    writeln!(
        summary,
        "label,probe,signature,gamma,rmse_final_bin,rmse_final_quarter,thetastar_residual_normalized,events_aligned"
    )?;

    let mut matched_any = false;
    for (label, dir, learn_manifest) in &runs {
        let predictions = read_predictions(&dir.join("predictions.csv"))?;
        for (probe, signature) in &learn_manifest.probe_signatures {
            let Some(&solve_probe) = solve_signatures.get(signature.as_str()) else {
                continue;
            };
            let Some(prediction) = predictions.get(probe) else {
                continue;
            };
            matched_any = true;
            let returns =
                oracle::read_returns_csv(&args.solve.join(format!("returns_{solve_probe}.csv")))?;
            let gamma = gamma_of_signature(signature)?;

            let curve = eval::normalized_rmse(prediction, &returns, gamma, args.bin_size)?;
            eval::write_curve_csv(
                &args.out.join(format!("curve_{label}_p{probe}.csv")),
                &curve,
            )?;

            let window = returns.len();
            let final_quarter =
                eval::normalized_rmse_span(prediction, &returns, gamma, window * 3 / 4..window)?;
            let residual_norm = residuals
                .get(&solve_probe)
                .map(|r| r * (1.0 - gamma))
                .unwrap_or(f64::NAN);

            let aligned = eval::align_events(
                &onsets,
                &event_signal,
                &returns,
                prediction,
                args.before,
                args.after,
            );
            let events = match &aligned {
                Ok(a) => a.event_count,
                Err(_) => 0,
            };
            if let Ok(a) = aligned {
                eval::write_aligned_csv(&args.out.join(format!("aligned_{label}_p{probe}.csv")), &a)?;
            }

            writeln!(
                summary,
                "{label},{probe},{signature},{gamma},{},{final_quarter},{residual_norm},{events}",
                curve.final_value().unwrap_or(f64::NAN),
            )?;
        }
    }
    if !matched_any {
        bail!("no learn-run probes matched the solve run's probes; nothing to report");
    }
    summary.flush()?;
    eprintln!("report written to {}", args.out.display());
    Ok(())
}

/// Reads `step,p<id>,...` per-step probe predictions.
fn read_predictions(path: &Path) -> Result<HashMap<usize, Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read predictions {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("predictions file is empty")?;
    let ids: Vec<usize> = header
        .split(',')
        .skip(1)
        .map(|col| {
            col.strip_prefix('p')
                .and_then(|s| s.parse().ok())
                .with_context(|| format!("bad predictions column `{col}`"))
        })
        .collect::<Result<_>>()?;
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    for line in lines {
        if line.is_empty() {
            continue;
        }
        for (slot, field) in series.iter_mut().zip(line.split(',').skip(1)) {
            slot.push(field.parse::<f64>()?);
        }
    }
    Ok(ids.into_iter().zip(series).collect())
}

/// Base discount encoded in a probe signature (`... gamma:<g>` or
/// `... throttle:<g>:...`).
fn gamma_of_signature(signature: &str) -> Result<f64> {
    let rule = signature
        .split_whitespace()
        .nth(1)
        .with_context(|| format!("malformed signature `{signature}`"))?;
    let mut parts = rule.split(':');
    let kind = parts.next().unwrap_or_default();
    let gamma = parts
        .next()
        .with_context(|| format!("malformed discount in signature `{signature}`"))?;
    match kind {
        "gamma" | "throttle" => Ok(gamma.parse()?),
        other => bail!("unknown discount kind `{other}` in signature"),
    }
}
