use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use nexting::learner::Learner;
use nexting::manifest::{self, SolveManifest};
use nexting::oracle;

use crate::common;

#[derive(Args)]
pub struct SolveArgs {
    /// Input sensor log (CSV), the same one the learn run consumed.
    #[arg(long)]
    pub log: PathBuf,
    /// Tiling config file.
    #[arg(long)]
    pub tiling: PathBuf,
    /// Prediction-spec file (usually `<learn out>/specs.txt`).
    #[arg(long)]
    pub specs: PathBuf,
    /// Probe ids to solve for.
    #[arg(long)]
    pub probes: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Ridge added to the normal equations; `auto` scales with the Gram
    /// diagonal, `0` requests the exact minimizer.
    #[arg(long, default_value = "auto")]
    pub ridge: String,
    /// Return truncation tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

pub fn run(args: SolveArgs) -> Result<()> {
    let (frames, channel_names) = common::load_log(&args.log)?;
    let coder = nexting::features::load_tile_coder(&args.tiling)?;
    if coder.min_channels() > channel_names.len() {
        bail!(
            "tiling config references channel {} but the log has only {} channels",
            coder.min_channels() - 1,
            channel_names.len()
        );
    }
    let text = std::fs::read_to_string(&args.specs)
        .with_context(|| format!("cannot read spec file {}", args.specs.display()))?;
    let specs = nexting::horde::parse_prediction_specs(&text, &args.specs.to_string_lossy())?;
    let probes = common::parse_ids(&args.probes)?;
    if probes.is_empty() {
        bail!("probe list is empty");
    }
    common::create_out_dir(&args.out)?;

    let features = common::encode_all(&coder, &frames)?;

    // Returns first: each probe's truncation horizon decides how much of the
    // log its least-squares window covers.
    let mut returns_by_probe = BTreeMap::new();
    for &p in &probes {
        let spec = specs
            .iter()
            .find(|s| s.id == p)
            .with_context(|| format!("probe id {p} not present in {}", args.specs.display()))?;
        let (targets, gammas) = oracle::series_for_spec(spec, &frames, &features)?;
        let returns = oracle::compute_returns(&targets, &gammas, args.eps)
            .with_context(|| format!("cannot compute returns for probe {p}"))?;
        oracle::write_returns_csv(&args.out.join(format!("returns_{p}.csv")), &returns)?;
        returns_by_probe.insert(p, returns);
    }

    // Group probes by window length so the Gram accumulation and
    // factorization are shared where possible.
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&p, returns) in &returns_by_probe {
        groups.entry(returns.values.len()).or_default().push(p);
    }

    let mut residuals = Vec::new();
    let mut horizons = Vec::new();
    let mut solutions: Vec<Learner> = Vec::new();
    let mut ridge_used = 0.0;
    for (&window, group) in &groups {
        let ridge = match args.ridge.as_str() {
            "auto" => oracle::default_ridge(&features, window),
            other => other
                .parse::<f64>()
                .with_context(|| format!("invalid ridge `{other}`"))?,
        };
        ridge_used = ridge;
        let group_returns: Vec<&oracle::ReturnSeries> =
            group.iter().map(|p| &returns_by_probe[p]).collect();
        let group_solutions = oracle::solve_offline_group(&features, &group_returns, ridge)
            .with_context(|| format!("offline solve failed for probes {group:?}"))?;
        for (&p, solution) in group.iter().zip(group_solutions) {
            let returns = &returns_by_probe[&p];
            let mut learner = Learner::new(p, coder.n());
            learner.set_theta(&solution.theta_star)?;
            solutions.push(learner);
            residuals.push((p, solution.residual_rmse));
            horizons.push((p, returns.horizon));
            eprintln!(
                "probe {p}: window {window} steps, horizon {}, residual RMSE {:.6}",
                returns.horizon, solution.residual_rmse
            );
        }
    }
    solutions.sort_by_key(|l| l.id());
    residuals.sort_by_key(|&(p, _)| p);
    horizons.sort_by_key(|&(p, _)| p);
    nexting::checkpoint::write_checkpoint(&args.out.join("thetastar.nxw"), &solutions)?;

    let probe_signatures: Vec<(usize, String)> = probes
        .iter()
        .map(|&p| {
            let spec = specs.iter().find(|s| s.id == p).unwrap();
            (p, common::probe_signature(spec))
        })
        .collect();
    let manifest = SolveManifest {
        kind: "solve-run".into(),
        log_sha256: manifest::sha256_file(&args.log)?,
        tiling_sha256: manifest::sha256_file(&args.tiling)?,
        spec_sha256: manifest::sha256_file(&args.specs)?,
        steps: frames.len() as u64,
        n: coder.n(),
        ridge: ridge_used,
        truncation_eps: args.eps,
        probes,
        probe_signatures,
        residuals,
        horizons,
    };
    manifest::save_json(&args.out.join("manifest.json"), &manifest)?;
    Ok(())
}
