use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use nexting::manifest::{self, LogManifest};
use nexting::sim::{PenWorld, SimParams, CHANNEL_NAMES};

#[derive(Args)]
pub struct SimulateArgs {
    /// Output CSV log path; a `<log>.manifest.json` is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of 0.1 s steps to simulate.
    #[arg(long)]
    pub steps: u64,
    /// Simulation seed; fully determines the log.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optional TOML file of simulator parameters; flags below override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub pen_side: Option<f64>,
    #[arg(long)]
    pub p_random: Option<f64>,
    #[arg(long)]
    pub robot_speed: Option<f64>,
    #[arg(long)]
    pub pause_interval: Option<u64>,
    #[arg(long)]
    pub pause_steps: Option<u64>,
}

pub fn run(args: SimulateArgs) -> Result<()> {
    if args.steps == 0 {
        bail!("--steps must be at least 1");
    }
    let mut params = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read params file {}", path.display()))?;
            toml::from_str::<SimParams>(&text)
                .with_context(|| format!("invalid params file {}", path.display()))?
        }
        None => SimParams::default(),
    };
    params.seed = args.seed;
    if let Some(v) = args.pen_side {
        params.pen_side = v;
    }
    if let Some(v) = args.p_random {
        params.p_random = v;
    }
    if let Some(v) = args.robot_speed {
        params.robot_speed = v;
    }
    if let Some(v) = args.pause_interval {
        params.pause_interval_steps = v;
    }
    if let Some(v) = args.pause_steps {
        params.pause_steps = v;
    }

    let mut world = PenWorld::new(params.clone());
    let frames = world.run(args.steps);
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    nexting::sim::write_log(&args.out, &frames, &CHANNEL_NAMES)?;

    let manifest = LogManifest {
        kind: "sim-log".into(),
        params,
        steps: args.steps,
        channel_names: CHANNEL_NAMES.iter().map(|s| s.to_string()).collect(),
        log_sha256: manifest::sha256_file(&args.out)?,
    };
    let manifest_path = manifest_path_for(&args.out);
    manifest::save_json(&manifest_path, &manifest)?;
    eprintln!(
        "wrote {} ({} rows) and {}",
        args.out.display(),
        args.steps,
        manifest_path.display()
    );
    Ok(())
}

pub fn manifest_path_for(log: &std::path::Path) -> PathBuf {
    let mut os = log.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}
