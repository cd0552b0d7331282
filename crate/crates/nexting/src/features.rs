//! Tile-coded sparse binary features over normalized sensor channels.
//!
//! A [`TileCoder`] is built from a list of [`TilingSpec`]s. Each spec lays
//! several overlapping tilings over one channel (or a channel pair), every
//! tiling shifted by a deterministic random offset. Encoding a frame
//! activates exactly one tile per tiling plus a bias feature that is always
//! on, so the active count is constant and known at construction time.
//!
//! Index layout is deterministic: index 0 is the bias, then each spec in
//! declaration order occupies a contiguous block, tiling by tiling.

use crate::error::{Error, Result};

/// One time step of the sensor stream: normalized channel readings plus the
/// action executed this step.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorFrame {
    /// Time index; one step is ~0.1 s of simulated time.
    pub step: u64,
    /// Action id executed this step.
    pub action: u8,
    /// Channel readings, each in [0, 1]. Length is constant across a run.
    pub channels: Vec<f64>,
}

/// What a tiling spec covers: a single channel or a joint channel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TilingKind {
    OneDim { channel: usize },
    Pairwise { channel_a: usize, channel_b: usize },
}

/// A group of overlapping tilings over one channel or channel pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TilingSpec {
    pub kind: TilingKind,
    /// Intervals per dimension; each tiling splits [0, 1] into this many cells.
    pub intervals: u32,
    /// Number of overlapping tilings at distinct offsets.
    pub tilings: u32,
    /// Seed for the deterministic offset generator.
    pub offset_seed: u64,
}

impl TilingSpec {
    fn dims(&self) -> usize {
        match self.kind {
            TilingKind::OneDim { .. } => 1,
            TilingKind::Pairwise { .. } => 2,
        }
    }

    /// Cells per tiling: intervals^dims.
    fn cells(&self) -> usize {
        let iv = self.intervals as usize;
        match self.kind {
            TilingKind::OneDim { .. } => iv,
            TilingKind::Pairwise { .. } => iv * iv,
        }
    }

    fn max_channel(&self) -> usize {
        match self.kind {
            TilingKind::OneDim { channel } => channel,
            TilingKind::Pairwise { channel_a, channel_b } => channel_a.max(channel_b),
        }
    }
}

/// Sparse binary feature vector: the sorted set of active indices in [0, n).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    active: Vec<u32>,
    n: usize,
}

impl FeatureVector {
    /// Builds a feature vector from raw indices. Sorts and validates them.
    pub fn new(mut active: Vec<u32>, n: usize) -> Result<Self> {
        active.sort_unstable();
        if active.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("duplicate active feature index".into()));
        }
        if let Some(&last) = active.last() {
            if last as usize >= n {
                return Err(Error::Input(format!(
                    "active index {last} out of range for dimension {n}"
                )));
            }
        }
        Ok(Self { active, n })
    }

    /// Active indices, strictly ascending.
    pub fn active(&self) -> &[u32] {
        &self.active
    }

    /// Feature dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether a component is active (1) or not (0).
    pub fn contains(&self, index: usize) -> bool {
        index <= u32::MAX as usize && self.active.binary_search(&(index as u32)).is_ok()
    }

    /// Sparse inner product with a dense weight vector.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.n);
        self.active.iter().map(|&i| weights[i as usize]).sum()
    }
}

/// Immutable feature constructor. Safe to share across workers.
#[derive(Debug, Clone)]
pub struct TileCoder {
    specs: Vec<TilingSpec>,
    /// Per spec: first index of its block.
    bases: Vec<usize>,
    /// Per spec, per tiling: offset for each dimension, in [0, 1/intervals).
    offsets: Vec<Vec<[f64; 2]>>,
    n: usize,
    active_per_step: usize,
    min_channels: usize,
}

/// splitmix64-style counter mix: a pure function of (seed, counter), stable
/// across platforms.
fn mix64(seed: u64, counter: u64) -> u64 {
    let mut z = seed ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform f64 in [0, 1) from the top 53 bits.
fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps a value in [0, 1] to its interval index within one tiling.
///
/// The offset shifts the grid; values exactly at the top edge clamp into the
/// last interval so saturated sensors still land in a valid tile.
pub fn tile_index_1d(value: f64, intervals: u32, offset: f64) -> u32 {
    debug_assert!((0.0..=1.0).contains(&value));
    debug_assert!(offset >= 0.0 && offset < 1.0 / intervals as f64);
    let idx = ((value + offset) * intervals as f64).floor() as i64;
    idx.clamp(0, intervals as i64 - 1) as u32
}

impl TileCoder {
    /// Builds a coder from tiling specs. Index layout is deterministic:
    /// bias at 0, then each spec's block in declaration order.
    pub fn build(specs: Vec<TilingSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Config(
                "tiling spec list is empty; use TileCoder::bias_only for a bias-only coder".into(),
            ));
        }
        Self::from_specs(specs)
    }

    /// The trivial representation: a single bias feature, n = 1.
    pub fn bias_only() -> Self {
        Self {
            specs: Vec::new(),
            bases: Vec::new(),
            offsets: Vec::new(),
            n: 1,
            active_per_step: 1,
            min_channels: 0,
        }
    }

    fn from_specs(specs: Vec<TilingSpec>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for spec in &specs {
            if spec.intervals == 0 || spec.tilings == 0 {
                return Err(Error::Config(format!(
                    "tiling spec {:?} has zero intervals or tilings",
                    spec.kind
                )));
            }
            if let TilingKind::Pairwise { channel_a, channel_b } = spec.kind {
                if channel_a == channel_b {
                    return Err(Error::Config(format!(
                        "pairwise spec tiles channel {channel_a} with itself"
                    )));
                }
            }
            if !seen.insert((spec.kind, spec.offset_seed)) {
                return Err(Error::Config(format!(
                    "duplicate tiling spec (kind {:?}, seed {})",
                    spec.kind, spec.offset_seed
                )));
            }
        }

        let mut bases = Vec::with_capacity(specs.len());
        let mut offsets = Vec::with_capacity(specs.len());
        let mut next = 1usize; // 0 is the bias
        let mut active = 1usize;
        let mut min_channels = 0usize;
        for spec in &specs {
            bases.push(next);
            next += spec.cells() * spec.tilings as usize;
            active += spec.tilings as usize;
            min_channels = min_channels.max(spec.max_channel() + 1);

            let width = 1.0 / spec.intervals as f64;
            let dims = spec.dims();
            let per_tiling = (0..spec.tilings as u64)
                .map(|t| {
                    let mut o = [0.0f64; 2];
                    for (d, slot) in o.iter_mut().enumerate().take(dims) {
                        *slot = unit_interval(mix64(spec.offset_seed, t * 2 + d as u64)) * width;
                    }
                    o
                })
                .collect();
            offsets.push(per_tiling);
        }

        Ok(Self {
            specs,
            bases,
            offsets,
            n: next,
            active_per_step: active,
            min_channels,
        })
    }

    /// Total feature dimension (one slot per tile plus the bias).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of active features per encoded frame, independent of input.
    pub fn active_per_step(&self) -> usize {
        self.active_per_step
    }

    /// Minimum channel count a frame must carry.
    pub fn min_channels(&self) -> usize {
        self.min_channels
    }

    pub fn specs(&self) -> &[TilingSpec] {
        &self.specs
    }

    /// Tiling offsets for one spec, per tiling and dimension.
    pub fn spec_offsets(&self, spec_index: usize) -> &[[f64; 2]] {
        &self.offsets[spec_index]
    }

    /// Encodes a frame as its sparse binary feature vector. Pure function of
    /// (coder, frame): no history, no averaging.
    pub fn encode(&self, frame: &SensorFrame) -> Result<FeatureVector> {
        if frame.channels.len() < self.min_channels {
            return Err(Error::Input(format!(
                "frame has {} channels but the coder references channel {}",
                frame.channels.len(),
                self.min_channels - 1
            )));
        }
        let mut active = Vec::with_capacity(self.active_per_step);
        active.push(0u32);
        for (s, spec) in self.specs.iter().enumerate() {
            let cells = spec.cells();
            let mut base = self.bases[s];
            match spec.kind {
                TilingKind::OneDim { channel } => {
                    let v = self.channel_value(frame, channel)?;
                    for off in &self.offsets[s] {
                        let cell = tile_index_1d(v, spec.intervals, off[0]);
                        active.push((base + cell as usize) as u32);
                        base += cells;
                    }
                }
                TilingKind::Pairwise { channel_a, channel_b } => {
                    let va = self.channel_value(frame, channel_a)?;
                    let vb = self.channel_value(frame, channel_b)?;
                    for off in &self.offsets[s] {
                        let ca = tile_index_1d(va, spec.intervals, off[0]);
                        let cb = tile_index_1d(vb, spec.intervals, off[1]);
                        let cell = ca as usize * spec.intervals as usize + cb as usize;
                        active.push((base + cell) as u32);
                        base += cells;
                    }
                }
            }
        }
        debug_assert!(active.windows(2).all(|w| w[0] < w[1]));
        Ok(FeatureVector { active, n: self.n })
    }

    fn channel_value(&self, frame: &SensorFrame, channel: usize) -> Result<f64> {
        let v = frame.channels[channel];
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Input(format!(
                "channel {channel} value {v} outside [0, 1] at step {}",
                frame.step
            )));
        }
        Ok(v)
    }
}

/// Parses the line-oriented tiling config format.
///
/// One spec per line, `#` starts a comment:
///
/// ```text
/// tile1d <channel> <intervals> <tilings> <seed>
/// tile2d <chanA> <chanB> <intervals> <tilings> <seed>
/// ```
///
/// A file with no spec lines describes the bias-only representation.
pub fn parse_tiling_config(text: &str, path: &str) -> Result<Vec<TilingSpec>> {
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
        let parse_num = |s: &str, what: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| err(format!("invalid {what} `{s}`")))
        };
        match fields[0] {
            "tile1d" => {
                if fields.len() != 5 {
                    return Err(err(format!(
                        "tile1d takes 4 fields (channel intervals tilings seed), got {}",
                        fields.len() - 1
                    )));
                }
                specs.push(TilingSpec {
                    kind: TilingKind::OneDim {
                        channel: parse_num(fields[1], "channel")? as usize,
                    },
                    intervals: parse_num(fields[2], "intervals")? as u32,
                    tilings: parse_num(fields[3], "tilings")? as u32,
                    offset_seed: parse_num(fields[4], "seed")?,
                });
            }
            "tile2d" => {
                if fields.len() != 6 {
                    return Err(err(format!(
                        "tile2d takes 5 fields (chanA chanB intervals tilings seed), got {}",
                        fields.len() - 1
                    )));
                }
                specs.push(TilingSpec {
                    kind: TilingKind::Pairwise {
                        channel_a: parse_num(fields[1], "channel")? as usize,
                        channel_b: parse_num(fields[2], "channel")? as usize,
                    },
                    intervals: parse_num(fields[3], "intervals")? as u32,
                    tilings: parse_num(fields[4], "tilings")? as u32,
                    offset_seed: parse_num(fields[5], "seed")?,
                });
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(specs)
}

/// Loads a tiling config file and builds the coder. An empty config (no
/// spec lines) yields the bias-only coder.
pub fn load_tile_coder(path: &std::path::Path) -> Result<TileCoder> {
    let text = std::fs::read_to_string(path)?;
    let specs = parse_tiling_config(&text, &path.to_string_lossy())?;
    if specs.is_empty() {
        Ok(TileCoder::bias_only())
    } else {
        TileCoder::build(specs)
    }
}
