//! Deterministic stand-in for a sensor-rich robot circling a small square
//! pen with a lamp on one wall.
//!
//! The robot is a holonomic point with a radius, driven by a stochastic
//! wall-following policy at 10 Hz-equivalent steps. Every emitted channel is
//! normalized to [0, 1]. The channel set is deliberately small but keeps the
//! phenomena the learners care about: a light channel that saturates once
//! per loop, distance sensors that drive the policy, per-wheel voltage and
//! current for power targets, and a motor temperature that forces periodic
//! cooling pauses.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SensorFrame;

pub const CH_IR_FRONT: usize = 0;
pub const CH_IR_SIDE: usize = 1;
pub const CH_LIGHT: usize = 2;
pub const CH_LIGHT_AMBIENT: usize = 3;
pub const CH_MOTOR_V0: usize = 4;
pub const CH_MOTOR_V1: usize = 5;
pub const CH_MOTOR_V2: usize = 6;
pub const CH_MOTOR_C0: usize = 7;
pub const CH_MOTOR_C1: usize = 8;
pub const CH_MOTOR_C2: usize = 9;
pub const CH_MOTOR_TEMP: usize = 10;
pub const CH_HEADING: usize = 11;
pub const CHANNEL_COUNT: usize = 12;

pub const CHANNEL_NAMES: [&str; CHANNEL_COUNT] = [
    "ir_front",
    "ir_side",
    "light",
    "light_ambient",
    "motor_v0",
    "motor_v1",
    "motor_v2",
    "motor_c0",
    "motor_c1",
    "motor_c2",
    "motor_temp",
    "heading",
];

/// The three voltage/current channel pairs, one per wheel.
pub const WHEEL_POWER_PAIRS: [(usize, usize); 3] = [
    (CH_MOTOR_V0, CH_MOTOR_C0),
    (CH_MOTOR_V1, CH_MOTOR_C1),
    (CH_MOTOR_V2, CH_MOTOR_C2),
];

const DT: f64 = 0.1;
const ROBOT_RADIUS: f64 = 0.15;
const IR_RANGE: f64 = 0.8;
const WHEEL_BASE: f64 = 0.15;
const WHEEL_MAX: f64 = 0.5;
const TURN_RATE: f64 = 1.2; // rad/s during a back-turn

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Forward = 0,
    SlideLeft = 1,
    SlideRight = 2,
    BackTurn = 3,
}

impl Action {
    pub fn from_u8(v: u8) -> Option<Action> {
        match v {
            0 => Some(Action::Forward),
            1 => Some(Action::SlideLeft),
            2 => Some(Action::SlideRight),
            3 => Some(Action::BackTurn),
            _ => None,
        }
    }

    pub const ALL: [Action; 4] = [
        Action::Forward,
        Action::SlideLeft,
        Action::SlideRight,
        Action::BackTurn,
    ];
}

/// Simulator parameters; all recorded in the run manifest.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SimParams {
    /// Pen side length in meters.
    pub pen_side: f64,
    /// Probability of taking a uniform random action instead of the policy's.
    pub p_random: f64,
    /// Forward cruise speed in m/s.
    pub robot_speed: f64,
    /// Mean steps between forced cooling pauses (14 min at 10 Hz).
    pub pause_interval_steps: u64,
    /// Length of each cooling pause in steps.
    pub pause_steps: u64,
    /// Side-proximity band the policy holds: slide toward the wall below the
    /// low edge, away above the high edge (normalized readings).
    pub side_band: (f64, f64),
    /// Front-proximity reading that triggers a back-turn.
    pub obstacle_threshold: f64,
    /// Distance from the lamp within which the light channel reads 1.0.
    pub light_saturation_radius: f64,
    /// Uniform read noise amplitude on the distance and light channels
    /// (applied before clamping, so deep saturation still reads 1.0).
    pub sensor_noise: f64,
    /// Stationary standard deviation of the slow lamp-brightness drift
    /// (ambient light wandering over ~100 s). Zero disables it.
    pub lamp_flicker: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            pen_side: 2.0,
            p_random: 0.05,
            robot_speed: 0.2,
            pause_interval_steps: 8400,
            pause_steps: 150,
            side_band: (0.45, 0.8),
            obstacle_threshold: 0.75,
            light_saturation_radius: 0.6,
            sensor_noise: 0.04,
            lamp_flicker: 0.12,
            seed: 0,
        }
    }
}

/// Policy decision, noting whether the exploration coin replaced the
/// deterministic choice.
#[derive(Debug, Clone, Copy)]
pub struct PolicyStep {
    pub action: Action,
    pub exploratory: bool,
}

/// The pen, the lamp, and the robot's full state.
pub struct PenWorld {
    params: SimParams,
    lamp: (f64, f64),
    x: f64,
    y: f64,
    heading: f64,
    wheel_speeds: [f64; 3],
    /// Current noisy readings (front, side, light, ambient); refreshed once
    /// per step so the policy and the emitted frame see the same values.
    sensed: [f64; 4],
    /// Slow multiplicative drift of the lamp brightness around 1.0.
    lamp_level: f64,
    overheat_timer: u64,
    interval_drawn: u64,
    pause_remaining: u64,
    /// (first step, length) of every cooling pause so far; recorded in log
    /// manifests so offline fits can see where the robot stood still.
    pause_events: Vec<(u64, u64)>,
    step_count: u64,
    rng: ChaCha8Rng,
}

impl PenWorld {
    pub fn new(params: SimParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let lamp = (0.0, params.pen_side / 2.0);
        let interval = draw_interval(&mut rng, params.pause_interval_steps);
        let mut world = Self {
            x: params.pen_side / 4.0,
            y: ROBOT_RADIUS + 0.3,
            heading: 0.0,
            wheel_speeds: [0.0; 3],
            sensed: [0.0; 4],
            lamp_level: 1.0,
            overheat_timer: interval,
            interval_drawn: interval,
            pause_remaining: 0,
            step_count: 0,
            lamp,
            params,
            rng,
        };
        world.sense();
        world
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn paused(&self) -> bool {
        self.pause_remaining > 0
    }

    /// Distance from the robot center to the pen wall along a direction.
    fn wall_distance(&self, dx: f64, dy: f64) -> f64 {
        let side = self.params.pen_side;
        let tx = if dx > 0.0 {
            (side - self.x) / dx
        } else if dx < 0.0 {
            -self.x / dx
        } else {
            f64::INFINITY
        };
        let ty = if dy > 0.0 {
            (side - self.y) / dy
        } else if dy < 0.0 {
            -self.y / dy
        } else {
            f64::INFINITY
        };
        tx.min(ty).max(0.0)
    }

    /// Proximity reading: 1.0 at wall contact, 0.0 beyond the sensor range.
    fn proximity(&self, dx: f64, dy: f64) -> f64 {
        let d = self.wall_distance(dx, dy);
        (1.0 - (d - ROBOT_RADIUS) / IR_RANGE).clamp(0.0, 1.0)
    }

    fn front_raw(&self) -> f64 {
        self.proximity(self.heading.cos(), self.heading.sin())
    }

    /// The side sensor points to the robot's right, toward the followed wall.
    fn side_raw(&self) -> f64 {
        self.proximity(self.heading.sin(), -self.heading.cos())
    }

    fn lamp_distance(&self) -> f64 {
        ((self.x - self.lamp.0).powi(2) + (self.y - self.lamp.1).powi(2))
            .sqrt()
            .max(1e-9)
    }

    fn light_raw(&self) -> f64 {
        let r = self.params.light_saturation_radius / self.lamp_distance();
        self.lamp_level * r * r
    }

    fn ambient_raw(&self) -> f64 {
        self.lamp_level * 0.9 * (0.5 / self.lamp_distance()).min(1.0)
    }

    /// AR(1) drift of the lamp brightness with a ~100 s time constant.
    fn drift_lamp(&mut self) {
        let target_std = self.params.lamp_flicker;
        if target_std <= 0.0 {
            return;
        }
        const RHO: f64 = 0.999;
        // Uniform innovation scaled so the stationary std matches the param.
        let innovation_std = target_std * (1.0 - RHO * RHO).sqrt();
        let xi = (2.0 * self.rng.gen::<f64>() - 1.0) * (3.0f64).sqrt();
        self.lamp_level = 1.0 + RHO * (self.lamp_level - 1.0) + innovation_std * xi;
        self.lamp_level = self.lamp_level.clamp(0.6, 1.4);
    }

    /// Refreshes the noisy exteroceptive readings for the current pose.
    /// Noise is added before clamping, so deep saturation still reads 1.0.
    fn sense(&mut self) {
        let amp = self.params.sensor_noise;
        let raw = [self.front_raw(), self.side_raw(), self.light_raw(), self.ambient_raw()];
        for (slot, r) in self.sensed.iter_mut().zip(raw) {
            let noise = amp * (2.0 * self.rng.gen::<f64>() - 1.0);
            *slot = (r + noise).clamp(0.0, 1.0);
        }
    }

    /// The stochastic wall-following policy: forward by default, slide to
    /// hold the side proximity inside the band, back-turn off obstacles, and
    /// a uniform random action with probability `p_random`.
    pub fn policy_step(&mut self) -> PolicyStep {
        if self.rng.gen::<f64>() < self.params.p_random {
            let action = Action::ALL[self.rng.gen_range(0..Action::ALL.len())];
            return PolicyStep { action, exploratory: true };
        }
        let front = self.sensed[0];
        let side = self.sensed[1];
        let action = if front >= self.params.obstacle_threshold {
            Action::BackTurn
        } else if side < self.params.side_band.0 {
            Action::SlideRight
        } else if side > self.params.side_band.1 {
            Action::SlideLeft
        } else {
            Action::Forward
        };
        PolicyStep { action, exploratory: false }
    }

    /// Convenience wrapper when the exploration flag is not needed.
    pub fn wall_follow_policy(&mut self) -> Action {
        self.policy_step().action
    }

    /// Advances the world one 0.1 s step under the given action and emits
    /// the resulting sensor frame. During a cooling pause the motors are
    /// stopped and the commanded action has no effect.
    pub fn step(&mut self, action: Action) -> SensorFrame {
        if self.pause_remaining > 0 {
            self.wheel_speeds = [0.0; 3];
            self.pause_remaining -= 1;
            if self.pause_remaining == 0 {
                self.interval_drawn = draw_interval(&mut self.rng, self.params.pause_interval_steps);
                self.overheat_timer = self.interval_drawn;
            }
        } else {
            let v = self.params.robot_speed;
            // Slides carry a slight rotation away from / toward the followed
            // wall so the heading re-aligns instead of fighting it forever.
            let (vx, vy, omega) = match action {
                Action::Forward => (v, 0.0, 0.0),
                Action::SlideLeft => (0.8 * v, 0.6 * v, 0.25),
                Action::SlideRight => (0.8 * v, -0.6 * v, -0.25),
                Action::BackTurn => (-0.6 * v, 0.0, TURN_RATE),
            };
            self.heading += omega * DT;
            let (sin, cos) = self.heading.sin_cos();
            self.x += (vx * cos - vy * sin) * DT;
            self.y += (vx * sin + vy * cos) * DT;
            let lo = ROBOT_RADIUS;
            let hi = self.params.pen_side - ROBOT_RADIUS;
            self.x = self.x.clamp(lo, hi);
            self.y = self.y.clamp(lo, hi);
            // Kiwi-drive wheel speeds for the commanded body velocity.
            for (i, beta) in [30f64, 150.0, 270.0].iter().enumerate() {
                let b = beta.to_radians();
                self.wheel_speeds[i] = -b.sin() * vx + b.cos() * vy + WHEEL_BASE * omega;
            }
            self.overheat_timer = self.overheat_timer.saturating_sub(1);
            if self.overheat_timer == 0 {
                self.pause_remaining = self.params.pause_steps;
            }
        }

        self.drift_lamp();
        self.sense();
        let mut channels = vec![0.0f64; CHANNEL_COUNT];
        channels[CH_IR_FRONT] = self.sensed[0];
        channels[CH_IR_SIDE] = self.sensed[1];
        channels[CH_LIGHT] = self.sensed[2];
        channels[CH_LIGHT_AMBIENT] = self.sensed[3];
        for i in 0..3 {
            let voltage = (self.wheel_speeds[i].abs() / WHEEL_MAX).min(1.0);
            channels[CH_MOTOR_V0 + i] = voltage;
            channels[CH_MOTOR_C0 + i] = if voltage == 0.0 {
                0.0
            } else {
                (voltage * 0.8 + 0.05 * self.rng.gen::<f64>()).min(1.0)
            };
        }
        channels[CH_MOTOR_TEMP] = if self.pause_remaining > 0 {
            self.pause_remaining as f64 / self.params.pause_steps as f64
        } else {
            1.0 - self.overheat_timer as f64 / self.interval_drawn as f64
        };
        channels[CH_HEADING] = self.heading.rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;

        debug_assert!(channels.iter().all(|c| (0.0..=1.0).contains(c)));
        let frame = SensorFrame {
            step: self.step_count,
            action: action as u8,
            channels,
        };
        self.step_count += 1;
        frame
    }

    /// Runs the wall-following policy for `steps` steps.
    pub fn run(&mut self, steps: u64) -> Vec<SensorFrame> {
        (0..steps)
            .map(|_| {
                let decision = self.policy_step();
                self.step(decision.action)
            })
            .collect()
    }
}

fn draw_interval(rng: &mut ChaCha8Rng, mean: u64) -> u64 {
    // Uniform jitter of +-10% around the configured mean.
    let jitter = 0.9 + 0.2 * rng.gen::<f64>();
    ((mean as f64 * jitter).round() as u64).max(1)
}

/// Writes frames as CSV: header `step,action,<channel names...>`, channel
/// values at fixed 6-decimal precision so a load/write cycle is bit-exact.
pub fn write_log(path: &std::path::Path, frames: &[SensorFrame], channel_names: &[&str]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "step,action")?;
    for name in channel_names {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for frame in frames {
        if frame.channels.len() != channel_names.len() {
            return Err(Error::Input(format!(
                "frame at step {} has {} channels, header has {}",
                frame.step,
                frame.channels.len(),
                channel_names.len()
            )));
        }
        write!(out, "{},{}", frame.step, frame.action)?;
        for v in &frame.channels {
            write!(out, ",{v:.6}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Loads a CSV log. Returns the frames and the channel names from the
/// header. Malformed rows report their line number.
pub fn load_log(path: &std::path::Path) -> Result<(Vec<SensorFrame>, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: display.clone(),
        line: 1,
        message: "empty file; expected a header row".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 || columns[0] != "step" || columns[1] != "action" {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: format!("header must start with `step,action`, got `{header}`"),
        });
    }
    let names: Vec<String> = columns[2..].iter().map(|s| s.to_string()).collect();

    let mut frames = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: display.clone(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(err(format!(
                "expected {} columns, got {}",
                columns.len(),
                fields.len()
            )));
        }
        let step: u64 = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid step `{}`", fields[0])))?;
        let action: u8 = fields[1]
            .parse()
            .map_err(|_| err(format!("invalid action `{}`", fields[1])))?;
        let mut channels = Vec::with_capacity(names.len());
        for f in &fields[2..] {
            let v: f64 = f.parse().map_err(|_| err(format!("invalid value `{f}`")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(err(format!("channel value {v} outside [0, 1]")));
            }
            channels.push(v);
        }
        frames.push(SensorFrame { step, action, channels });
    }
    Ok((frames, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_params(seed: u64) -> SimParams {
        SimParams {
            p_random: 0.0,
            sensor_noise: 0.0,
            lamp_flicker: 0.0,
            seed,
            ..SimParams::default()
        }
    }

    #[test]
    fn same_seed_same_frames() {
        let mut a = PenWorld::new(SimParams { seed: 7, ..SimParams::default() });
        let mut b = PenWorld::new(SimParams { seed: 7, ..SimParams::default() });
        assert_eq!(a.run(500), b.run(500));
    }

    #[test]
    fn channels_stay_normalized() {
        let mut world = PenWorld::new(SimParams {
            seed: 3,
            pause_interval_steps: 400, // force pauses into the window
            pause_steps: 50,
            ..SimParams::default()
        });
        for frame in world.run(2000) {
            assert_eq!(frame.channels.len(), CHANNEL_COUNT);
            for (c, v) in frame.channels.iter().enumerate() {
                assert!(
                    (0.0..=1.0).contains(v),
                    "channel {c} = {v} at step {}",
                    frame.step
                );
            }
        }
    }

    #[test]
    fn light_saturates_next_to_the_lamp() {
        let mut world = PenWorld::new(quiet_params(1));
        world.x = 0.3;
        world.y = world.params.pen_side / 2.0; // right next to the lamp
        let frame = world.step(Action::Forward);
        assert_eq!(frame.channels[CH_LIGHT], 1.0);
    }

    #[test]
    fn pause_stops_the_motors() {
        let mut world = PenWorld::new(quiet_params(5));
        world.overheat_timer = 1;
        world.step(Action::Forward); // consumes the timer, schedules the pause
        assert!(world.paused());
        let frame = world.step(Action::Forward);
        for ch in CH_MOTOR_V0..=CH_MOTOR_C2 {
            assert_eq!(frame.channels[ch], 0.0, "channel {ch} during pause");
        }
        // And motion is frozen.
        let (x, y) = (world.x, world.y);
        world.step(Action::Forward);
        assert_eq!((world.x, world.y), (x, y));
    }

    #[test]
    fn policy_backs_off_walls_and_cruises_in_band() {
        let mut world = PenWorld::new(quiet_params(2));
        // Facing the east wall from up close: front saturated.
        world.x = world.params.pen_side - ROBOT_RADIUS - 0.05;
        world.y = 1.0;
        world.heading = 0.0;
        world.sense();
        assert!(world.sensed[0] >= world.params.obstacle_threshold);
        assert_eq!(world.wall_follow_policy(), Action::BackTurn);

        // Mid-pen heading east with the south wall at a comfortable distance.
        world.x = 1.0;
        world.y = 0.55;
        world.heading = 0.0;
        world.sense();
        let side = world.sensed[1];
        assert!(side > world.params.side_band.0 && side < world.params.side_band.1);
        assert_eq!(world.wall_follow_policy(), Action::Forward);

        // Too far from the side wall: slide toward it.
        world.y = 1.2;
        world.sense();
        assert!(world.sensed[1] < world.params.side_band.0);
        assert_eq!(world.wall_follow_policy(), Action::SlideRight);
    }

    #[test]
    fn exploration_rate_matches_p() {
        let mut world = PenWorld::new(SimParams { seed: 11, ..SimParams::default() });
        let trials = 1_000_000;
        let mut exploratory = 0u64;
        for _ in 0..trials {
            if world.policy_step().exploratory {
                exploratory += 1;
            }
        }
        let fraction = exploratory as f64 / trials as f64;
        assert!(
            (fraction - 0.05).abs() < 0.005,
            "exploration fraction {fraction}"
        );
    }

    #[test]
    fn pauses_recur_near_the_configured_interval() {
        let params = SimParams {
            seed: 9,
            pause_interval_steps: 1000,
            pause_steps: 100,
            ..SimParams::default()
        };
        let mut world = PenWorld::new(params);
        let frames = world.run(12_000);
        // A pause is a maximal run of steps with all wheel voltages at zero.
        let mut starts = Vec::new();
        let mut in_pause = false;
        for frame in &frames {
            let stopped = (CH_MOTOR_V0..=CH_MOTOR_V2).all(|ch| frame.channels[ch] == 0.0);
            if stopped && !in_pause {
                starts.push(frame.step);
            }
            in_pause = stopped;
        }
        assert!(starts.len() >= 9, "expected ~10 pauses, saw {}", starts.len());
        let gaps: Vec<f64> = starts.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        // Interval plus pause length, with +-20% headroom.
        assert!(
            (mean - 1100.0).abs() < 220.0,
            "mean gap between pause starts {mean}"
        );
    }

    #[test]
    fn loop_period_is_about_forty_seconds() {
        let mut world = PenWorld::new(SimParams { seed: 1, ..SimParams::default() });
        let frames = world.run(30_000);
        let light: Vec<f64> = frames.iter().map(|f| f.channels[CH_LIGHT]).collect();
        let onsets = crate::eval::detect_events(&light, 0.99, 100);
        assert!(onsets.len() > 20, "only {} loops detected", onsets.len());
        let gaps: Vec<f64> = onsets.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        assert!(
            (300.0..=500.0).contains(&mean),
            "mean loop period {mean} steps outside 400 +- 25%"
        );
    }

    #[test]
    fn log_round_trips_bit_exactly() {
        use rand::prelude::*;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        // Values already at the format's 6-decimal precision.
        let frames: Vec<SensorFrame> = (0..1000)
            .map(|step| SensorFrame {
                step,
                action: rng.gen_range(0..4),
                channels: (0..3)
                    .map(|_| rng.gen_range(0..=1_000_000) as f64 / 1e6)
                    .collect(),
            })
            .collect();
        write_log(&path, &frames, &["a", "b", "c"]).unwrap();
        let (loaded, names) = load_log(&path).unwrap();
        assert_eq!(names, vec!["a", "b", "c"]);
        assert_eq!(loaded, frames);

        // write(load(x)) is byte-identical.
        let path2 = dir.path().join("log2.csv");
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write_log(&path2, &loaded, &name_refs).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn empty_log_with_header_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "step,action,light\n").unwrap();
        let (frames, names) = load_log(&path).unwrap();
        assert!(frames.is_empty());
        assert_eq!(names, vec!["light"]);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "step,action,light\n0,0,0.5\n1,0\n").unwrap();
        match load_log(&path).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        std::fs::write(&path, "step,action,light\n0,0,1.5\n").unwrap();
        match load_log(&path).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("outside"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
