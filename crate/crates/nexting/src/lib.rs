//! Parallel multi-timescale prediction over a sensor stream.
//!
//! Thousands of independent linear TD(λ) learners share one tile-coded
//! sparse binary feature representation and advance together, one sensor
//! frame at a time. Each learner answers a "what will this signal sum to
//! over my timescale" question: the target is a raw sensor channel, a
//! feature component, or motor power; the timescale is a (possibly
//! state-dependent) discount.
//!
//! The crate also carries everything needed to validate those predictions
//! offline: ideal returns computed backward over a logged run, the
//! least-squares weights that bound what the representation can express, a
//! deterministic pen-world simulator as a data source, and an evaluation
//! harness for normalized learning curves and event-aligned averages.

pub mod checkpoint;
pub mod error;
pub mod eval;
pub mod features;
pub mod horde;
pub mod learner;
pub mod manifest;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
pub use eval::{AlignedAverage, LearningCurve};
pub use features::{FeatureVector, SensorFrame, TileCoder, TilingKind, TilingSpec};
pub use horde::{PredictionBank, TargetSelector};
pub use learner::{DiscountRule, Learner, PredictionSpec, TdScratch};
pub use oracle::{OfflineSolution, ReturnSeries};
pub use sim::{Action, PenWorld, SimParams};
