//! Evaluation harness: binned normalized-RMSE learning curves and
//! event-aligned averaging of signals, returns, and predictions.
//!
//! RMSE is normalized by the prediction's horizon 1/(1-gamma) so that errors
//! at different timescales are comparable on one axis.

use crate::error::{Error, Result};

/// A binned learning curve of normalized RMSE over time.
#[derive(Debug, Clone)]
pub struct LearningCurve {
    pub bin_size: usize,
    /// Discount the normalization was derived from.
    pub gamma: f64,
    /// (bin index, normalized RMSE); bins cover the evaluated span in order.
    pub points: Vec<(usize, f64)>,
}

impl LearningCurve {
    /// Normalized RMSE of the bin containing `step`, if evaluated.
    pub fn value_at_step(&self, step: usize) -> Option<f64> {
        let bin = step / self.bin_size;
        self.points.iter().find(|(b, _)| *b == bin).map(|(_, v)| *v)
    }

    pub fn final_value(&self) -> Option<f64> {
        self.points.last().map(|(_, v)| *v)
    }
}

/// Per-bin RMSE between aligned prediction and return series, scaled by
/// (1 - gamma); with gamma = 0 the divisor 1/(1-gamma) is 1.
pub fn normalized_rmse(
    predictions: &[f64],
    returns: &[f64],
    gamma: f64,
    bin_size: usize,
) -> Result<LearningCurve> {
    if bin_size == 0 {
        return Err(Error::Input("bin size must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Input(format!("gamma {gamma} outside [0, 1)")));
    }
    let len = predictions.len().min(returns.len());
    if len == 0 {
        return Err(Error::Input("empty bin span: no overlapping steps".into()));
    }
    let scale = 1.0 - gamma;
    let mut points = Vec::with_capacity(len.div_ceil(bin_size));
    let mut start = 0usize;
    while start < len {
        let end = (start + bin_size).min(len);
        let sq: f64 = (start..end)
            .map(|t| {
                let e = predictions[t] - returns[t];
                e * e
            })
            .sum();
        let rmse = (sq / (end - start) as f64).sqrt();
        points.push((start / bin_size, rmse * scale));
        start = end;
    }
    Ok(LearningCurve { bin_size, gamma, points })
}

/// Normalized RMSE over one span of aligned series (no binning).
pub fn normalized_rmse_span(
    predictions: &[f64],
    returns: &[f64],
    gamma: f64,
    range: std::ops::Range<usize>,
) -> Result<f64> {
    let len = predictions.len().min(returns.len());
    let range = range.start.min(len)..range.end.min(len);
    if range.is_empty() {
        return Err(Error::Input("empty evaluation span".into()));
    }
    let sq: f64 = range
        .clone()
        .map(|t| {
            let e = predictions[t] - returns[t];
            e * e
        })
        .sum();
    Ok((sq / range.len() as f64).sqrt() * (1.0 - gamma))
}

/// Finds saturation onsets: steps where the signal first reaches the
/// threshold after at least `refractory` consecutive steps below it.
/// Returned onsets are ascending and separated by more than `refractory`.
pub fn detect_events(signal: &[f64], threshold: f64, refractory: usize) -> Vec<usize> {
    assert!(threshold > 0.0 && threshold <= 1.0, "threshold outside (0, 1]");
    assert!(refractory >= 1, "refractory must be at least 1");
    let mut onsets = Vec::new();
    let mut below = 0usize;
    for (i, &v) in signal.iter().enumerate() {
        if v >= threshold {
            if below >= refractory {
                onsets.push(i);
            }
            below = 0;
        } else {
            below += 1;
        }
    }
    onsets
}

/// Event-aligned averages of a raw signal, its ideal return, and a learned
/// prediction over a window around each onset.
#[derive(Debug, Clone)]
pub struct AlignedAverage {
    pub steps_before: usize,
    pub steps_after: usize,
    /// Events retained (the full window fit inside every series).
    pub event_count: usize,
    /// Events dropped because the window ran off a series end.
    pub dropped_events: usize,
    pub mean_signal: Vec<f64>,
    pub mean_return: Vec<f64>,
    pub mean_prediction: Vec<f64>,
}

impl AlignedAverage {
    /// Mean value of one series at a signed offset from onset.
    pub fn at_offset(series: &[f64], steps_before: usize, offset: isize) -> f64 {
        series[(steps_before as isize + offset) as usize]
    }
}

/// Averages the three series across events, aligned on the onsets. An onset
/// whose window does not fit inside every series is dropped and counted.
pub fn align_events(
    onsets: &[usize],
    signal: &[f64],
    returns: &[f64],
    predictions: &[f64],
    steps_before: usize,
    steps_after: usize,
) -> Result<AlignedAverage> {
    let min_len = signal.len().min(returns.len()).min(predictions.len());
    let retained: Vec<usize> = onsets
        .iter()
        .copied()
        .filter(|&o| o >= steps_before && o + steps_after < min_len)
        .collect();
    if retained.is_empty() {
        return Err(Error::Input(format!(
            "no events admit a (-{steps_before}, +{steps_after}) window within the series"
        )));
    }
    let dropped = onsets.len() - retained.len();
    let window = steps_before + steps_after + 1;
    let mean_of = |series: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0f64; window];
        for &onset in &retained {
            let start = onset - steps_before;
            for (slot, &v) in out.iter_mut().zip(&series[start..start + window]) {
                *slot += v;
            }
        }
        let inv = 1.0 / retained.len() as f64;
        out.iter_mut().for_each(|v| *v *= inv);
        out
    };
    Ok(AlignedAverage {
        steps_before,
        steps_after,
        event_count: retained.len(),
        dropped_events: dropped,
        mean_signal: mean_of(signal),
        mean_return: mean_of(returns),
        mean_prediction: mean_of(predictions),
    })
}

/// Writes a curve as `bin,rmse_normalized` CSV.
pub fn write_curve_csv(path: &std::path::Path, curve: &LearningCurve) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "bin,rmse_normalized")?;
    for (bin, v) in &curve.points {
        writeln!(out, "{bin},{v}")?;
    }
    Ok(())
}

/// Writes an aligned average as `offset,signal,return,prediction` CSV, with
/// offset 0 at event onset.
pub fn write_aligned_csv(path: &std::path::Path, aligned: &AlignedAverage) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "offset,signal,return,prediction")?;
    for i in 0..aligned.mean_signal.len() {
        let offset = i as isize - aligned.steps_before as isize;
        writeln!(
            out,
            "{offset},{},{},{}",
            aligned.mean_signal[i], aligned.mean_return[i], aligned.mean_prediction[i]
        )?;
    }
    Ok(())
}
