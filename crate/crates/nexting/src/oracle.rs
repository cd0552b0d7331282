//! Offline ground truth: ideal returns computed backward over a logged run,
//! and the least-squares weights that minimize squared error against those
//! returns. The offline optimum is the representation-limited ceiling that
//! online learners are compared against.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, SensorFrame};
use crate::learner::PredictionSpec;
use crate::horde::resolve_target;

/// Ideal returns for one prediction over a logged run.
///
/// `values[t]` is the discounted sum of future targets from step t, computed
/// by the backward recursion `G_t = r_{t+1} + gamma_{t+1} * G_{t+1}`. The
/// final `horizon` steps of the log are excluded so that every kept value is
/// exact to within the truncation tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    /// Steps excluded at the end of the log.
    pub horizon: usize,
    /// Truncation tolerance the horizon was derived from.
    pub eps: f64,
}

/// Least-squares weights for one prediction, with the ridge used and the
/// residual error of the fit.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub theta_star: Vec<f64>,
    pub ridge: f64,
    pub residual_rmse: f64,
}

/// Smallest k with gamma_max^k <= eps (at least 1: the last step never has a
/// next target).
fn truncation_horizon(gamma_max: f64, eps: f64) -> usize {
    if gamma_max <= 0.0 {
        return 1;
    }
    let mut h = (eps.ln() / gamma_max.ln()).ceil().max(1.0) as usize;
    while gamma_max.powi(h as i32) > eps {
        h += 1;
    }
    while h > 1 && gamma_max.powi(h as i32 - 1) <= eps {
        h -= 1;
    }
    h
}

/// Computes the return series for aligned per-step target and discount
/// series. `targets[t]` and `gammas[t]` are the signal and discount resolved
/// at log step t; a time-varying discount multiplies into the tail as a
/// running product, so a discount of zero at step t+1 cuts the return at
/// exactly `targets[t+1]`.
pub fn compute_returns(targets: &[f64], gammas: &[f64], eps: f64) -> Result<ReturnSeries> {
    if targets.len() != gammas.len() {
        return Err(Error::Input(format!(
            "target series ({}) and gamma series ({}) are misaligned",
            targets.len(),
            gammas.len()
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Input(format!("truncation eps {eps} outside (0, 1)")));
    }
    let mut gamma_max = 0.0f64;
    for (t, &g) in gammas.iter().enumerate() {
        if !(0.0..1.0).contains(&g) {
            return Err(Error::Input(format!(
                "gamma {g} at step {t} outside [0, 1); the return would have an infinite horizon"
            )));
        }
        gamma_max = gamma_max.max(g);
    }

    let n = targets.len();
    let horizon = truncation_horizon(gamma_max, eps);
    if n <= horizon {
        return Err(Error::Input(format!(
            "log of {n} steps is shorter than the truncation horizon {horizon}; \
             a longer log or looser eps is needed"
        )));
    }

    let mut values = vec![0.0f64; n - 1];
    let mut g = 0.0f64;
    for t in (0..n - 1).rev() {
        g = targets[t + 1] + gammas[t + 1] * g;
        values[t] = g;
    }
    values.truncate(n - horizon);
    Ok(ReturnSeries { values, horizon, eps })
}

/// Resolves the per-step target and discount series for one spec over a
/// logged run. Feature-component targets read the feature vectors.
pub fn series_for_spec(
    spec: &PredictionSpec,
    frames: &[SensorFrame],
    features: &[FeatureVector],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if frames.len() != features.len() {
        return Err(Error::Input(format!(
            "frame series ({}) and feature series ({}) are misaligned",
            frames.len(),
            features.len()
        )));
    }
    let mut targets = Vec::with_capacity(frames.len());
    let mut gammas = Vec::with_capacity(frames.len());
    for (frame, fv) in frames.iter().zip(features) {
        targets.push(resolve_target(&spec.target, frame, fv));
        gammas.push(spec.discount.resolve(frame));
    }
    Ok((targets, gammas))
}

/// Solves the ridged normal equations `(A + ridge I) theta = b` with
/// `A = sum_t phi_t phi_t^T` and `b = sum_t phi_t G_t`, accumulated sparsely
/// over active-index pairs (binary features add 1 per co-activation).
pub fn solve_offline(
    features: &[FeatureVector],
    returns: &ReturnSeries,
    ridge: f64,
) -> Result<OfflineSolution> {
    Ok(solve_offline_group(features, &[returns], ridge)?.pop().unwrap())
}

/// Solves several return series that share a window length against one
/// factorization of the Gram matrix. All series must have the same length.
pub fn solve_offline_group(
    features: &[FeatureVector],
    returns: &[&ReturnSeries],
    ridge: f64,
) -> Result<Vec<OfflineSolution>> {
    let first = returns
        .first()
        .ok_or_else(|| Error::Input("no return series to solve".into()))?;
    let t_len = first.values.len();
    if t_len == 0 {
        return Err(Error::Input("empty return series".into()));
    }
    if returns.iter().any(|r| r.values.len() != t_len) {
        return Err(Error::Input(
            "return series in one solve group must share a window length".into(),
        ));
    }
    if features.len() < t_len {
        return Err(Error::Input(format!(
            "feature log ({} steps) does not cover the return series ({t_len} steps)",
            features.len()
        )));
    }
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(Error::Input(format!("ridge {ridge} must be finite and >= 0")));
    }
    let n = features[0].n();

    let mut gram = vec![0.0f64; n * n];
    for fv in &features[..t_len] {
        if fv.n() != n {
            return Err(Error::Input("feature dimension changed mid-log".into()));
        }
        let active = fv.active();
        for (k, &iu) in active.iter().enumerate() {
            let row = iu as usize * n;
            for &ju in &active[k..] {
                gram[row + ju as usize] += 1.0;
            }
        }
    }
    // Mirror the upper triangle; the matrix is symmetric so the storage
    // order handed to nalgebra does not matter.
    for i in 0..n {
        for j in (i + 1)..n {
            gram[j * n + i] = gram[i * n + j];
        }
    }
    for i in 0..n {
        gram[i * n + i] += ridge;
    }

    let a = DMatrix::from_vec(n, n, gram);
    let chol = Cholesky::new(a).ok_or_else(|| {
        if ridge == 0.0 {
            Error::Solve(
                "normal equations are singular with ridge = 0; retry with ridge > 0".into(),
            )
        } else {
            Error::Solve(format!(
                "normal equations could not be factorized even with ridge {ridge}"
            ))
        }
    })?;

    let mut solutions = Vec::with_capacity(returns.len());
    for series in returns {
        let mut moment = vec![0.0f64; n];
        for (fv, &g) in features.iter().zip(&series.values) {
            for &iu in fv.active() {
                moment[iu as usize] += g;
            }
        }
        let theta = chol.solve(&DVector::from_vec(moment));
        let theta_star: Vec<f64> = theta.iter().copied().collect();
        if theta_star.iter().any(|w| !w.is_finite()) {
            return Err(Error::Solve(
                "offline solution contains non-finite weights".into(),
            ));
        }
        let residual_rmse = offline_rmse(&theta_star, features, series)?;
        solutions.push(OfflineSolution { theta_star, ridge, residual_rmse });
    }
    Ok(solutions)
}

/// Default ridge used by the CLI: a tiny multiple of the mean Gram diagonal,
/// enough to make rank-deficient tile-coded systems solvable without moving
/// the optimum.
pub fn default_ridge(features: &[FeatureVector], steps: usize) -> f64 {
    if features.is_empty() || steps == 0 {
        return 0.0;
    }
    let n = features[0].n() as f64;
    let active = features[0].active().len() as f64;
    1e-8 * (steps as f64 * active) / n
}

/// RMSE of `phi_t . theta` against the returns over a step range.
pub fn offline_rmse_span(
    theta: &[f64],
    features: &[FeatureVector],
    returns: &ReturnSeries,
    range: std::ops::Range<usize>,
) -> Result<f64> {
    let t_len = returns.values.len().min(features.len());
    let range = range.start.min(t_len)..range.end.min(t_len);
    if range.is_empty() {
        return Err(Error::Input("empty evaluation span".into()));
    }
    let mut sq = 0.0f64;
    for t in range.clone() {
        let err = features[t].dot(theta) - returns.values[t];
        sq += err * err;
    }
    Ok((sq / range.len() as f64).sqrt())
}

/// Root mean squared error of `phi_t . theta` against the returns.
pub fn offline_rmse(theta: &[f64], features: &[FeatureVector], returns: &ReturnSeries) -> Result<f64> {
    let t_len = returns.values.len();
    if t_len == 0 {
        return Err(Error::Input("empty overlap between features and returns".into()));
    }
    if features.len() < t_len {
        return Err(Error::Input(format!(
            "feature log ({} steps) does not cover the return series ({t_len} steps)",
            features.len()
        )));
    }
    if features[0].n() != theta.len() {
        return Err(Error::Input(format!(
            "weight vector length {} does not match feature dimension {}",
            theta.len(),
            features[0].n()
        )));
    }
    let mut sq = 0.0f64;
    for (fv, &g) in features.iter().zip(&returns.values) {
        let err = fv.dot(theta) - g;
        sq += err * err;
    }
    Ok((sq / t_len as f64).sqrt())
}

/// Writes a return series as `step,value` CSV.
pub fn write_returns_csv(path: &std::path::Path, returns: &ReturnSeries) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "step,value")?;
    for (t, v) in returns.values.iter().enumerate() {
        writeln!(out, "{t},{v}")?;
    }
    Ok(())
}

/// Reads a `step,value` CSV written by [`write_returns_csv`].
pub fn read_returns_csv(path: &std::path::Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue; // header
        }
        let err = |message: String| Error::Parse {
            path: display.clone(),
            line: idx + 1,
            message,
        };
        let (_, value) = line
            .split_once(',')
            .ok_or_else(|| err("expected `step,value`".into()))?;
        values.push(
            value
                .parse::<f64>()
                .map_err(|_| err(format!("invalid value `{value}`")))?,
        );
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fv(active: Vec<u32>, n: usize) -> FeatureVector {
        FeatureVector::new(active, n).unwrap()
    }

    /// Brute-force forward sum with the running discount product; the
    /// independent oracle for the backward recursion.
    fn forward_return(targets: &[f64], gammas: &[f64], t: usize) -> f64 {
        let mut total = 0.0;
        let mut product = 1.0;
        for k in 0.. {
            let idx = t + k + 1;
            if idx >= targets.len() {
                break;
            }
            if k > 0 {
                product *= gammas[t + k];
            }
            total += product * targets[idx];
        }
        total
    }

    #[test]
    fn constant_signal_geometric_series() {
        let n = 200;
        let targets = vec![1.0; n];
        let gammas = vec![0.8; n];
        let returns = compute_returns(&targets, &gammas, 1e-6).unwrap();
        // G = 1/(1-0.8) = 5 within the truncation tolerance.
        assert!((returns.values[0] - 5.0).abs() < 1e-5);
        assert_eq!(returns.values.len(), n - returns.horizon);
    }

    #[test]
    fn gamma_zero_returns_next_target() {
        let targets = vec![0.3, 0.7, 0.1, 0.9];
        let gammas = vec![0.0; 4];
        let returns = compute_returns(&targets, &gammas, 1e-6).unwrap();
        assert_eq!(returns.horizon, 1);
        assert_eq!(returns.values, vec![0.7, 0.1, 0.9]);
    }

    #[test]
    fn zero_discount_cuts_the_tail_exactly() {
        // gamma at t+1 = 0 makes G_t = r_{t+1} exactly, whatever follows.
        let mut targets = vec![100.0; 80];
        targets[1] = 0.25;
        let mut gammas = vec![0.9; 80];
        gammas[1] = 0.0;
        let returns = compute_returns(&targets, &gammas, 1e-3).unwrap();
        assert_eq!(returns.values[0], 0.25);
    }

    #[test]
    fn backward_matches_brute_force_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 500;
        for variable in [false, true] {
            let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let gammas: Vec<f64> = if variable {
                (0..n)
                    .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..0.95) })
                    .collect()
            } else {
                vec![0.95; n]
            };
            let returns = compute_returns(&targets, &gammas, 1e-6).unwrap();
            for t in (0..returns.values.len()).step_by(17) {
                let brute = forward_return(&targets, &gammas, t);
                assert!(
                    (returns.values[t] - brute).abs() < 1e-10,
                    "step {t}: backward {} vs forward {brute}",
                    returns.values[t]
                );
            }
        }
    }

    #[test]
    fn truncation_error_is_bounded() {
        // Worst case: maximal constant signal at the maximal discount.
        let gamma: f64 = 0.97;
        let eps = 1e-4;
        let r_max = 2.0;
        let h = truncation_horizon(gamma, eps);
        let n = h + 1; // keeps exactly one return value, with H lookahead terms
        let targets = vec![r_max; n];
        let gammas = vec![gamma; n];
        let returns = compute_returns(&targets, &gammas, eps).unwrap();
        assert_eq!(returns.values.len(), 1);
        let g_true = r_max / (1.0 - gamma);
        let bound = eps * r_max / (1.0 - gamma);
        let err = (g_true - returns.values[0]).abs();
        assert!(err <= bound, "truncation error {err} exceeds bound {bound}");
    }

    #[test]
    fn rejects_unit_gamma_and_bad_eps() {
        let targets = vec![1.0; 10];
        assert!(compute_returns(&targets, &[1.0; 10], 1e-6).is_err());
        assert!(compute_returns(&targets, &[0.5; 10], 0.0).is_err());
        assert!(compute_returns(&targets, &[0.5; 9], 1e-6).is_err());
    }

    #[test]
    fn short_log_is_rejected() {
        let targets = vec![1.0; 5];
        let gammas = vec![0.99; 5]; // horizon in the hundreds
        assert!(matches!(
            compute_returns(&targets, &gammas, 1e-6),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn bias_only_solution_is_the_mean() {
        let features: Vec<FeatureVector> = (0..50).map(|_| fv(vec![0], 1)).collect();
        let values: Vec<f64> = (0..50).map(|t| (t as f64 * 0.7).sin()).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let returns = ReturnSeries { values, horizon: 1, eps: 1e-6 };
        let sol = solve_offline(&features, &returns, 0.0).unwrap();
        assert!((sol.theta_star[0] - mean).abs() < 1e-12);
    }

    #[test]
    fn perfect_linear_data_has_zero_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let true_theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let features: Vec<FeatureVector> = (0..80)
            .map(|_| {
                let mut active = vec![0u32];
                active.extend((1..n as u32).filter(|_| rng.gen_bool(0.4)));
                fv(active, n)
            })
            .collect();
        let values: Vec<f64> = features.iter().map(|f| f.dot(&true_theta)).collect();
        let returns = ReturnSeries { values, horizon: 1, eps: 1e-6 };
        let sol = solve_offline(&features, &returns, 0.0).unwrap();
        assert!(sol.residual_rmse < 1e-9);
        assert!((offline_rmse(&sol.theta_star, &features, &returns).unwrap() - sol.residual_rmse).abs() < 1e-15);
    }

    #[test]
    fn small_ridge_barely_moves_a_well_conditioned_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 5;
        let features: Vec<FeatureVector> = (0..60)
            .map(|_| {
                let mut active = vec![0u32];
                active.extend((1..n as u32).filter(|_| rng.gen_bool(0.5)));
                fv(active, n)
            })
            .collect();
        let values: Vec<f64> = (0..60).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let returns = ReturnSeries { values, horizon: 1, eps: 1e-6 };
        let exact = solve_offline(&features, &returns, 0.0).unwrap();
        let ridged = solve_offline(&features, &returns, 1e-8).unwrap();
        assert!((exact.residual_rmse - ridged.residual_rmse).abs() < 1e-6);
    }

    #[test]
    fn theta_star_beats_other_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 8;
        let features: Vec<FeatureVector> = (0..120)
            .map(|_| {
                let mut active = vec![0u32];
                active.extend((1..n as u32).filter(|_| rng.gen_bool(0.35)));
                fv(active, n)
            })
            .collect();
        let values: Vec<f64> = features
            .iter()
            .map(|f| f.active().len() as f64 * 0.3 + rng.gen_range(-0.2..0.2))
            .collect();
        let returns = ReturnSeries { values, horizon: 1, eps: 1e-6 };
        let sol = solve_offline(&features, &returns, 0.0).unwrap();
        let zero = vec![0.0; n];
        let random: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut perturbed = sol.theta_star.clone();
        perturbed[3] += 0.05;
        for other in [&zero, &random, &perturbed] {
            let other_rmse = offline_rmse(other, &features, &returns).unwrap();
            assert!(sol.residual_rmse <= other_rmse + 1e-12);
        }
    }

    #[test]
    fn singular_system_without_ridge_advises_ridge() {
        // Feature 2 never activates: the Gram matrix has a zero row/column.
        let features: Vec<FeatureVector> = (0..20).map(|_| fv(vec![0, 1], 3)).collect();
        let returns = ReturnSeries { values: vec![1.0; 20], horizon: 1, eps: 1e-6 };
        let err = solve_offline(&features, &returns, 0.0).unwrap_err();
        match err {
            Error::Solve(msg) => assert!(msg.contains("ridge")),
            other => panic!("expected solve error, got {other:?}"),
        }
        assert!(solve_offline(&features, &returns, 1e-8).is_ok());
    }

    #[test]
    fn returns_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("returns.csv");
        let series = ReturnSeries {
            values: vec![1.5, -0.25, 0.125, 3.0e-7],
            horizon: 2,
            eps: 1e-6,
        };
        write_returns_csv(&path, &series).unwrap();
        let back = read_returns_csv(&path).unwrap();
        assert_eq!(back, series.values);
    }
}
