//! Forecast error measures: per-step NMAE, NRMSE, Pearson correlation.
//!
//! All metrics are computed in the original data domain (predictions are
//! inverse-scaled before they get here).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default guard against division by zero in the NMAE denominator.
pub const DEFAULT_NMAE_EPS: f64 = 1e-8;

/// Per-step normalized absolute error: `|x(k) - p(k)| / max(|x(k)|, eps)`.
pub fn nmae_profile(truth: &[f64], pred: &[f64], eps: f64) -> Result<Vec<f64>> {
    if truth.len() != pred.len() {
        return Err(Error::Dimension(format!(
            "nmae: {} truth vs {} predicted samples",
            truth.len(),
            pred.len()
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument("nmae eps must be positive".into()));
    }
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(x, p)| (x - p).abs() / x.abs().max(eps))
        .collect())
}

/// Root of summed squared errors over summed squared truth.
pub fn nrmse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::Dimension(format!(
            "nrmse: {} truth vs {} predicted samples",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InsufficientData("nrmse of empty sequences".into()));
    }
    let num: f64 = truth.iter().zip(pred).map(|(x, p)| (x - p) * (x - p)).sum();
    let den: f64 = truth.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((num / den).sqrt())
}

/// Pearson correlation coefficient between two sequences.
pub fn pearson(truth: &[f64], pred: &[f64]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::Dimension(format!(
            "pearson: {} truth vs {} predicted samples",
            truth.len(),
            pred.len()
        )));
    }
    if truth.len() < 2 {
        return Err(Error::InsufficientData("pearson needs at least 2 samples".into()));
    }
    let n = truth.len() as f64;
    let mean_t: f64 = truth.iter().sum::<f64>() / n;
    let mean_p: f64 = pred.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_t = 0.0;
    let mut var_p = 0.0;
    for (x, p) in truth.iter().zip(pred) {
        let (dx, dp) = (x - mean_t, p - mean_p);
        cov += dx * dp;
        var_t += dx * dx;
        var_p += dp * dp;
    }
    if var_t == 0.0 || var_p == 0.0 {
        return Err(Error::DegenerateSeries(
            "pearson is undefined for constant sequences".into(),
        ));
    }
    Ok(cov / (var_t.sqrt() * var_p.sqrt()))
}

/// The three error measures of one forecast, bundled for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub nrmse: f64,
    pub pearson_r: f64,
    pub nmae_profile: Vec<f64>,
    pub horizon: usize,
}

impl MetricReport {
    pub fn compute(truth: &[f64], pred: &[f64], eps: f64) -> Result<Self> {
        Ok(Self {
            nrmse: nrmse(truth, pred)?,
            pearson_r: pearson(truth, pred)?,
            nmae_profile: nmae_profile(truth, pred, eps)?,
            horizon: truth.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;
    use rand::Rng;

    #[test]
    fn nmae_examples() {
        assert_eq!(
            nmae_profile(&[1.0, -2.0, 3.0], &[1.0, -2.0, 3.0], 1e-8).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(nmae_profile(&[2.0], &[1.0], 1e-8).unwrap(), vec![0.5]);
        assert_eq!(nmae_profile(&[0.0], &[1.0], 1e-8).unwrap(), vec![1e8]);
        assert!(matches!(
            nmae_profile(&[1.0], &[1.0, 2.0], 1e-8),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn nrmse_examples() {
        assert_eq!(nrmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(nrmse(&[3.0, -4.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert!((nrmse(&[3.0, 4.0], &[3.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(nrmse(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::ZeroReference)));
    }

    #[test]
    fn nrmse_is_scale_invariant() {
        let mut rng = testutil::rng(2);
        for _ in 0..30 {
            let truth: Vec<f64> = (0..40).map(|_| rng.random_range(-5.0..5.0)).collect();
            let pred: Vec<f64> = (0..40).map(|_| rng.random_range(-5.0..5.0)).collect();
            let base = nrmse(&truth, &pred).unwrap();
            for c in [-3.0, 0.25, 100.0] {
                let ts: Vec<f64> = truth.iter().map(|x| c * x).collect();
                let ps: Vec<f64> = pred.iter().map(|x| c * x).collect();
                let scaled = nrmse(&ts, &ps).unwrap();
                assert!((scaled - base).abs() < 1e-12 * base.max(1.0));
            }
        }
    }

    #[test]
    fn pearson_examples() {
        let truth = vec![1.0, 3.0, 2.0, 5.0, 4.0];
        assert!((pearson(&truth, &truth).unwrap() - 1.0).abs() < 1e-15);

        // Reflection through the mean: exact anti-correlation.
        let mean = truth.iter().sum::<f64>() / truth.len() as f64;
        let flipped: Vec<f64> = truth.iter().map(|x| -x + 2.0 * mean).collect();
        assert!((pearson(&truth, &flipped).unwrap() + 1.0).abs() < 1e-15);

        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::DegenerateSeries(_))
        ));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn pearson_is_affine_invariant_and_bounded() {
        let mut rng = testutil::rng(8);
        for _ in 0..100 {
            let truth: Vec<f64> = (0..30).map(|_| rng.random_range(-10.0..10.0)).collect();
            let a = rng.random_range(0.1..5.0);
            let b = rng.random_range(-20.0..20.0);
            let affine: Vec<f64> = truth.iter().map(|x| a * x + b).collect();
            let r = pearson(&truth, &affine).unwrap();
            assert!((r - 1.0).abs() <= 1e-12, "r = {r}");

            let pred: Vec<f64> = (0..30).map(|_| rng.random_range(-10.0..10.0)).collect();
            let r = pearson(&truth, &pred).unwrap();
            assert!(r.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn report_bundles_all_three() {
        let truth = vec![1.0, 2.0, 3.0, 4.0];
        let pred = vec![1.1, 1.9, 3.2, 3.8];
        let report = MetricReport::compute(&truth, &pred, DEFAULT_NMAE_EPS).unwrap();
        assert_eq!(report.horizon, 4);
        assert_eq!(report.nmae_profile.len(), 4);
        assert!(report.nrmse > 0.0 && report.nrmse < 0.2);
        assert!(report.pearson_r > 0.9);
    }
}
