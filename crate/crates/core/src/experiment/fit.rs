//! Weighted straight-line fit of the error against 1/N.

use serde::{Deserialize, Serialize};

use super::EnsembleStats;
use crate::error::{Error, Result};

/// Mean error measured at one system size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub n_objects: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

impl SizePoint {
    pub fn new(n_objects: usize, mean_error: f64, std_error: f64) -> Self {
        SizePoint {
            n_objects,
            mean_error,
            std_error,
        }
    }

    pub fn from_stats(stats: &EnsembleStats) -> Self {
        SizePoint::new(stats.config.n_objects, stats.mean_error, stats.std_error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Extrapolated error at 1/N = 0.
    pub intercept: f64,
    pub intercept_err: f64,
    pub slope: f64,
    pub slope_err: f64,
    /// `(1/N, error, standard error)` for every input point.
    pub points: Vec<(f64, f64, f64)>,
}

impl FitResult {
    pub fn predict(&self, inv_n: f64) -> f64 {
        self.intercept + self.slope * inv_n
    }
}

/// Least squares of error against `1/N`, weighted by `1/SE^2`.
///
/// If any standard error is zero all points get unit weight and the
/// parameter errors are scaled by the residual variance (zero for an exact
/// two-point line).
pub fn extrapolate_to_infinite_n(points: &[SizePoint]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    for (i, p) in points.iter().enumerate() {
        if p.n_objects == 0 {
            return Err(Error::Fit("N must be positive".into()));
        }
        if !p.mean_error.is_finite() || p.std_error.is_nan() || p.std_error < 0.0 || !p.std_error.is_finite() {
            return Err(Error::Fit(format!("point {i} is not finite")));
        }
        if points[..i].iter().any(|q| q.n_objects == p.n_objects) {
            return Err(Error::Fit(format!("duplicate abscissa N={}", p.n_objects)));
        }
    }

    let unit = points.iter().any(|p| p.std_error == 0.0);
    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (1.0 / p.n_objects as f64, p.mean_error, p.std_error))
        .collect();

    let weight = |sigma: f64| if unit { 1.0 } else { 1.0 / (sigma * sigma) };
    let s: f64 = data.iter().map(|&(_, _, sigma)| weight(sigma)).sum();
    let x_bar = data.iter().map(|&(x, _, sigma)| weight(sigma) * x).sum::<f64>() / s;
    let y_bar = data.iter().map(|&(_, y, sigma)| weight(sigma) * y).sum::<f64>() / s;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y, sigma) in &data {
        let w = weight(sigma);
        sxx += w * (x - x_bar) * (x - x_bar);
        sxy += w * (x - x_bar) * (y - y_bar);
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;

    let scale = if unit {
        if data.len() > 2 {
            let rss: f64 = data
                .iter()
                .map(|&(x, y, _)| (y - intercept - slope * x).powi(2))
                .sum();
            rss / (data.len() - 2) as f64
        } else {
            0.0
        }
    } else {
        1.0
    };

    Ok(FitResult {
        intercept,
        intercept_err: (scale * (1.0 / s + x_bar * x_bar / sxx)).sqrt(),
        slope,
        slope_err: (scale / sxx).sqrt(),
        points: data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn two_point_line() {
        let fit = extrapolate_to_infinite_n(&[
            SizePoint::new(100, 0.578, 0.0),
            SizePoint::new(50, 0.588, 0.0),
        ])
        .unwrap();
        assert!((fit.intercept - 0.568).abs() < 1e-12);
        assert!((fit.slope - 1.0).abs() < 1e-9);
        assert_eq!(fit.intercept_err, 0.0);
        assert_eq!(fit.points.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(extrapolate_to_infinite_n(&[SizePoint::new(10, 0.5, 0.1)]).is_err());
        assert!(extrapolate_to_infinite_n(&[
            SizePoint::new(10, 0.5, 0.1),
            SizePoint::new(10, 0.6, 0.1)
        ])
        .is_err());
        assert!(extrapolate_to_infinite_n(&[
            SizePoint::new(10, f64::NAN, 0.1),
            SizePoint::new(20, 0.6, 0.1)
        ])
        .is_err());
    }

    #[test]
    fn recovers_synthetic_line() {
        let (a, b) = (0.5677, 0.35);
        let sizes = [16usize, 24, 32, 48, 64, 96];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut misses = 0;
        for _ in 0..50 {
            let points: Vec<SizePoint> = sizes
                .iter()
                .map(|&n| {
                    let sigma = 0.002 * (n as f64 / 16.0).sqrt();
                    let noise = Normal::new(0.0, sigma).unwrap().sample(&mut rng);
                    SizePoint::new(n, a + b / n as f64 + noise, sigma)
                })
                .collect();
            let fit = extrapolate_to_infinite_n(&points).unwrap();
            if (fit.intercept - a).abs() > 3.0 * fit.intercept_err
                || (fit.slope - b).abs() > 3.0 * fit.slope_err
            {
                misses += 1;
            }
        }
        // 3-sigma misses are rare; allow a couple out of 50 repetitions
        assert!(misses <= 2, "misses = {misses}");
    }

    #[test]
    fn weights_follow_standard_errors() {
        // a very precise point pins the line
        let fit = extrapolate_to_infinite_n(&[
            SizePoint::new(10, 1.0, 1e-6),
            SizePoint::new(20, 0.0, 1.0),
            SizePoint::new(40, 5.0, 1.0),
        ])
        .unwrap();
        assert!((fit.predict(0.1) - 1.0).abs() < 1e-6);
    }
}
