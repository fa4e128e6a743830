//! Small estimators shared by the analysis modules.

use serde::{Deserialize, Serialize};

/// A binomial proportion with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Proportion {
        let (lower, upper) = wilson(successes, trials, 1.959_963_984_540_054);
        let estimate = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        Proportion { successes, trials, estimate, lower, upper }
    }
}

/// Wilson score interval for `k` successes out of `n` at normal quantile `z`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Mean and standard error of a series, with the error inflated by the
/// integrated autocorrelation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mean: f64,
    pub std_error: f64,
    pub tau: f64,
    pub effective_samples: f64,
}

/// Integrated autocorrelation time with Sokal's self-consistent window
/// (stop at the first lag `t` with `t ≥ 5·τ(t)`).
pub fn integrated_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 1.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for t in 1..n {
        let ct = xs[..n - t].iter().zip(&xs[t..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>() / n as f64;
        tau += 2.0 * ct / c0;
        if t as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

pub fn summarize(xs: &[f64]) -> SeriesSummary {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let tau = integrated_autocorrelation(xs);
    let effective_samples = n / tau;
    SeriesSummary { mean, std_error: (var / effective_samples).sqrt(), tau, effective_samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wilson_edge_cases() {
        let p = Proportion::new(0, 10);
        assert_eq!(p.lower, 0.0);
        assert!(p.upper > 0.2 && p.upper < 0.35);
        let p = Proportion::new(10, 10);
        assert!((p.upper - 1.0).abs() < 1e-12);
        let (lo, hi) = wilson(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn ar1_autocorrelation_time() {
        // AR(1) with coefficient r has tau = (1 + r) / (1 - r)
        let r = 0.8;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                x = r * x + rng.gen::<f64>() - 0.5;
                x
            })
            .collect();
        let tau = integrated_autocorrelation(&xs);
        assert!((tau - 9.0).abs() < 1.0, "{tau}");
    }
}
