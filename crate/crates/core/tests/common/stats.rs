//! Goodness-of-fit helpers for sampler tests.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson χ² of `observed` counts against `probs`, merging cells with expectation below 5.
/// Returns `(statistic, critical value at α, accepted)`.
pub fn chi2_test(observed: &[u64], probs: &[f64], alpha: f64) -> (f64, f64, bool) {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * n as f64;
        if e == 0.0 {
            assert_eq!(o, 0, "count in a cell of probability zero");
            continue;
        }
        o_acc += o as f64;
        e_acc += e;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    if cells.len() < 2 {
        return (0.0, f64::INFINITY, true);
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let crit = ChiSquared::new((cells.len() - 1) as f64).unwrap().inverse_cdf(1.0 - alpha);
    (stat, crit, stat <= crit)
}

/// `|k/n − p| ≤ z σ` for a binomial count.
pub fn within_sigma(k: u64, n: u64, p: f64, z: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    ((k as f64 / n as f64) - p).abs() <= z * sigma.max(1e-12)
}
