use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::estimate::RateEstimate;

/// Failure rates of one lattice size along the sweep grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeCurve {
    pub l: usize,
    pub points: Vec<(f64, RateEstimate)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub x_star: f64,
    /// Standard deviation of the bootstrap replicates.
    pub sigma: f64,
    /// 95% percentile interval of the bootstrap replicates.
    pub ci: (f64, f64),
    /// The two sizes whose curves cross.
    pub sizes: (usize, usize),
    /// Fraction of bootstrap replicates without a crossing.
    pub bootstrap_misses: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoCrossing {
    pub sizes: (usize, usize),
    pub advice: String,
}

/// `R_large − R_small` on the shared grid.
fn differences(small: &SizeCurve, large: &SizeCurve) -> Vec<(f64, f64, f64)> {
    let var = |r: &RateEstimate| {
        let n = r.n_trials.max(1) as f64;
        let p = (r.n_fail as f64 + 0.5) / (n + 1.0);
        p * (1.0 - p) / n
    };
    small
        .points
        .iter()
        .filter_map(|(x, a)| {
            let (_, b) = large.points.iter().find(|(y, _)| (y - x).abs() <= 1e-12 * x.abs().max(1.0))?;
            Some((*x, b.rate - a.rate, var(a) + var(b)))
        })
        .collect()
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n + 1)` system.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Weighted least-squares polynomial of degree `deg` through `(x, y, var)`, in powers of `x − x0`.
fn poly_fit(pts: &[(f64, f64, f64)], deg: usize, x0: f64) -> Option<Vec<f64>> {
    let k = deg + 1;
    let mut m = vec![vec![0.0; k + 1]; k];
    for &(x, y, v) in pts {
        let (u, w) = (x - x0, 1.0 / v.max(1e-300));
        let pw: Vec<f64> = (0..k).map(|i| u.powi(i as i32)).collect();
        for i in 0..k {
            for j in 0..k {
                m[i][j] += w * pw[i] * pw[j];
            }
            m[i][k] += w * pw[i] * y;
        }
    }
    solve(m)
}

/// Root of the difference curve at the upward sign change where the running sum of the
/// differences is lowest. Noise on saturated curves averages out of that sum.
fn crossing(d: &[(f64, f64, f64)]) -> Option<f64> {
    let nz: Vec<usize> = (0..d.len()).filter(|&i| d[i].1 != 0.0).collect();
    let mut sum = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for (k, &i) in nz.iter().enumerate().take(nz.len().saturating_sub(1)) {
        sum += d[i].1;
        if sum < best.map_or(0.0, |b| b.1) {
            best = Some((k, sum));
        }
    }
    let (k, _) = best?;
    let (i, j) = (nz[k], nz[k + 1]);
    if !(d[i].1 < 0.0 && d[j].1 > 0.0) {
        return None;
    }
    let (xa, xb) = (d[i].0, d[j].0);
    let linear = xa + (xb - xa) * (-d[i].1) / (d[j].1 - d[i].1);
    // Polynomial through the bracket and at most one neighbour on each side.
    let window = &d[i.saturating_sub(1)..(j + 2).min(d.len())];
    if window.len() < 3 {
        return Some(linear);
    }
    let Some(c) = poly_fit(window, window.len() - 1, linear) else { return Some(linear) };
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * (x - linear) + ci);
    let (mut lo, mut hi) = (xa, xb);
    if !(p(lo) < 0.0 && p(hi) > 0.0) {
        return Some(linear);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn advice(d: &[(f64, f64, f64)]) -> String {
    let (neg, pos) = (d.iter().filter(|p| p.1 < 0.0).count(), d.iter().filter(|p| p.1 > 0.0).count());
    let (lo, hi) = (d.first().map_or(0.0, |p| p.0), d.last().map_or(0.0, |p| p.0));
    match (neg, pos) {
        (0, 0) => format!("no resolved differences on [{lo}, {hi}]: add trials or move the grid"),
        (_, 0) => format!("larger lattice is better everywhere on [{lo}, {hi}]: extend the grid above {hi}"),
        (0, _) => format!("larger lattice is worse everywhere on [{lo}, {hi}]: extend the grid below {lo}"),
        _ => format!("differences change sign only downward on [{lo}, {hi}]: add trials near the crossing"),
    }
}

/// Threshold from the crossing of the two largest sizes, with a parametric binomial
/// bootstrap of width `replicates`.
pub fn find_threshold(curves: &[SizeCurve], replicates: usize, seed: u64) -> Result<ThresholdEstimate, NoCrossing> {
    let mut sorted: Vec<&SizeCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.l);
    if sorted.len() < 2 {
        return Err(NoCrossing { sizes: (0, sorted.first().map_or(0, |c| c.l)), advice: "need at least two lattice sizes".into() });
    }
    let (small, large) = (sorted[sorted.len() - 2], sorted[sorted.len() - 1]);
    let sizes = (small.l, large.l);
    let d = differences(small, large);
    let x_star = crossing(&d).ok_or_else(|| NoCrossing { sizes, advice: advice(&d) })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |c: &SizeCurve, rng: &mut ChaCha8Rng| SizeCurve {
        l: c.l,
        points: c
            .points
            .iter()
            .map(|(x, r)| {
                let k = Binomial::new(r.n_trials as u64, r.rate.clamp(0.0, 1.0)).map_or(r.n_fail as u64, |b| b.sample(rng));
                (*x, RateEstimate::from_counts(r.n_trials, k as usize, 0))
            })
            .collect(),
    };
    let mut reps = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let (a, b) = (draw(small, &mut rng), draw(large, &mut rng));
        if let Some(x) = crossing(&differences(&a, &b)) {
            reps.push(x);
        }
    }
    let misses = if replicates == 0 { 0.0 } else { 1.0 - reps.len() as f64 / replicates as f64 };
    let (sigma, ci) = if reps.len() >= 2 {
        let mean = reps.iter().sum::<f64>() / reps.len() as f64;
        let var = reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
        reps.sort_by(f64::total_cmp);
        let q = |p: f64| reps[((p * (reps.len() - 1) as f64).round() as usize).min(reps.len() - 1)];
        (var.sqrt(), (q(0.025), q(0.975)))
    } else {
        (f64::NAN, (f64::NAN, f64::NAN))
    };
    Ok(ThresholdEstimate { x_star, sigma, ci, sizes, bootstrap_misses: misses })
}
