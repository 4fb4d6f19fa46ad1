use alloc::vec::Vec;
use core::f64::consts::LN_2;

use libm::{exp, fabs, log};

use super::TransitionMatrix;
use crate::{Error, Result};

/// Outcome of [`blahut_arimoto_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct BaOutcome {
    pub weights: Vec<f64>,
    /// Mutual information of `weights`, a lower bound on the capacity.
    pub bits: f64,
    /// Dual upper bound on the (discrete) capacity at exit.
    pub upper_bits: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Multiplier of the cost constraint, in units of `1 / target`.
    pub lambda: f64,
    /// Lower bound after each iteration.
    pub history: Vec<f64>,
    /// Iterations whose lower bound fell below the previous one.
    pub monotonicity_violations: usize,
    pub mean_cost: f64,
}

/// Blahut–Arimoto for `w`, optionally under `E cost <= target`.
///
/// Each iteration tilts `q_i exp(D_i)` by `exp(-lambda cost_i / target)`
/// with `lambda >= 0` solved so the new law meets the constraint, so every
/// iterate is feasible and the information never decreases. The loop stops
/// once the dual bound `max_i D_i - lambda (cost_i / target - 1)` is within
/// `tol` bits of the information.
pub fn blahut_arimoto_matrix(
    w: &TransitionMatrix,
    cost: Option<(&[f64], f64)>,
    tol: f64,
    max_iter: usize,
) -> Result<BaOutcome> {
    let n = w.inputs();
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let scaled: Vec<f64> = match cost {
        Some((c, target)) => {
            if c.len() != n {
                return Err(Error::param("cost", "one cost per input required"));
            }
            if !(target > 0.0 && target.is_finite()) {
                return Err(Error::param("target", "must be finite and positive"));
            }
            c.iter().map(|x| x / target).collect()
        }
        None => alloc::vec![0.0; n],
    };

    let (mut q, mut lambda) = tilt(&alloc::vec![0.0; n], &scaled, 0.0)?;
    let mut history = Vec::new();
    let mut violations = 0;
    let mut iterations = 0;
    loop {
        let d = w.divergences(&w.output_law(&q));
        let info: f64 = q.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().zip(&scaled).map(|(di, ci)| di - lambda * (ci - 1.0)).fold(f64::NEG_INFINITY, f64::max);
        let upper = if cost.is_some() { upper } else { d.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
        let bits = info / LN_2;
        if let Some(&prev) = history.last() {
            if bits < prev - 1e-12 * fabs(prev).max(1.0) {
                violations += 1;
            }
        }
        history.push(bits);
        let converged = (upper - info) / LN_2 <= tol;
        if converged || iterations >= max_iter {
            let mean_cost = q.iter().zip(&scaled).map(|(a, b)| a * b).sum::<f64>() * cost.map_or(0.0, |c| c.1);
            return Ok(BaOutcome {
                weights: q,
                bits: bits.max(0.0),
                upper_bits: upper / LN_2,
                iterations,
                converged,
                lambda,
                history,
                monotonicity_violations: violations,
                mean_cost,
            });
        }
        let log_w: Vec<f64> = q.iter().zip(&d).map(|(&qi, &di)| if qi > 0.0 { log(qi) + di } else { f64::NEG_INFINITY }).collect();
        (q, lambda) = tilt(&log_w, &scaled, lambda)?;
        iterations += 1;
    }
}

/// Normalized `exp(log_w - lambda cost)` with the smallest `lambda >= 0`
/// giving mean cost at most one.
fn tilt(log_w: &[f64], cost: &[f64], warm: f64) -> Result<(Vec<f64>, f64)> {
    // Mean cost minus one and its derivative in lambda (minus the variance).
    let moments = |lambda: f64| {
        let top = log_w.iter().zip(cost).map(|(l, c)| l - lambda * c).fold(f64::NEG_INFINITY, f64::max);
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (l, c) in log_w.iter().zip(cost) {
            let e = exp(l - lambda * c - top);
            z += e;
            m1 += e * c;
            m2 += e * c * c;
        }
        let mean = m1 / z;
        (mean - 1.0, -(m2 / z - mean * mean))
    };
    let weights = |lambda: f64| {
        let top = log_w.iter().zip(cost).map(|(l, c)| l - lambda * c).fold(f64::NEG_INFINITY, f64::max);
        let mut e: Vec<f64> = log_w.iter().zip(cost).map(|(l, c)| exp(l - lambda * c - top)).collect();
        let z: f64 = e.iter().sum();
        e.iter_mut().for_each(|x| *x /= z);
        e
    };

    let (g0, _) = moments(0.0);
    if g0 <= 0.0 {
        return Ok((weights(0.0), 0.0));
    }
    let (mut lo, mut hi) = (0.0, warm.max(1.0));
    let mut doublings = 0;
    while moments(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::Domain("cost constraint cannot be met on this input set"));
        }
    }
    let mut lambda = if warm > lo && warm < hi { warm } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (g, dg) = moments(lambda);
        if fabs(g) <= 1e-13 {
            break;
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - g / dg;
        lambda = if dg < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok((weights(lambda), lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn bsc_capacity() {
        let w = TransitionMatrix::from_dense(&[vec![0.89, 0.11], vec![0.11, 0.89]]).unwrap();
        let r = blahut_arimoto_matrix(&w, None, 1e-9, 1000).unwrap();
        assert!(r.converged);
        assert!((r.bits - (1.0 - h2(0.11))).abs() < 1e-8);
        assert_eq!(r.monotonicity_violations, 0);
        let noiseless = TransitionMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((blahut_arimoto_matrix(&noiseless, None, 1e-9, 10).unwrap().bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_channel_capacity() {
        // Z channel with crossover 1/2: capacity log2(5/4).
        let w = TransitionMatrix::from_dense(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let r = blahut_arimoto_matrix(&w, None, 1e-10, 100_000).unwrap();
        assert!((r.bits - (1.25f64).log2()).abs() < 1e-9);
        assert!(r.history.windows(2).all(|h| h[1] >= h[0] - 1e-15));
    }

    #[test]
    fn cost_constraint_binds() {
        // Noiseless ternary channel with costs 0, 1, 2 and budget 0.5: the
        // maximum-entropy law is q_i ∝ r^i with r + 2 r^2 = 0.5 (1 + r + r^2).
        let w = TransitionMatrix::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let r = blahut_arimoto_matrix(&w, Some((&[0.0, 1.0, 2.0], 0.5)), 1e-10, 100_000).unwrap();
        assert!(r.converged);
        assert!((r.mean_cost - 0.5).abs() < 1e-9);
        let x = (-0.5 + (0.25f64 + 4.0 * 1.5 * 0.5).sqrt()) / 3.0;
        let z = 1.0 + x + x * x;
        let q = [1.0 / z, x / z, x * x / z];
        let h: f64 = -q.iter().map(|p| p * p.log2()).sum::<f64>();
        assert!((r.bits - h).abs() < 1e-8, "{} vs {h}", r.bits);
        assert_eq!(r.monotonicity_violations, 0);
    }

    #[test]
    fn slack_constraint_leaves_multiplier_at_zero() {
        let w = TransitionMatrix::from_dense(&[vec![0.89, 0.11], vec![0.11, 0.89]]).unwrap();
        let r = blahut_arimoto_matrix(&w, Some((&[0.0, 1.0], 0.9)), 1e-9, 1000).unwrap();
        assert_eq!(r.lambda, 0.0);
        assert!((r.bits - (1.0 - h2(0.11))).abs() < 1e-8);
    }
}
