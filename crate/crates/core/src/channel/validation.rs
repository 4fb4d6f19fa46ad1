//! Statistics used to compare the closed-form law with its oracles.

use alloc::vec::Vec;

use libm::{fabs, sqrt};

use super::{exact::transition_pdf_exact, transition_gaussian, ChannelConsts, OracleQuadrature};
use crate::{Error, Result};

/// Sample mean and variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    pub var: f64,
    /// Fourth central moment, for the standard error of `var`.
    pub m4: f64,
}

impl SampleMoments {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &x in xs {
            let d2 = (x - mean) * (x - mean);
            m2 += d2;
            m4 += d2 * d2;
        }
        SampleMoments { count: xs.len(), mean, var: m2 / (n - 1.0), m4: m4 / n }
    }

    pub fn se_mean(&self) -> f64 {
        sqrt(self.var / self.count as f64)
    }

    pub fn se_var(&self) -> f64 {
        sqrt(((self.m4 - self.var * self.var) / self.count as f64).max(0.0))
    }
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`; sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max(fabs(f - i as f64 / n)).max(fabs((i + 1) as f64 / n - f))
    })
}

/// Critical value of the one-sample KS test at level 0.001 (asymptotic).
pub fn ks_critical_001(count: usize) -> f64 {
    1.949 / sqrt(count as f64)
}

/// Distances between the exact and the Gaussian transition law at one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawComparison {
    pub ks: f64,
    pub l1: f64,
    /// Mass of the exact law inside the compared window.
    pub exact_mass: f64,
}

/// Compares the two laws on `nodes` points spanning 14 Gaussian deviations
/// either side of the mean.
pub fn compare_exact_gaussian(u: f64, c: &ChannelConsts, quad: &OracleQuadrature, nodes: usize) -> Result<LawComparison> {
    if nodes < 16 {
        return Err(Error::param("nodes", "need at least 16 nodes"));
    }
    let g = transition_gaussian(u, c);
    let (lo, hi) = (g.mean - 14.0 * g.sd(), g.mean + 14.0 * g.sd());
    let step = (hi - lo) / (nodes - 1) as f64;
    let ys: Vec<f64> = (0..nodes).map(|i| lo + i as f64 * step).collect();
    let exact = ys.iter().map(|&y| transition_pdf_exact(y, u, c, quad)).collect::<Result<Vec<f64>>>()?;
    // Integrating the difference keeps the rule's error proportional to the
    // (small) difference rather than to the densities themselves.
    let diff: Vec<f64> = ys.iter().zip(&exact).map(|(&y, &p)| p - g.pdf(y)).collect();
    let lead = g.cdf(lo);
    let (mut mass, mut gap, mut l1, mut ks) = (0.0, 0.0, 0.0, 0.0f64);
    for i in 1..nodes {
        mass += 0.5 * step * (exact[i - 1] + exact[i]);
        gap += 0.5 * step * (diff[i - 1] + diff[i]);
        ks = ks.max(fabs(gap - lead));
        l1 += 0.5 * step * (fabs(diff[i - 1]) + fabs(diff[i]));
    }
    Ok(LawComparison { ks, l1, exact_mass: mass })
}
