//! Noncentral chi-squared distribution and its normal approximant.

use core::f64::consts::{LN_2, PI};

use libm::{exp, floor, log, sqrt};
use rand::Rng;
use rand_distr::StandardNormal;

use super::quad;
use super::special::{bessel_i0e, gamma_p, ln_gamma, norm_cdf};
use crate::{Error, Result};

/// Absolute accuracy targeted by the Poisson-mixture series.
const SERIES_EPS: f64 = 1e-18;

/// Noncentral chi-squared law with `dof` degrees of freedom and
/// noncentrality `nc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ncx2 {
    dof: u32,
    nc: f64,
}

impl Ncx2 {
    pub fn new(dof: u32, nc: f64) -> Result<Self> {
        if dof == 0 {
            return Err(Error::param("dof", "must be at least 1"));
        }
        if !(nc.is_finite() && nc >= 0.0) {
            return Err(Error::param("nc", "must be finite and non-negative"));
        }
        Ok(Ncx2 { dof, nc })
    }

    pub fn dof(&self) -> u32 {
        self.dof
    }

    pub fn nc(&self) -> f64 {
        self.nc
    }

    pub fn mean(&self) -> f64 {
        self.dof as f64 + self.nc
    }

    pub fn variance(&self) -> f64 {
        2.0 * (self.dof as f64 + 2.0 * self.nc)
    }

    pub fn skewness(&self) -> f64 {
        let k = self.dof as f64;
        let s = self.nc;
        let v = k + 2.0 * s;
        2.0 * sqrt(2.0) * (k + 3.0 * s) / (v * sqrt(v))
    }

    /// Mean and variance of the moment-matched normal approximation.
    pub fn normal_approx(&self) -> (f64, f64) {
        (self.mean(), self.variance())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let s = self.nc;
        match self.dof {
            1 => {
                if x == 0.0 {
                    return f64::INFINITY;
                }
                let r = sqrt(x);
                let rs = sqrt(s);
                let a = r - rs;
                let b = r + rs;
                0.5 * (exp(-0.5 * a * a) + exp(-0.5 * b * b)) / sqrt(2.0 * PI * x)
            }
            2 => {
                // (1/2) exp(-(x+s)/2) I0(sqrt(s x)), scaled to stay finite for large s
                let d = sqrt(x) - sqrt(s);
                0.5 * exp(-0.5 * d * d) * bessel_i0e(sqrt(s * x))
            }
            _ => self.pdf_series(x),
        }
    }

    /// Poisson mixture of central densities; the summand is log-concave in
    /// the mixture index, so summation walks outwards from the Poisson mode
    /// until the terms are negligible and falling.
    fn pdf_series(&self, x: f64) -> f64 {
        let k = self.dof as f64;
        if x == 0.0 {
            return match self.dof {
                2 => 0.5 * exp(-0.5 * self.nc),
                _ => 0.0,
            };
        }
        let lambda = 0.5 * self.nc;
        let ln_term = |j: f64| -> f64 {
            let nu = 0.5 * k + j;
            let ln_pois = if lambda > 0.0 {
                j * log(lambda) - lambda - ln_gamma(j + 1.0)
            } else if j == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            ln_pois + (nu - 1.0) * log(x) - 0.5 * x - nu * LN_2 - ln_gamma(nu)
        };
        let j0 = floor(lambda);
        let mut sum = exp(ln_term(j0));
        let mut prev = sum;
        let mut j = j0 + 1.0;
        loop {
            let t = exp(ln_term(j));
            sum += t;
            if t <= prev && t <= SERIES_EPS * sum {
                break;
            }
            prev = t;
            j += 1.0;
        }
        let mut prev = f64::INFINITY;
        let mut j = j0 - 1.0;
        while j >= 0.0 {
            let t = exp(ln_term(j));
            sum += t;
            if t <= prev && t <= SERIES_EPS * sum {
                break;
            }
            prev = t;
            j -= 1.0;
        }
        sum
    }

    /// Cumulative distribution function via the Poisson mixture of
    /// regularized incomplete gamma functions, recurring from the Poisson
    /// mode in both directions.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        let half_k = 0.5 * self.dof as f64;
        let y = 0.5 * x;
        if self.nc == 0.0 {
            return gamma_p(half_k, y);
        }
        let lambda = 0.5 * self.nc;
        let ln_lambda = log(lambda);
        let ln_y = log(y);
        let ln_pois = |j: f64| j * ln_lambda - lambda - ln_gamma(j + 1.0);
        // g(a) = y^a e^{-y} / Gamma(a + 1), so P(a + 1, y) = P(a, y) - g(a)
        let g = |a: f64| exp(a * ln_y - y - ln_gamma(a + 1.0));

        let j0 = floor(lambda);
        let p0 = gamma_p(half_k + j0, y);
        let w0 = exp(ln_pois(j0));
        let mut sum = w0 * p0;

        let mut p = p0;
        let mut j = j0;
        loop {
            p = (p - g(half_k + j)).max(0.0);
            j += 1.0;
            let w = exp(ln_pois(j));
            sum += w * p;
            // Poisson tail beyond j is bounded by a geometric series
            let ratio = lambda / (j + 1.0);
            if ratio < 1.0 && w * ratio / (1.0 - ratio) < SERIES_EPS {
                break;
            }
        }

        let mut p = p0;
        let mut j = j0;
        while j > 0.0 {
            j -= 1.0;
            p = (p + g(half_k + j)).min(1.0);
            let w = exp(ln_pois(j));
            sum += w * p;
            if w * (j + 1.0) < SERIES_EPS {
                break;
            }
        }
        sum.clamp(0.0, 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let shift = sqrt(self.nc);
        let z: f64 = rng.sample(StandardNormal);
        let mut acc = (z + shift) * (z + shift);
        for _ in 1..self.dof {
            let z: f64 = rng.sample(StandardNormal);
            acc += z * z;
        }
        acc
    }
}

/// Squared L2 distance between the noncentral chi-squared CDF and the CDF of
/// its moment-matched normal, integrated over `[0, mean + 12 sd]`.
pub fn cdf_l2_distance(dist: &Ncx2) -> Result<f64> {
    let (mean, var) = dist.normal_approx();
    let sd = sqrt(var);
    let upper = mean + 12.0 * sd;
    let integrand = |x: f64| {
        let d = dist.cdf(x) - norm_cdf((x - mean) / sd);
        d * d
    };
    let value = quad::integrate(integrand, 0.0, upper, 32, 1 << 14, 1e-11)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain("non-finite L2 distance"))
    }
}
