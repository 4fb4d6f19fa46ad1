//! Candidate input laws for the squared input amplitude `u`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, log, sqrt};
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::special::{gamma_p, gamma_q, ln_gamma, norm_cdf, norm_sf};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    /// Gamma law with the given shape; the rate follows from the mean.
    Gamma { shape: f64 },
    /// Rayleigh law on `u` with scale `mean * sqrt(2/pi)`.
    Rayleigh,
    /// Uniform on `[0, 2 * mean]`.
    Uniform,
    /// Finitely many mass points. Weights sum to one.
    Discrete { points: Vec<f64>, weights: Vec<f64> },
}

/// A non-negative law for `u` with a fixed mean.
#[derive(Debug, Clone, PartialEq)]
pub struct InputLaw {
    kind: LawKind,
    mean: f64,
}

fn check_mean(mean: f64) -> Result<()> {
    if mean.is_finite() && mean > 0.0 {
        Ok(())
    } else {
        Err(Error::param("mean", "must be finite and strictly positive"))
    }
}

impl InputLaw {
    pub fn gamma(shape: f64, mean: f64) -> Result<Self> {
        check_mean(mean)?;
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::param("shape", "must be finite and strictly positive"));
        }
        Ok(InputLaw { kind: LawKind::Gamma { shape }, mean })
    }

    pub fn rayleigh(mean: f64) -> Result<Self> {
        check_mean(mean)?;
        Ok(InputLaw { kind: LawKind::Rayleigh, mean })
    }

    pub fn uniform(mean: f64) -> Result<Self> {
        check_mean(mean)?;
        Ok(InputLaw { kind: LawKind::Uniform, mean })
    }

    /// Discrete law; weights are normalized to sum to one and points are
    /// sorted.
    pub fn discrete(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::param("points", "must be non-empty and match the weights"));
        }
        if points.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::param("points", "must be finite and non-negative"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::param("weights", "must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::param("weights", "must not all be zero"));
        }
        let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(weights.into_iter().map(|w| w / total)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (points, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mean: f64 = points.iter().zip(&weights).map(|(p, w)| p * w).sum();
        Ok(InputLaw { kind: LawKind::Discrete { points, weights }, mean })
    }

    pub fn point_mass(u: f64) -> Result<Self> {
        Self::discrete(alloc::vec![u], alloc::vec![1.0])
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    fn rayleigh_scale(&self) -> f64 {
        self.mean * sqrt(2.0 / PI)
    }

    /// Density at `u`. Discrete laws have none.
    pub fn pdf(&self, u: f64) -> Result<f64> {
        if u < 0.0 || u.is_nan() {
            return Err(Error::Domain("input density evaluated at negative u"));
        }
        let m = self.mean;
        Ok(match &self.kind {
            LawKind::Gamma { shape } => {
                let a = *shape;
                if u == 0.0 {
                    return Ok(if a < 1.0 {
                        f64::INFINITY
                    } else if a == 1.0 {
                        1.0 / m
                    } else {
                        0.0
                    });
                }
                let rate = a / m;
                exp(a * log(rate) + (a - 1.0) * log(u) - rate * u - ln_gamma(a))
            }
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                u / (sigma * sigma) * exp(-u * u / (2.0 * sigma * sigma))
            }
            LawKind::Uniform => {
                if u <= 2.0 * m {
                    0.5 / m
                } else {
                    0.0
                }
            }
            LawKind::Discrete { .. } => return Err(Error::NoDensity),
        })
    }

    pub fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return match &self.kind {
                LawKind::Discrete { points, weights } if u == 0.0 => {
                    points.iter().zip(weights).filter(|(p, _)| **p == 0.0).map(|(_, w)| w).sum()
                }
                _ => 0.0,
            };
        }
        let m = self.mean;
        match &self.kind {
            LawKind::Gamma { shape } => gamma_p(*shape, *shape * u / m),
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                -libm::expm1(-u * u / (2.0 * sigma * sigma))
            }
            LawKind::Uniform => (u / (2.0 * m)).min(1.0),
            LawKind::Discrete { points, weights } => {
                points.iter().zip(weights).filter(|(p, _)| **p <= u).map(|(_, w)| w).sum()
            }
        }
    }

    /// Survival function `P(U > u)`, accurate in the upper tail.
    pub fn sf(&self, u: f64) -> f64 {
        let m = self.mean;
        match &self.kind {
            LawKind::Gamma { shape } => gamma_q(*shape, *shape * u.max(0.0) / m),
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                let u = u.max(0.0);
                exp(-u * u / (2.0 * sigma * sigma))
            }
            LawKind::Uniform => (1.0 - u.max(0.0) / (2.0 * m)).max(0.0),
            LawKind::Discrete { points, weights } => {
                points.iter().zip(weights).filter(|(p, _)| **p > u).map(|(_, w)| w).sum()
            }
        }
    }

    /// `E[U; U <= u]`.
    pub fn partial_mean(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let m = self.mean;
        match &self.kind {
            LawKind::Gamma { shape } => m * gamma_p(*shape + 1.0, *shape * u / m),
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                let z = u / sigma;
                sigma * sqrt(PI / 2.0) * (2.0 * norm_cdf(z) - 1.0) - u * exp(-0.5 * z * z)
            }
            LawKind::Uniform => {
                let c = u.min(2.0 * m);
                c * c / (4.0 * m)
            }
            LawKind::Discrete { points, weights } => {
                points.iter().zip(weights).filter(|(p, _)| **p <= u).map(|(p, w)| p * w).sum()
            }
        }
    }

    /// `E[U; U > u]`.
    pub fn upper_partial_mean(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        let m = self.mean;
        match &self.kind {
            LawKind::Gamma { shape } => m * gamma_q(*shape + 1.0, *shape * u / m),
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                let z = u / sigma;
                sigma * sqrt(2.0 * PI) * norm_sf(z) + u * exp(-0.5 * z * z)
            }
            LawKind::Uniform => m - self.partial_mean(u),
            LawKind::Discrete { points, weights } => {
                points.iter().zip(weights).filter(|(p, _)| **p > u).map(|(p, w)| p * w).sum()
            }
        }
    }

    /// Probability mass and first moment of the cell `(lo, hi]`; `hi` may be
    /// infinite. Upper-tail functions are used past the median so that far
    /// cells keep their relative accuracy.
    pub fn cell(&self, lo: f64, hi: f64) -> (f64, f64) {
        if self.cdf(lo) < 0.5 {
            let (f_hi, m_hi) = if hi.is_infinite() {
                (1.0, self.mean)
            } else {
                (self.cdf(hi), self.partial_mean(hi))
            };
            ((f_hi - self.cdf(lo)).max(0.0), (m_hi - self.partial_mean(lo)).max(0.0))
        } else {
            let (s_hi, m_hi) = if hi.is_infinite() {
                (0.0, 0.0)
            } else {
                (self.sf(hi), self.upper_partial_mean(hi))
            };
            ((self.sf(lo) - s_hi).max(0.0), (self.upper_partial_mean(lo) - m_hi).max(0.0))
        }
    }

    /// [`cell`](Self::cell) for every pair of consecutive `edges`, evaluating
    /// the distribution functions once per edge. Edges must be increasing;
    /// the last may be infinite.
    pub fn cells(&self, edges: &[f64]) -> Vec<(f64, f64)> {
        // (lower side?, cdf or sf, partial mean or upper partial mean)
        let side: Vec<(bool, f64, f64)> = edges
            .iter()
            .map(|&x| {
                if x.is_infinite() {
                    (false, 0.0, 0.0)
                } else {
                    let f = self.cdf(x);
                    if f < 0.5 {
                        (true, f, self.partial_mean(x))
                    } else {
                        (false, self.sf(x), self.upper_partial_mean(x))
                    }
                }
            })
            .collect();
        side.windows(2)
            .map(|w| {
                let ((l0, a0, b0), (l1, a1, b1)) = (w[0], w[1]);
                let (mass, moment) = match (l0, l1) {
                    (true, true) => (a1 - a0, b1 - b0),
                    (false, false) => (a0 - a1, b0 - b1),
                    (true, false) => ((1.0 - a0) - a1, (self.mean - b0) - b1),
                    (false, true) => (0.0, 0.0),
                };
                (mass.max(0.0), moment.max(0.0))
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let m = self.mean;
        match &self.kind {
            LawKind::Gamma { shape } => {
                let g = Gamma::new(*shape, m / *shape).expect("validated gamma parameters");
                (0..count).map(|_| g.sample(rng)).collect()
            }
            LawKind::Rayleigh => {
                let sigma = self.rayleigh_scale();
                (0..count)
                    .map(|_| {
                        let v: f64 = rng.random();
                        sigma * sqrt(-2.0 * libm::log1p(-v))
                    })
                    .collect()
            }
            LawKind::Uniform => (0..count).map(|_| 2.0 * m * rng.random::<f64>()).collect(),
            LawKind::Discrete { points, weights } => {
                let idx = WeightedIndex::new(weights).expect("validated weights");
                (0..count).map(|_| points[idx.sample(rng)]).collect()
            }
        }
    }
}

/// Draws `count` i.i.d. samples from `law`, reproducibly from `seed`.
pub fn input_sample(law: &InputLaw, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    law.sample(&mut rng, count)
}
