//! Composite Gauss-Legendre quadrature with panel doubling.

use crate::{Error, Result};

const NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Ten-point Gauss-Legendre rule on `panels` equal sub-intervals.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

/// Doubles the panel count from `initial_panels` until two successive
/// estimates agree to `abs_tol`; fails if that does not happen by
/// `max_panels`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    max_panels: usize,
    abs_tol: f64,
) -> Result<f64> {
    let mut panels = initial_panels.max(1);
    let mut prev = gauss_legendre(&f, a, b, panels);
    let mut change = f64::INFINITY;
    while panels < max_panels {
        panels *= 2;
        let next = gauss_legendre(&f, a, b, panels);
        change = libm::fabs(next - prev);
        prev = next;
        if change <= abs_tol {
            return Ok(next);
        }
    }
    Err(Error::NoConvergence {
        what: "Gauss-Legendre quadrature",
        achieved: change,
        wanted: abs_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_exponentials() {
        let v = gauss_legendre(&|x: f64| x.powi(19), 0.0, 1.0, 1);
        assert!((v - 0.05).abs() < 1e-15);
        let e = integrate(|x: f64| (-x).exp(), 0.0, 30.0, 2, 1 << 12, 1e-14).unwrap();
        assert!((e - (1.0 - (-30.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x: f64| if x < core::f64::consts::FRAC_1_PI { 0.0 } else { 1.0 }, 0.0, 1.0, 3, 48, 1e-15);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
