//! Transition density without the normal approximations.
//!
//! `z = a2 H + a4 H^2` with `H ~ chi2_2(s)` exactly; the rectifier noise is
//! convolved in numerically over `h`, which keeps the integrand smooth:
//! `p(y) = int f_H(h) phi((y - z(h)) / sigma_rec) / sigma_rec dh`.

use libm::{ceil, sqrt};

use super::ChannelConsts;
use crate::stats::special::norm_pdf;
use crate::stats::Ncx2;
use crate::{Error, Result};

/// Resolution controls for [`transition_pdf_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleQuadrature {
    /// Nodes per the narrower of the `H` and rectifier-noise widths.
    pub nodes_per_width: f64,
    /// Relative Richardson error accepted.
    pub rel_tol: f64,
    pub max_nodes: usize,
    /// Half-width of the convolution window in rectifier-noise deviations.
    pub noise_band: f64,
}

impl Default for OracleQuadrature {
    fn default() -> Self {
        OracleQuadrature { nodes_per_width: 8.0, rel_tol: 1e-7, max_nodes: 1 << 20, noise_band: 12.0 }
    }
}

fn z_of_h(c: &ChannelConsts, h: f64) -> f64 {
    h * (c.a2() + c.a4() * h)
}

/// Inverse of `z(h)` on `h >= 0`; zero below the range.
fn h_of_z(c: &ChannelConsts, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let (a2, a4) = (c.a2(), c.a4());
    if a4 == 0.0 {
        z / a2
    } else {
        2.0 * z / (a2 + sqrt(a2 * a2 + 4.0 * a4 * z))
    }
}

/// Exact density of `y` given `u` under the truncated diode model.
pub fn transition_pdf_exact(y: f64, u: f64, c: &ChannelConsts, quad: &OracleQuadrature) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain("input power must be non-negative"));
    }
    let (a2, a4) = (c.a2(), c.a4());
    if !(a2 > 0.0 || a4 > 0.0) {
        return Err(Error::DegenerateChannel("a2 and a4 both vanish"));
    }
    let h_law = Ncx2::new(2, c.noncentrality(u))?;
    let sr = sqrt(c.p_rec());
    // A rectifier noise below the float resolution of `y` cannot be resolved
    // by the convolution; the noiseless density is exact to that precision.
    if sr <= 1e-11 * y.abs() {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let h = h_of_z(c, y);
        return Ok(h_law.pdf(h) / (a2 + 2.0 * a4 * h));
    }

    let (mh, sdh) = (h_law.mean(), libm::sqrt(h_law.variance()));
    let support_lo = (mh - 13.0 * sdh).max(0.0);
    let support_hi = mh + 13.0 * sdh + 80.0;
    let lo = support_lo.max(h_of_z(c, y - quad.noise_band * sr));
    let hi = support_hi.min(h_of_z(c, y + quad.noise_band * sr));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let width = sdh.min(sr / (a2 + 2.0 * a4 * hi));
    let integrand = |h: f64| h_law.pdf(h) * norm_pdf((y - z_of_h(c, h)) / sr) / sr;
    let mut n = (ceil(quad.nodes_per_width * (hi - lo) / width) as usize).max(64);
    let mut coarse = trapezoid(&integrand, lo, hi, n);
    let mut err = f64::INFINITY;
    while n <= quad.max_nodes {
        // The refined rule reuses the coarse sum and adds midpoints.
        let step = (hi - lo) / n as f64;
        let mids: f64 = (0..n).map(|i| integrand(lo + (i as f64 + 0.5) * step)).sum();
        let fine = 0.5 * coarse + 0.5 * step * mids;
        err = (fine - coarse).abs() / 3.0;
        let value = fine + (fine - coarse) / 3.0;
        // Far-tail values only need to be negligible, not relatively accurate.
        if err <= quad.rel_tol * value.abs() || err * sr < 1e-18 {
            return Ok(value.max(0.0));
        }
        coarse = fine;
        n *= 2;
    }
    Err(Error::NoConvergence { what: "exact transition quadrature", achieved: err, wanted: quad.rel_tol })
}

fn trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let step = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * step)).sum();
    step * (0.5 * (f(a) + f(b)) + inner)
}
