//! The conditional law `p(y | u)` of the rectifier output.
//!
//! With `X = |sqrt(u) + n_th|^2` the inner variable is a scaled noncentral
//! chi-squared with two degrees of freedom, `X = c * H`, `H ~ chi2_2(u / c)`,
//! `c = G_LNA * P_th / 2`. The channel output is `y = k2 X + k4 X^2 + n_rec`,
//! equivalently `a2 H + a4 H^2 + n_rec` with `a2 = k2 c`, `a4 = k4 c^2`.
//!
//! [`transition_gaussian`] replaces both the inner and the outer chi-squared
//! variables by moment-matched normals; [`exact`] keeps the chi-squared law
//! and only convolves with the rectifier noise numerically.

use core::f64::consts::PI;

use libm::{exp, sqrt};

use crate::phys::{SystemParams, TaylorOrder};
use crate::stats::special::norm_cdf;
use crate::{Error, Result};

pub mod exact;
mod mc;
pub mod validation;

pub use exact::{transition_pdf_exact, OracleQuadrature};
pub use mc::{monte_carlo_samples, monte_carlo_shard};

/// Constants of the channel at one LNA gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConsts {
    k2: f64,
    k4: f64,
    lna_gain: f64,
    p_th: f64,
    p_rec: f64,
}

impl ChannelConsts {
    /// `k4` is the quartic coefficient seen by the channel; pass zero for the
    /// 2nd-order-only model.
    pub fn new(k2: f64, k4: f64, lna_gain: f64, p_th: f64, p_rec: f64) -> Result<Self> {
        let nonneg = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, "must be finite and non-negative"))
            }
        };
        nonneg("k2", k2)?;
        nonneg("k4", k4)?;
        nonneg("p_th", p_th)?;
        nonneg("p_rec", p_rec)?;
        if !(lna_gain.is_finite() && lna_gain > 0.0) {
            return Err(Error::param("lna_gain", "must be finite and strictly positive"));
        }
        Ok(ChannelConsts { k2, k4, lna_gain, p_th, p_rec })
    }

    pub fn from_params(p: &SystemParams, order: TaylorOrder) -> Result<Self> {
        p.validate()?;
        let d = p.diode_coefficients(order);
        Self::new(d.k2, d.effective_k4(), p.lna_gain, p.thermal_noise_power(), p.rec_noise_power())
    }

    /// The same channel with the quartic term removed.
    pub fn second_order_only(&self) -> Self {
        ChannelConsts { k4: 0.0, ..*self }
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn k4(&self) -> f64 {
        self.k4
    }

    pub fn lna_gain(&self) -> f64 {
        self.lna_gain
    }

    pub fn p_th(&self) -> f64 {
        self.p_th
    }

    pub fn p_rec(&self) -> f64 {
        self.p_rec
    }

    /// Per-component variance of the amplified thermal noise,
    /// `G_LNA * P_th / 2`; also the scale between `X` and `H`.
    pub fn scale(&self) -> f64 {
        0.5 * self.lna_gain * self.p_th
    }

    pub fn a2(&self) -> f64 {
        self.k2 * self.scale()
    }

    pub fn a4(&self) -> f64 {
        let c = self.scale();
        self.k4 * c * c
    }

    /// Noncentrality of the inner chi-squared variable, `2u / (G_LNA P_th)`.
    pub fn noncentrality(&self, u: f64) -> f64 {
        u / self.scale()
    }

    /// True when every transition law has a strictly positive variance.
    pub fn is_noisy(&self) -> bool {
        self.p_rec > 0.0 || (self.p_th > 0.0 && (self.k2 > 0.0 || self.k4 > 0.0))
    }

    pub(crate) fn require_noisy(&self) -> Result<()> {
        if self.is_noisy() {
            Ok(())
        } else {
            Err(Error::DegenerateChannel("transition variance vanishes"))
        }
    }
}

/// Moments `(k + s, 2(k + 2s))` of the normal standing in for the inner
/// `chi2_2(s)` variable.
pub fn inner_moments(u: f64, c: &ChannelConsts) -> (f64, f64) {
    let s = c.noncentrality(u);
    (2.0 + s, 2.0 * (2.0 + 2.0 * s))
}

/// Noncentrality of the 1-dof chi-squared obtained by completing the square
/// in `a2 H + a4 H^2`:
/// `((2 a4 mu + a2) / (2 a4 sigma))^2 = (2 a4 mu + a2)^2 / (4 a4^2 sigma^2)`.
pub fn outer_noncentrality(u: f64, c: &ChannelConsts) -> Result<f64> {
    let (mu, var) = inner_moments(u, c);
    completed_square_noncentrality(c.a2(), c.a4(), mu, var)
}

pub fn completed_square_noncentrality(a2: f64, a4: f64, mu: f64, var: f64) -> Result<f64> {
    if a4 <= 0.0 {
        return Err(Error::Domain("completing the square needs a4 > 0"));
    }
    let num = 2.0 * a4 * mu + a2;
    Ok(num * num / (4.0 * a4 * a4 * var))
}

/// Mean and variance of `a2 H + a4 H^2` for normal `H`, written as a scaled
/// noncentral chi-squared with one degree of freedom:
/// `a4 var (1 + s) - a2^2 / (4 a4)` and `2 (a4 var)^2 (1 + 2 s)`.
///
/// The subtraction cancels badly when `a4 mu << a2`; [`direct_moments`] is
/// the form used for computation.
pub fn completed_square_moments(a2: f64, a4: f64, mu: f64, var: f64) -> Result<(f64, f64)> {
    let s = completed_square_noncentrality(a2, a4, mu, var)?;
    let g = a4 * var;
    Ok((g * (1.0 + s) - a2 * a2 / (4.0 * a4), 2.0 * g * g * (1.0 + 2.0 * s)))
}

/// Mean and variance of `a2 H + a4 H^2` for `H ~ N(mu, var)`.
pub fn direct_moments(a2: f64, a4: f64, mu: f64, var: f64) -> (f64, f64) {
    let slope = a2 + 2.0 * a4 * mu;
    (a2 * mu + a4 * (mu * mu + var), var * slope * slope + 2.0 * a4 * a4 * var * var)
}

/// Gaussian approximation of `p(y | u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionGaussian {
    pub mean: f64,
    pub var: f64,
}

impl TransitionGaussian {
    pub fn sd(&self) -> f64 {
        sqrt(self.var)
    }

    pub fn pdf(&self, y: f64) -> f64 {
        let d = y - self.mean;
        exp(-0.5 * d * d / self.var) / sqrt(2.0 * PI * self.var)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        norm_cdf((y - self.mean) / self.sd())
    }
}

/// Closed-form Gaussian transition law at input `u`.
///
/// Evaluated in physical units: with `X = c H`, `E X = u + G P_th` and
/// `Var X = (G P_th)^2 + 2 G P_th u`, this is [`direct_moments`] with
/// `(k2, k4)` in place of `(a2, a4)` plus the rectifier noise, which stays
/// well conditioned for `P_th -> 0` and `u -> 0`.
pub fn transition_gaussian(u: f64, c: &ChannelConsts) -> TransitionGaussian {
    let gp = c.lna_gain * c.p_th;
    let mean_x = u + gp;
    let var_x = gp * gp + 2.0 * gp * u;
    let (mean, var) = direct_moments(c.k2, c.k4, mean_x, var_x);
    TransitionGaussian { mean, var: var + c.p_rec }
}

pub fn transition_pdf(y: f64, u: f64, c: &ChannelConsts) -> f64 {
    transition_gaussian(u, c).pdf(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phys::db_to_linear;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    pub(crate) fn table_one(gain_db: f64, order: TaylorOrder) -> (ChannelConsts, f64) {
        let p = SystemParams::default().with_lna_gain(db_to_linear(gain_db));
        (ChannelConsts::from_params(&p, order).unwrap(), p.input_mean())
    }

    #[test]
    fn inner_moments_examples() {
        let c = ChannelConsts::new(1.0, 1.0, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(c.scale(), 0.5);
        assert_eq!(inner_moments(0.0, &c), (2.0, 4.0));
        assert_eq!(inner_moments(5.0, &c), (12.0, 44.0));
        let (m1, _) = inner_moments(0.75, &c);
        let (m2, _) = inner_moments(1.5, &c);
        assert_relative_eq!(m2 - 2.0, 2.0 * (m1 - 2.0), max_relative = 1e-15);
    }

    #[test]
    fn outer_noncentrality_examples() {
        assert_relative_eq!(completed_square_noncentrality(1.0, 2.0, 3.0, 4.0).unwrap(), 169.0 / 64.0);
        assert_relative_eq!(completed_square_noncentrality(0.0, 2.0, 3.0, 4.0).unwrap(), 9.0 / 4.0);
        let s = completed_square_noncentrality(1e-9, 5.0, 3.0, 4.0).unwrap();
        assert_relative_eq!(s, 9.0 / 4.0, max_relative = 1e-9);
        assert!(completed_square_noncentrality(1.0, 0.0, 3.0, 4.0).is_err());
        let (c, _) = table_one(0.0, TaylorOrder::SecondOnly);
        assert!(outer_noncentrality(1.0, &c).is_err());
    }

    #[test]
    fn second_order_gaussian_is_linear_image() {
        // a4 = 0, a2 = 1, no rectifier noise, u = 0: (mu, var) = (2, 4)
        let c = ChannelConsts::new(2.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(c.a2(), 1.0);
        let t = transition_gaussian(0.0, &c);
        assert_relative_eq!(t.mean, 2.0, max_relative = 1e-15);
        assert_relative_eq!(t.var, 4.0, max_relative = 1e-15);
    }

    #[test]
    fn pure_quartic_mean_is_second_moment() {
        let (mean, _) = direct_moments(0.0, 3.0, 5.0, 2.0);
        assert_eq!(mean, 3.0 * (25.0 + 2.0));
    }

    #[test]
    fn physical_and_normalized_forms_agree() {
        for db in [-10.0, 0.0, 20.0, 40.0] {
            let (c, m) = table_one(db, TaylorOrder::Fourth);
            for f in [0.0, 1e-4, 0.3, 1.0, 17.0] {
                let u = f * m;
                let (mu, var) = inner_moments(u, &c);
                let (mean, v) = direct_moments(c.a2(), c.a4(), mu, var);
                let t = transition_gaussian(u, &c);
                assert_relative_eq!(t.mean, mean, max_relative = 1e-12);
                assert_relative_eq!(t.var, v + c.p_rec(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn completed_square_matches_at_operating_point() {
        let (c, m) = table_one(20.0, TaylorOrder::Fourth);
        let (mu, var) = inner_moments(m, &c);
        let (a, b) = completed_square_moments(c.a2(), c.a4(), mu, var).unwrap();
        let (x, y) = direct_moments(c.a2(), c.a4(), mu, var);
        assert_relative_eq!(a, x, max_relative = 1e-10);
        assert_relative_eq!(b, y, max_relative = 1e-10);
    }

    #[test]
    fn peak_and_normalization() {
        let (c, m) = table_one(20.0, TaylorOrder::Fourth);
        let t = transition_gaussian(m, &c);
        assert_relative_eq!(transition_pdf(t.mean, m, &c), 1.0 / (2.0 * PI * t.var).sqrt(), max_relative = 1e-14);
        let sd = t.sd();
        let total = crate::stats::quad::integrate(|y| transition_pdf(y, m, &c), t.mean - 10.0 * sd, t.mean + 10.0 * sd, 16, 1 << 12, 1e-13).unwrap();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn moments_increase_with_input() {
        for order in [TaylorOrder::Fourth, TaylorOrder::SecondOnly] {
            let (c, m) = table_one(10.0, order);
            let grid: Vec<TransitionGaussian> = (0..100).map(|i| transition_gaussian(i as f64 * 0.3 * m, &c)).collect();
            for w in grid.windows(2) {
                assert!(w[1].mean > w[0].mean);
                assert!(w[1].var > w[0].var);
            }
        }
    }

    #[test]
    fn second_order_mode_is_k4_zero() {
        let p = SystemParams::default().with_lna_gain(30.0);
        let a = ChannelConsts::from_params(&p, TaylorOrder::SecondOnly).unwrap();
        let b = ChannelConsts::from_params(&p, TaylorOrder::Fourth).unwrap().second_order_only();
        assert_eq!(a, b);
        for u in [0.0, 1e-3, 0.1] {
            assert_eq!(transition_gaussian(u, &a), transition_gaussian(u, &b));
        }
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(ChannelConsts::new(-1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ChannelConsts::new(1.0, 0.0, 0.0, 1.0, 1.0).is_err());
        let silent = ChannelConsts::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(!silent.is_noisy());
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    proptest! {
        /// The completed-square form reproduces the direct moments only with
        /// the `4 a4^2 var` denominator in the noncentrality.
        #[test]
        fn completed_square_identity(a2 in 0.01f64..10.0, a4 in 0.01f64..10.0, mu in 0.1f64..100.0, var in 0.1f64..100.0) {
            let (m1, v1) = completed_square_moments(a2, a4, mu, var).unwrap();
            let (m2, v2) = direct_moments(a2, a4, mu, var);
            prop_assert!(rel(m1, m2) < 1e-10);
            prop_assert!(rel(v1, v2) < 1e-10);
        }
    }
}
