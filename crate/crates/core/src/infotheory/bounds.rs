use alloc::vec::Vec;

use libm::{ceil, exp, fabs, log, sqrt};

use super::grid::NoiseMap;
use super::matrix::channel_matrix;
use super::{blahut_arimoto_matrix, CapacityResult, QuadratureConfig, TransitionModel};
use crate::channel::{transition_gaussian, transition_pdf_exact, ChannelConsts};
use crate::stats::{InputLaw, LawKind};
use crate::{Error, Result};

/// Cells lighter than this are dropped.
const MIN_CELL_MASS: f64 = 1e-18;

/// Half-width, in units of `t`, of the inputs feeding one output density.
const MARGINAL_WINDOW: f64 = 14.0;

const SHAPE_RANGE: (f64, f64) = (0.05, 50.0);
const SHAPE_SCAN: usize = 9;
const SHAPE_LOG_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    GammaOptimized,
    Rayleigh,
    Uniform,
}

fn check_mean(mean: f64) -> Result<()> {
    if mean.is_finite() && mean > 0.0 {
        Ok(())
    } else {
        Err(Error::param("mean", "must be finite and strictly positive"))
    }
}

/// Mass points and weights standing in for `law`.
///
/// Continuous laws are split into cells equally spaced in `t` up to
/// `u_max_mult` times the mean (the last cell is unbounded), each carried
/// by its conditional mean, so the discretized law keeps the mean exactly.
fn discretize(law: &InputLaw, c: &ChannelConsts, q: &QuadratureConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    if let LawKind::Discrete { points, weights } = law.kind() {
        return Ok((points.clone(), weights.clone()));
    }
    let map = NoiseMap::new(c, q.u_max_mult * law.mean());
    let cells = map.count_for(q.u_per_sigma, q.u_nodes + 1)? - 1;
    let mut edges = map.uniform_points(cells + 1);
    edges[cells] = f64::INFINITY;
    let (mut points, mut weights) = (Vec::with_capacity(cells), Vec::with_capacity(cells));
    for (e, (mass, moment)) in edges.windows(2).zip(law.cells(&edges)) {
        if mass < MIN_CELL_MASS {
            continue;
        }
        let mut u = (moment / mass).max(e[0]);
        if e[1].is_finite() {
            u = u.min(e[1]);
        }
        points.push(u);
        weights.push(mass);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((points, weights))
}

fn law_mean(points: &[f64], weights: &[f64]) -> f64 {
    points.iter().zip(weights).map(|(u, w)| u * w).sum()
}

fn information(law: &InputLaw, c: &ChannelConsts, q: &QuadratureConfig) -> Result<(f64, f64)> {
    c.require_noisy()?;
    let (points, weights) = discretize(law, c, q)?;
    let w = channel_matrix(c, &points, q)?;
    Ok((w.mutual_information(&weights), law_mean(&points, &weights)))
}

/// `I(u; y)` in bits for the input law `law`.
pub fn mutual_information(law: &InputLaw, c: &ChannelConsts, q: &QuadratureConfig) -> Result<f64> {
    q.validate()?;
    Ok(information(law, c, q)?.0)
}

/// Output density `p(y) = int p(y | u) p(u) du`, refined until doubling the
/// input resolution changes it by at most `rel_tol`.
///
/// Only inputs whose transition mean lies within 14 units of `t` of `y` are
/// integrated; the rest contribute below `exp(-98)` of the peak transition
/// density.
pub fn marginal_pdf(y: f64, law: &InputLaw, c: &ChannelConsts, q: &QuadratureConfig) -> Result<f64> {
    q.validate()?;
    c.require_noisy()?;
    let density = |u: f64| -> Result<f64> {
        match &q.transition {
            TransitionModel::Gaussian => Ok(transition_gaussian(u, c).pdf(y)),
            TransitionModel::Exact(oq) => transition_pdf_exact(y, u, c, oq),
        }
    };
    if let LawKind::Discrete { points, weights } = law.kind() {
        let mut total = 0.0;
        for (&u, &w) in points.iter().zip(weights) {
            total += w * density(u)?;
        }
        return Ok(total);
    }

    let mut u_max = q.u_max_mult * law.mean();
    for _ in 0..64 {
        let g = transition_gaussian(u_max, c);
        if g.mean - 2.0 * MARGINAL_WINDOW * g.sd() >= y {
            break;
        }
        u_max *= 2.0;
    }
    let map = NoiseMap::new(c, u_max);
    let t_y = map.t_at_mean(y);
    let (t_lo, t_hi) = ((t_y - MARGINAL_WINDOW).max(0.0), (t_y + MARGINAL_WINDOW).min(map.total()));
    let eval = |per_sigma: f64| -> Result<f64> {
        let cells = ((ceil((t_hi - t_lo) * per_sigma) as usize).max(16)) as f64;
        let edge = |k: f64| map.u_at(t_lo + (t_hi - t_lo) * k / cells);
        let mut total = 0.0;
        let mut lo = if t_lo > 0.0 { edge(0.0) } else { 0.0 };
        for k in 1..=cells as usize {
            let hi = if k == cells as usize && t_hi >= map.total() { f64::INFINITY } else { edge(k as f64) };
            let (mass, moment) = law.cell(lo, hi);
            if mass > 0.0 {
                total += mass * density(moment / mass)?;
            }
            lo = hi;
        }
        Ok(total)
    };

    // Cell representatives make the error O(h^2) in the cell width, so
    // successive doublings are Richardson-extrapolated.
    let mut per_sigma = 2.0 * q.u_per_sigma;
    let mut value = eval(per_sigma)?;
    let mut extrapolated = f64::NAN;
    let mut change = f64::INFINITY;
    for _ in 0..10 {
        per_sigma *= 2.0;
        let next = eval(per_sigma)?;
        if fabs(next - value) <= q.rel_tol * next || next == 0.0 {
            return Ok(next);
        }
        let e = (4.0 * next - value) / 3.0;
        change = fabs(e - extrapolated) / e;
        if change <= q.rel_tol {
            return Ok(e.max(0.0));
        }
        (value, extrapolated) = (next, e);
    }
    Err(Error::NoConvergence { what: "marginal density", achieved: change, wanted: q.rel_tol })
}

/// Fixed-law bound with the refinement check folded into `converged`.
fn fixed_law(law: InputLaw, c: &ChannelConsts, q: &QuadratureConfig, iterations: usize, unimodal: bool) -> Result<CapacityResult> {
    let mean = law.mean();
    let (bits, achieved) = information(&law, c, q)?;
    let refinement_change = if q.check_refinement {
        Some(fabs(information(&law, c, &q.refined())?.0 - bits))
    } else {
        None
    };
    let constraint_gap = fabs(achieved - mean) / mean;
    let converged = unimodal && constraint_gap <= 1e-3 && refinement_ok(refinement_change, bits, q);
    Ok(CapacityResult { bits, law, iterations, converged, constraint_gap, refinement_change })
}

/// Relative criterion with a one-bit floor, so that near-zero values are
/// not held to an absolute accuracy far below the grid's.
fn refinement_ok(change: Option<f64>, bits: f64, q: &QuadratureConfig) -> bool {
    change.is_none_or(|d| d <= q.rel_tol * bits.max(1.0))
}

/// Gamma law of the given mean maximizing the information over its shape.
///
/// A log-spaced scan over shapes in `[0.05, 50]` brackets the maximum, which
/// golden-section search then refines in `ln shape`. A scan with more than
/// one local maximum is reported as not converged.
pub fn optimize_gamma_shape(c: &ChannelConsts, mean: f64, q: &QuadratureConfig) -> Result<CapacityResult> {
    q.validate()?;
    check_mean(mean)?;
    let (a, b) = (log(SHAPE_RANGE.0), log(SHAPE_RANGE.1));
    let value = |x: f64| -> Result<f64> { Ok(information(&InputLaw::gamma(exp(x), mean)?, c, q)?.0) };

    let xs: Vec<f64> = (0..SHAPE_SCAN).map(|k| a + (b - a) * k as f64 / (SHAPE_SCAN - 1) as f64).collect();
    let fs = xs.iter().map(|&x| value(x)).collect::<Result<Vec<f64>>>()?;
    let mut evaluations = SHAPE_SCAN;
    let best = (0..SHAPE_SCAN).fold(0, |m, k| if fs[k] > fs[m] { k } else { m });
    let peaks = (0..SHAPE_SCAN)
        .filter(|&k| (k == 0 || fs[k] > fs[k - 1]) && (k + 1 == SHAPE_SCAN || fs[k] > fs[k + 1]))
        .count();

    let (mut lo, mut hi) = (xs[best.saturating_sub(1)], xs[(best + 1).min(SHAPE_SCAN - 1)]);
    let (mut x_best, mut f_best) = (xs[best], fs[best]);
    let ratio = 0.5 * (sqrt(5.0) - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (value(x1)?, value(x2)?);
    evaluations += 2;
    while hi - lo > SHAPE_LOG_TOL {
        if f1 >= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = value(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = value(x2)?;
        }
        evaluations += 1;
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > f_best {
            (x_best, f_best) = (x, f);
        }
    }
    fixed_law(InputLaw::gamma(exp(x_best), mean)?, c, q, evaluations, peaks == 1)
}

/// Information of a fixed-family input law of the given mean.
pub fn lower_bound(kind: BoundKind, c: &ChannelConsts, mean: f64, q: &QuadratureConfig) -> Result<CapacityResult> {
    q.validate()?;
    check_mean(mean)?;
    match kind {
        BoundKind::GammaOptimized => optimize_gamma_shape(c, mean, q),
        BoundKind::Rayleigh => fixed_law(InputLaw::rayleigh(mean)?, c, q, 0, true),
        BoundKind::Uniform => fixed_law(InputLaw::uniform(mean)?, c, q, 0, true),
    }
}

fn ba_once(c: &ChannelConsts, mean: f64, q: &QuadratureConfig, tol: f64, max_iter: usize) -> Result<(CapacityResult, f64)> {
    c.require_noisy()?;
    let map = NoiseMap::new(c, q.u_max_mult * mean);
    let nodes = map.uniform_points(map.count_for(q.ba_u_per_sigma, q.u_nodes)?);
    let w = channel_matrix(c, &nodes, q)?;
    let out = blahut_arimoto_matrix(&w, Some((&nodes, mean)), tol, max_iter)?;
    let constraint_gap = fabs(out.mean_cost - mean) / mean;
    let law = InputLaw::discrete(nodes, out.weights)?;
    let result = CapacityResult {
        bits: out.bits,
        law,
        iterations: out.iterations,
        converged: out.converged && out.monotonicity_violations == 0,
        constraint_gap,
        refinement_change: None,
    };
    Ok((result, out.upper_bits))
}

/// Capacity under `E u = mean` by Blahut–Arimoto over mass points equally
/// spaced in `t` on `[0, u_max_mult * mean]`.
///
/// `tol` bounds the gap, in bits, between the returned information and the
/// dual upper bound of the discretized problem.
pub fn blahut_arimoto(c: &ChannelConsts, mean: f64, q: &QuadratureConfig, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    q.validate()?;
    check_mean(mean)?;
    let (mut result, _) = ba_once(c, mean, q, tol, max_iter)?;
    if q.check_refinement {
        let (fine, _) = ba_once(c, mean, &q.refined(), tol, max_iter)?;
        let change = fabs(fine.bits - result.bits);
        result.refinement_change = Some(change);
        result.converged &= fine.converged && refinement_ok(Some(change), result.bits, q);
    }
    result.converged &= result.constraint_gap <= 1e-3;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::OracleQuadrature;
    use crate::phys::{db_to_linear, SystemParams, TaylorOrder};
    use crate::stats::quad::integrate;
    use alloc::vec;

    fn table_one(db: f64, order: TaylorOrder) -> (ChannelConsts, f64) {
        let p = SystemParams::default().with_lna_gain(db_to_linear(db));
        (ChannelConsts::from_params(&p, order).unwrap(), p.input_mean())
    }

    fn quick() -> QuadratureConfig {
        QuadratureConfig { check_refinement: false, ..Default::default() }
    }

    #[test]
    fn point_mass_carries_no_information() {
        let (c, m) = table_one(0.0, TaylorOrder::Fourth);
        assert!(mutual_information(&InputLaw::point_mass(m).unwrap(), &c, &quick()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn input_independent_channel_carries_no_information() {
        let c = ChannelConsts::new(0.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        for law in [InputLaw::gamma(1.0, 1.0).unwrap(), InputLaw::uniform(2.0).unwrap()] {
            assert!(mutual_information(&law, &c, &quick()).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn separated_pair_carries_one_bit() {
        let (c, m) = table_one(20.0, TaylorOrder::Fourth);
        let law = InputLaw::discrete(vec![0.0, m], vec![1.0, 1.0]).unwrap();
        let bits = mutual_information(&law, &c, &quick()).unwrap();
        assert!((bits - 1.0).abs() < 1e-3, "{bits}");
    }

    #[test]
    fn marginal_of_point_mass_is_transition() {
        let (c, m) = table_one(10.0, TaylorOrder::Fourth);
        let g = transition_gaussian(m, &c);
        let law = InputLaw::point_mass(m).unwrap();
        for k in [-2.0, 0.0, 1.5] {
            let y = g.mean + k * g.sd();
            assert_eq!(marginal_pdf(y, &law, &c, &quick()).unwrap(), g.pdf(y));
        }
    }

    #[test]
    fn marginal_integrates_to_one() {
        let (c, m) = table_one(0.0, TaylorOrder::Fourth);
        let law = InputLaw::gamma(1.0, m).unwrap();
        let top = transition_gaussian(40.0 * m, &c);
        let low = transition_gaussian(0.0, &c);
        let (a, b) = (low.mean - 10.0 * low.sd(), top.mean + 10.0 * top.sd());
                let q = QuadratureConfig { rel_tol: 1e-8, ..quick() };
        let total = integrate(|y| marginal_pdf(y, &law, &c, &q).unwrap(), a, b, 64, 1 << 12, 1e-7).unwrap();
        assert!((total - 1.0).abs() < 1e-5, "{total}");
    }

    #[test]
    fn gamma_shape_one_matches_exponential_marginal_by_monte_carlo() {
        use crate::channel::monte_carlo_shard;
        use crate::stats::input_sample;
        let (c, m) = table_one(0.0, TaylorOrder::Fourth);
        let law = InputLaw::gamma(1.0, m).unwrap();
        let inputs = input_sample(&law, 1_000_000, 11);
        let ys: Vec<f64> = inputs.iter().enumerate().map(|(i, &u)| monte_carlo_shard(u, &c, 1, 12, i as u64)[0]).collect();
        // Box kernel of a quarter transition deviation around the mean output.
        let y0: f64 = ys.iter().sum::<f64>() / ys.len() as f64;
        let h = 0.25 * transition_gaussian(m, &c).sd();
        let hits = ys.iter().filter(|&&y| (y - y0).abs() < h).count() as f64;
        let n = ys.len() as f64;
        let p = hits / n;
        let estimate = p / (2.0 * h);
        let se = (p * (1.0 - p) / n).sqrt() / (2.0 * h);
        let exact = integrate(|y| marginal_pdf(y, &law, &c, &quick()).unwrap(), y0 - h, y0 + h, 4, 256, 1e-9).unwrap() / (2.0 * h);
        assert!((estimate - exact).abs() < 3.0 * se, "{estimate} vs {exact} (se {se})");
    }

    #[test]
    fn bounds_are_sandwiched_by_capacity() {
        let (c, m) = table_one(0.0, TaylorOrder::Fourth);
        let q = quick();
        let ba = blahut_arimoto(&c, m, &q, 1e-4, 50_000).unwrap();
        assert!(ba.converged);
        assert!(ba.constraint_gap < 1e-3);
        let gamma = optimize_gamma_shape(&c, m, &q).unwrap();
        let exp1 = mutual_information(&InputLaw::gamma(1.0, m).unwrap(), &c, &q).unwrap();
        assert!(gamma.bits >= exp1);
        assert!(gamma.converged);
        for kind in [BoundKind::Uniform, BoundKind::Rayleigh] {
            let b = lower_bound(kind, &c, m, &q).unwrap();
            assert!(b.bits >= 0.0 && b.bits <= ba.bits + 2e-3, "{kind:?}");
        }
        assert!(gamma.bits <= ba.bits + 2e-3);
    }

    #[test]
    fn exact_kernel_is_close_to_gaussian_kernel() {
        let (c, m) = table_one(0.0, TaylorOrder::Fourth);
        let q = quick();
        let e = QuadratureConfig { transition: TransitionModel::Exact(OracleQuadrature::default()), ..q };
        let law = InputLaw::gamma(0.6, m).unwrap();
        let a = mutual_information(&law, &c, &q).unwrap();
        let b = mutual_information(&law, &c, &e).unwrap();
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let (c, _) = table_one(0.0, TaylorOrder::Fourth);
        assert!(optimize_gamma_shape(&c, 0.0, &quick()).is_err());
        let bad = QuadratureConfig { u_nodes: 10, ..Default::default() };
        assert!(blahut_arimoto(&c, 1.0, &bad, 1e-4, 10).is_err());
        let silent = ChannelConsts::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            mutual_information(&InputLaw::uniform(1.0).unwrap(), &silent, &quick()),
            Err(Error::DegenerateChannel(_))
        ));
    }
}
