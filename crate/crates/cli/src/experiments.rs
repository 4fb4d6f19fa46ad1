//! The three experiments: capacity sweep, normal-approximation curve, and
//! the Monte-Carlo / exact-transform validation of the transition law.

use rayon::prelude::*;
use serde::Serialize;
use swipt_core::channel::validation::{compare_exact_gaussian, ks_critical_001, ks_statistic, SampleMoments};
use swipt_core::channel::{monte_carlo_shard, transition_gaussian, ChannelConsts, OracleQuadrature};
use swipt_core::infotheory::{blahut_arimoto, lower_bound, BoundKind, CapacityResult};
use swipt_core::phys::TaylorOrder;
use swipt_core::stats::{cdf_l2_distance, Ncx2};

use crate::config::{ExperimentConfig, Method};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub g_lna_db: f64,
    pub method: &'static str,
    pub bits: f64,
    pub alpha_opt: Option<f64>,
    pub converged: bool,
    pub constraint_gap: f64,
    pub iterations: usize,
    /// `|bits at doubled resolution - bits|`; empty when not checked.
    pub refinement_change: Option<f64>,
}

fn evaluate(cfg: &ExperimentConfig, gain_db: f64, method: Method, exact: bool) -> swipt_core::Result<CapacityResult> {
    let params = cfg.system.params(gain_db);
    let q = cfg.quadrature.core(exact);
    let mean = params.input_mean();
    let c = ChannelConsts::from_params(&params, TaylorOrder::Fourth)?;
    let (tol, iters) = (cfg.quadrature.ba_tol, cfg.quadrature.ba_max_iter);
    match method {
        Method::Ba => blahut_arimoto(&c, mean, &q, tol, iters),
        Method::SecondOrder => blahut_arimoto(&c.second_order_only(), mean, &q, tol, iters),
        Method::Gamma => lower_bound(BoundKind::GammaOptimized, &c, mean, &q),
        Method::Rayleigh => lower_bound(BoundKind::Rayleigh, &c, mean, &q),
        Method::Uniform => lower_bound(BoundKind::Uniform, &c, mean, &q),
    }
}

/// One row per gain and method, in sweep order then method order. A failed
/// point yields a non-converged row with `NaN` bits.
pub fn run_capacity_sweep(cfg: &ExperimentConfig, exact: bool) -> Vec<SweepRow> {
    let tasks: Vec<(f64, Method)> =
        cfg.sweep.gains().into_iter().flat_map(|g| cfg.methods.iter().map(move |&m| (g, m))).collect();
    tasks
        .into_par_iter()
        .map(|(g_lna_db, method)| match evaluate(cfg, g_lna_db, method, exact) {
            Ok(r) => SweepRow {
                g_lna_db,
                method: method.name(),
                bits: r.bits,
                alpha_opt: r.gamma_shape(),
                converged: r.converged,
                constraint_gap: r.constraint_gap,
                iterations: r.iterations,
                refinement_change: r.refinement_change,
            },
            Err(_) => SweepRow {
                g_lna_db,
                method: method.name(),
                bits: f64::NAN,
                alpha_opt: None,
                converged: false,
                constraint_gap: f64::NAN,
                iterations: 0,
                refinement_change: None,
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Row {
    pub s: f64,
    pub l2_distance: f64,
}

/// Squared-L2 distance between the noncentral chi-squared CDF and its
/// moment-matched normal, per noncentrality.
pub fn run_lemma1_curve(dof: u32, s_list: &[f64]) -> swipt_core::Result<Vec<Lemma1Row>> {
    s_list
        .par_iter()
        .map(|&s| Ok(Lemma1Row { s, l2_distance: cdf_l2_distance(&Ncx2::new(dof, s)?)? }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub g_lna_db: f64,
    pub u_multiple: f64,
    pub check: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Monte-Carlo moments are checked within this many standard errors.
pub const MOMENT_SIGMAS: f64 = 4.0;
/// Largest accepted L1 distance between the exact and Gaussian densities.
pub const EXACT_L1_MAX: f64 = 1e-3;

const SHARD: usize = 100_000;

fn samples(c: &ChannelConsts, u: f64, count: usize, seed: u64, point: usize) -> Vec<f64> {
    let shards = count.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .flat_map_iter(|k| {
            let n = SHARD.min(count - k * SHARD);
            monte_carlo_shard(u, c, n, seed, ((point as u64) << 32) | k as u64)
        })
        .collect()
}

/// Checks the Gaussian transition law at each configured input against
/// Monte-Carlo draws of the diode model and, with `exact`, against the
/// exact-transform density.
pub fn run_oracle_validation(cfg: &ExperimentConfig, exact: bool) -> swipt_core::Result<Vec<Check>> {
    let v = &cfg.validation;
    let params = cfg.system.params(v.lna_gain_db);
    let c = ChannelConsts::from_params(&params, TaylorOrder::Fourth)?;
    let mean = params.input_mean();
    let mut checks = Vec::new();
    let mut exact_ks = Vec::new();
    for (point, &mult) in v.u_multiples.iter().enumerate() {
        let u = mult * mean;
        let g = transition_gaussian(u, &c);
        let mut ys = samples(&c, u, v.mc_count, cfg.seed, point);
        let m = SampleMoments::of(&ys);
        let mut push = |check, value: f64, threshold: f64, pass: bool| {
            checks.push(Check { g_lna_db: v.lna_gain_db, u_multiple: mult, check, value, threshold, pass })
        };
        let z_mean = (m.mean - g.mean).abs() / m.se_mean();
        push("mean_z", z_mean, MOMENT_SIGMAS, z_mean <= MOMENT_SIGMAS);
        let z_var = (m.var - g.var).abs() / m.se_var();
        push("variance_z", z_var, MOMENT_SIGMAS, z_var <= MOMENT_SIGMAS);
        let ks = ks_statistic(&mut ys, |y| g.cdf(y));
        let crit = ks_critical_001(v.mc_count);
        push("mc_ks", ks, crit, ks <= crit);
        if exact {
            let cmp = compare_exact_gaussian(u, &c, &OracleQuadrature::default(), 4001)?;
            push("exact_l1", cmp.l1, EXACT_L1_MAX, cmp.l1 <= EXACT_L1_MAX);
            push("exact_ks", cmp.ks, EXACT_L1_MAX, cmp.ks <= EXACT_L1_MAX);
            exact_ks.push((mult, cmp.ks));
        }
    }
    // The approximation must not get worse as the input grows.
    exact_ks.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in exact_ks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        checks.push(Check {
            g_lna_db: v.lna_gain_db,
            u_multiple: hi.0,
            check: "exact_ks_not_above_smaller_input",
            value: hi.1,
            threshold: lo.1,
            pass: hi.1 <= lo.1,
        });
    }
    Ok(checks)
}
