//! Mutual information, capacity lower bounds and the constrained
//! Blahut–Arimoto capacity of the integrated receiver.
//!
//! Everything is discretized in the noise-scaled input coordinate
//! `t(u) = int_0^u mu'(v) / sigma(v) dv`, in which neighbouring transition
//! laws are equally distinguishable; a fixed number of nodes per unit of `t`
//! then resolves the channel uniformly from the thermal-limited to the
//! rectifier-limited regime.

mod ba;
mod bounds;
mod grid;
mod matrix;

use crate::channel::OracleQuadrature;
use crate::stats::InputLaw;
use crate::{Error, Result};

pub use ba::{blahut_arimoto_matrix, BaOutcome};
pub use bounds::{blahut_arimoto, lower_bound, marginal_pdf, mutual_information, optimize_gamma_shape, BoundKind};
pub use matrix::TransitionMatrix;

/// Which transition law fills the channel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TransitionModel {
    #[default]
    Gaussian,
    /// The exact-transform density; slow, for validation.
    Exact(OracleQuadrature),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Minimum number of input nodes or cells.
    pub u_nodes: usize,
    /// Minimum number of output nodes.
    pub y_nodes: usize,
    /// Upper end of the input grid in multiples of the mean constraint.
    pub u_max_mult: f64,
    /// Relative change under refinement accepted as converged.
    pub rel_tol: f64,
    /// Input cells per unit of `t` when integrating a fixed law.
    pub u_per_sigma: f64,
    /// Input mass points per unit of `t` for Blahut–Arimoto.
    pub ba_u_per_sigma: f64,
    /// Output nodes per local transition deviation.
    pub y_per_sigma: f64,
    /// Half-width of each transition row in deviations.
    pub band: f64,
    /// Recompute at doubled resolution and fold the change into `converged`.
    pub check_refinement: bool,
    pub transition: TransitionModel,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            u_nodes: 64,
            y_nodes: 64,
            u_max_mult: 30.0,
            rel_tol: 1e-3,
            u_per_sigma: 2.0,
            ba_u_per_sigma: 1.0,
            y_per_sigma: 1.0,
            band: 9.0,
            check_refinement: true,
            transition: TransitionModel::Gaussian,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.u_nodes < 64 {
            return Err(Error::param("u_nodes", "must be at least 64"));
        }
        if self.y_nodes < 64 {
            return Err(Error::param("y_nodes", "must be at least 64"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::param("rel_tol", "must lie in (0, 1e-3]"));
        }
        if !(self.u_max_mult.is_finite() && self.u_max_mult > 1.0) {
            return Err(Error::param("u_max_mult", "must exceed one"));
        }
        for (name, v) in [
            ("u_per_sigma", self.u_per_sigma),
            ("ba_u_per_sigma", self.ba_u_per_sigma),
            ("y_per_sigma", self.y_per_sigma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, "must be finite and positive"));
            }
        }
        if !(self.band.is_finite() && self.band >= 5.0) {
            return Err(Error::param("band", "must be at least 5 deviations"));
        }
        Ok(())
    }

    /// Every node count and density doubled.
    pub fn refined(&self) -> Self {
        QuadratureConfig {
            u_nodes: 2 * self.u_nodes,
            y_nodes: 2 * self.y_nodes,
            u_per_sigma: 2.0 * self.u_per_sigma,
            ba_u_per_sigma: 2.0 * self.ba_u_per_sigma,
            y_per_sigma: 2.0 * self.y_per_sigma,
            ..*self
        }
    }
}

/// A capacity value or bound in bits per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub bits: f64,
    /// The achieving (BA) or assumed (bounds) input law.
    pub law: InputLaw,
    pub iterations: usize,
    pub converged: bool,
    /// `|E u - mean| / mean` of the discretized law.
    pub constraint_gap: f64,
    /// `|bits(refined) - bits|`, when the refinement check ran.
    pub refinement_change: Option<f64>,
}

impl CapacityResult {
    /// Shape of the gamma law, when the law is one.
    pub fn gamma_shape(&self) -> Option<f64> {
        match self.law.kind() {
            crate::stats::LawKind::Gamma { shape } => Some(*shape),
            _ => None,
        }
    }
}
