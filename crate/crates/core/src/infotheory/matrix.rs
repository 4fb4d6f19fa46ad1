use alloc::vec::Vec;
use core::f64::consts::LN_2;

use libm::log;

use super::grid::output_grid;
use super::{QuadratureConfig, TransitionModel};
use crate::channel::{transition_gaussian, transition_pdf_exact, ChannelConsts};
use crate::{Error, Result};

/// Entries below this are treated as zero; their contribution to the
/// information sums vanishes in the limit.
const TINY: f64 = 1e-300;

/// Row-stochastic channel matrix stored as one contiguous band per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    start: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
    outputs: usize,
    /// `sum_j W_ij ln W_ij` per row.
    negentropy: Vec<f64>,
}

impl TransitionMatrix {
    /// Rows given as `(first column, band values)`; each row is normalized.
    pub fn from_bands(bands: Vec<(usize, Vec<f64>)>, outputs: usize) -> Result<Self> {
        if bands.is_empty() || outputs == 0 {
            return Err(Error::param("bands", "matrix must have rows and columns"));
        }
        let mut start = Vec::with_capacity(bands.len());
        let mut offset = Vec::with_capacity(bands.len() + 1);
        let mut values = Vec::new();
        let mut negentropy = Vec::with_capacity(bands.len());
        offset.push(0);
        for (first, row) in bands {
            if first + row.len() > outputs {
                return Err(Error::param("bands", "row extends past the last output"));
            }
            if row.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::param("bands", "entries must be finite and non-negative"));
            }
            let total: f64 = row.iter().sum();
            if !(total > 0.0) {
                return Err(Error::DegenerateChannel("a transition row has no mass on the output grid"));
            }
            let mut h = 0.0;
            for w in &row {
                let w = w / total;
                if w > TINY {
                    h += w * log(w);
                }
                values.push(w);
            }
            negentropy.push(h);
            start.push(first);
            offset.push(values.len());
        }
        Ok(TransitionMatrix { start, offset, values, outputs, negentropy })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let outputs = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::param("rows", "all rows must have the same length"));
        }
        Self::from_bands(rows.iter().map(|r| (0, r.clone())).collect(), outputs)
    }

    pub fn inputs(&self) -> usize {
        self.start.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// First column and band of row `i`.
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        (self.start[i], &self.values[self.offset[i]..self.offset[i + 1]])
    }

    pub fn output_law(&self, q: &[f64]) -> Vec<f64> {
        let mut p = alloc::vec![0.0; self.outputs];
        for (i, &qi) in q.iter().enumerate() {
            if qi == 0.0 {
                continue;
            }
            let (s, row) = self.row(i);
            for (pj, w) in p[s..s + row.len()].iter_mut().zip(row) {
                *pj += qi * w;
            }
        }
        p
    }

    /// `D(W_i || p)` in nats for every row.
    pub fn divergences(&self, p: &[f64]) -> Vec<f64> {
        let ln_p: Vec<f64> = p.iter().map(|&x| if x > TINY { log(x) } else { 0.0 }).collect();
        (0..self.inputs())
            .map(|i| {
                let (s, row) = self.row(i);
                let cross: f64 =
                    row.iter().zip(&ln_p[s..s + row.len()]).filter(|(w, _)| **w > TINY).map(|(w, l)| w * l).sum();
                self.negentropy[i] - cross
            })
            .collect()
    }

    /// `I(q; W)` in bits.
    pub fn mutual_information(&self, q: &[f64]) -> f64 {
        let d = self.divergences(&self.output_law(q));
        (q.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / LN_2).max(0.0)
    }
}

/// Channel matrix of `c` for the inputs `nodes`, on an output grid fitted
/// to their transition bands.
pub(crate) fn channel_matrix(c: &ChannelConsts, nodes: &[f64], q: &QuadratureConfig) -> Result<TransitionMatrix> {
    c.require_noisy()?;
    let laws: Vec<_> = nodes.iter().map(|&u| transition_gaussian(u, c)).collect();
    let means: Vec<f64> = laws.iter().map(|l| l.mean).collect();
    let sds: Vec<f64> = laws.iter().map(|l| l.sd()).collect();
    let grid = output_grid(&means, &sds, q)?;
    let bands = nodes
        .iter()
        .zip(&laws)
        .map(|(&u, law)| {
            let lo = grid.y.partition_point(|&y| y < law.mean - q.band * law.sd());
            let hi = grid.y.partition_point(|&y| y <= law.mean + q.band * law.sd());
            let row = (lo..hi)
                .map(|j| {
                    let y = grid.y[j];
                    let density = match &q.transition {
                        TransitionModel::Gaussian => law.pdf(y),
                        TransitionModel::Exact(oq) => transition_pdf_exact(y, u, c, oq)?,
                    };
                    Ok(density * grid.dy[j])
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((lo, row))
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_bands(bands, grid.y.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn bsc_information_at_uniform_input() {
        let w = TransitionMatrix::from_dense(&[vec![0.89, 0.11], vec![0.11, 0.89]]).unwrap();
        assert!((w.mutual_information(&[0.5, 0.5]) - (1.0 - h2(0.11))).abs() < 1e-14);
        assert_eq!(w.mutual_information(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn rows_are_normalized() {
        let w = TransitionMatrix::from_bands(vec![(0, vec![2.0, 2.0]), (1, vec![1.0, 3.0, 0.0])], 4).unwrap();
        assert_eq!(w.row(0).1, &[0.5, 0.5]);
        assert_eq!(w.row(1), (1, &[0.25, 0.75, 0.0][..]));
        assert!(TransitionMatrix::from_bands(vec![(3, vec![1.0, 1.0])], 4).is_err());
        assert!(TransitionMatrix::from_bands(vec![(0, vec![0.0])], 4).is_err());
    }
}
