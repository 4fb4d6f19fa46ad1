use alloc::vec::Vec;

use libm::{ceil, pow, sqrt};

use super::QuadratureConfig;
use crate::channel::{transition_gaussian, ChannelConsts};
use crate::{Error, Result};

const MAP_STEPS: usize = 4096;
const MAX_OUTPUTS: usize = 1 << 24;
const MAX_POINTS: usize = 1 << 24;

/// Tabulated noise-scaled coordinate `t(u)` on `[0, u_max]`.
pub(crate) struct NoiseMap {
    u: Vec<f64>,
    t: Vec<f64>,
    mean: Vec<f64>,
}

impl NoiseMap {
    pub fn new(c: &ChannelConsts, u_max: f64) -> Self {
        let u_min = u_max * 1e-12;
        let ratio = pow(u_max / u_min, 1.0 / (MAP_STEPS - 1) as f64);
        let mut u = Vec::with_capacity(MAP_STEPS + 1);
        u.push(0.0);
        let mut x = u_min;
        for _ in 0..MAP_STEPS {
            u.push(x);
            x *= ratio;
        }
        u[MAP_STEPS] = u_max;
        let laws: Vec<_> = u.iter().map(|&v| transition_gaussian(v, c)).collect();
        let mut t = Vec::with_capacity(u.len());
        t.push(0.0);
        for w in laws.windows(2) {
            let dt = (w[1].mean - w[0].mean) / sqrt(0.5 * (w[0].var + w[1].var));
            t.push(t[t.len() - 1] + dt.max(0.0));
        }
        let mean = laws.iter().map(|l| l.mean).collect();
        NoiseMap { u, t, mean }
    }

    pub fn total(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn u_max(&self) -> f64 {
        self.u[self.u.len() - 1]
    }

    pub fn u_at(&self, t: f64) -> f64 {
        let k = self.t.partition_point(|&x| x < t);
        if k == 0 {
            return self.u[0];
        }
        if k >= self.t.len() {
            return self.u_max();
        }
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.u[k - 1] + f * (self.u[k] - self.u[k - 1])
    }

    /// Coordinate of the input whose transition mean is `y`, clamped to the
    /// map.
    pub fn t_at_mean(&self, y: f64) -> f64 {
        let k = self.mean.partition_point(|&m| m < y);
        if k == 0 {
            return 0.0;
        }
        if k >= self.mean.len() {
            return self.total();
        }
        let (m0, m1) = (self.mean[k - 1], self.mean[k]);
        let f = if m1 > m0 { (y - m0) / (m1 - m0) } else { 0.0 };
        self.t[k - 1] + f * (self.t[k] - self.t[k - 1])
    }

    /// `count` points equally spaced in `t` from `0` to the end of the map;
    /// equally spaced in `u` when the channel does not depend on its input.
    pub fn uniform_points(&self, count: usize) -> Vec<f64> {
        let total = self.total();
        let span = (count - 1) as f64;
        (0..count)
            .map(|i| {
                let f = i as f64 / span;
                if total > 0.0 {
                    self.u_at(f * total)
                } else {
                    f * self.u_max()
                }
            })
            .collect()
    }

    /// Number of points for a density of `per_sigma` per unit of `t`.
    pub fn count_for(&self, per_sigma: f64, minimum: usize) -> Result<usize> {
        let n = ceil(self.total() * per_sigma);
        if !(n < MAX_POINTS as f64) {
            return Err(Error::Domain("input range spans too many noise widths"));
        }
        Ok((n as usize + 1).max(minimum))
    }
}

/// Output nodes and trapezoid weights covering the bands of all rows.
pub(crate) struct OutputGrid {
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

pub(crate) fn output_grid(means: &[f64], sds: &[f64], q: &QuadratureConfig) -> Result<OutputGrid> {
    let mut per_sigma = q.y_per_sigma;
    loop {
        let grid = walk(means, sds, q.band, per_sigma)?;
        if grid.y.len() >= q.y_nodes {
            return Ok(grid);
        }
        per_sigma *= 1.05 * q.y_nodes as f64 / grid.y.len() as f64;
    }
}

fn walk(means: &[f64], sds: &[f64], band: f64, per_sigma: f64) -> Result<OutputGrid> {
    let mut rows: Vec<(f64, f64, f64)> =
        means.iter().zip(sds).map(|(&m, &s)| (m - band * s, m + band * s, s)).collect();

    // Local step: the smallest deviation among rows whose band still reaches
    // y (a suffix minimum over rows sorted by upper edge).
    let mut by_upper = rows.clone();
    by_upper.sort_by(|a, b| a.1.total_cmp(&b.1));
    let uppers: Vec<f64> = by_upper.iter().map(|r| r.1).collect();
    let mut suffix_min = alloc::vec![f64::INFINITY; by_upper.len() + 1];
    for i in (0..by_upper.len()).rev() {
        suffix_min[i] = suffix_min[i + 1].min(by_upper[i].2);
    }
    let local_sd = |y: f64| suffix_min[uppers.partition_point(|&u| u < y).min(by_upper.len() - 1)];

    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut segments: Vec<(f64, f64)> = Vec::new();
    for &(lo, hi, _) in &rows {
        match segments.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => segments.push((lo, hi)),
        }
    }

    let (mut y, mut dy) = (Vec::new(), Vec::new());
    for (lo, hi) in segments {
        let first = y.len();
        let mut x = lo;
        y.push(x);
        while x < hi {
            let step = local_sd(x) / per_sigma;
            x = if x + step >= hi - 0.25 * step { hi } else { x + step };
            y.push(x);
            if y.len() > MAX_OUTPUTS {
                return Err(Error::param("y_per_sigma", "output grid exceeds 2^24 nodes"));
            }
        }
        let last = y.len() - 1;
        for j in first..=last {
            let left = if j > first { y[j] - y[j - 1] } else { 0.0 };
            let right = if j < last { y[j + 1] - y[j] } else { 0.0 };
            dy.push(0.5 * (left + right));
        }
    }
    Ok(OutputGrid { y, dy })
}
