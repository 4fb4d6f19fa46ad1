use alloc::vec::Vec;

use libm::sqrt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ChannelConsts;

/// Draws of the truncated diode model `k2 X + k4 X^2 + n_rec` with
/// `X = |sqrt(u) + n_th|^2` at a fixed input `u`. Deterministic per seed.
pub fn monte_carlo_samples(u: f64, c: &ChannelConsts, count: usize, seed: u64) -> Vec<f64> {
    monte_carlo_shard(u, c, count, seed, 0)
}

/// Independent substream `shard` of the generator seeded with `seed`, for
/// splitting a run across workers.
pub fn monte_carlo_shard(u: f64, c: &ChannelConsts, count: usize, seed: u64, shard: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    let sd_th = sqrt(c.scale());
    let sd_rec = sqrt(c.p_rec());
    let x0 = sqrt(u.max(0.0));
    (0..count)
        .map(|_| {
            let n1: f64 = StandardNormal.sample(&mut rng);
            let n2: f64 = StandardNormal.sample(&mut rng);
            let nr: f64 = StandardNormal.sample(&mut rng);
            let re = x0 + sd_th * n1;
            let im = sd_th * n2;
            let x = re * re + im * im;
            x * (c.k2() + c.k4() * x) + sd_rec * nr
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::validation::SampleMoments;

    #[test]
    fn noiseless_samples_are_deterministic_image() {
        let c = ChannelConsts::new(0.5, 2.0, 1.0, 0.0, 0.0).unwrap();
        for y in monte_carlo_samples(3.0, &c, 10, 1) {
            assert!((y - (0.5 * 3.0 + 2.0 * 9.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_and_sharded() {
        let c = ChannelConsts::new(0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(monte_carlo_samples(1.0, &c, 100, 7), monte_carlo_samples(1.0, &c, 100, 7));
        assert_ne!(monte_carlo_samples(1.0, &c, 100, 7), monte_carlo_samples(1.0, &c, 100, 8));
        assert_ne!(monte_carlo_shard(1.0, &c, 100, 7, 0), monte_carlo_shard(1.0, &c, 100, 7, 1));
    }

    #[test]
    fn mean_matches_exact_chi_squared_moments() {
        // Small s so the difference from the normal stand-in is visible.
        let c = ChannelConsts::new(0.5, 0.25, 1.0, 2.0, 0.0).unwrap();
        let u = 1.5;
        let s = c.noncentrality(u);
        let h2 = (2.0 + s) * (2.0 + s) + 2.0 * (2.0 + 2.0 * s);
        let exact = c.a2() * (2.0 + s) + c.a4() * h2;
        let m = SampleMoments::of(&monte_carlo_samples(u, &c, 1_000_000, 3));
        assert!((m.mean - exact).abs() < 4.0 * m.se_mean(), "{} vs {exact}", m.mean);
    }
}
