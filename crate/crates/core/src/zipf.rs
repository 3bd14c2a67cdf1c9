//! Truncated Zipf degree model: exact survival function, its closed-form
//! power-law bound, and the resulting bound on the number of high-degree
//! vertices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The closed-form survival bound is only claimed above this degree.
pub const BOUND_MIN_X: u64 = 10;

/// Discrete Zipf distribution on `1..=n` with `P(x) ∝ x^(-zipf_shape)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipfModel {
    n: u64,
    zipf_shape: f64,
}

impl ZipfModel {
    pub fn new(n: u64, zipf_shape: f64) -> Result<Self> {
        check_shape(zipf_shape)?;
        if n == 0 {
            return Err(Error::InvalidArgument("Zipf truncation bound must be >= 1".into()));
        }
        Ok(Self { n, zipf_shape })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shape(&self) -> f64 {
        self.zipf_shape
    }

    /// Generalized harmonic number `H_{x,α}`, summed from the smallest term.
    pub fn harmonic(&self, x: u64) -> f64 {
        tail_sum(1, x.min(self.n), self.zipf_shape)
    }

    /// Survival table: entry `x` is `S(x)` for `x` in `0..=n`.
    ///
    /// Matches [`zipf_survival_exact`] bit for bit; use it for sweeps.
    pub fn survival_table(&self) -> Vec<f64> {
        let n = self.n as usize;
        let mut tails = vec![0.0; n + 1];
        let mut acc = 0.0;
        for x in (0..n).rev() {
            acc += ((x + 1) as f64).powf(-self.zipf_shape);
            tails[x] = acc;
        }
        let total = tails[0];
        tails.iter().map(|t| t / total).collect()
    }
}

fn check_shape(shape: f64) -> Result<()> {
    if shape.is_nan() || shape <= 1.0 {
        return Err(Error::InvalidArgument(format!("Zipf shape must be > 1, got {shape}")));
    }
    Ok(())
}

/// `Σ_{j=lo}^{hi} j^(-s)`, accumulated from `hi` down to `lo`.
fn tail_sum(lo: u64, hi: u64, s: f64) -> f64 {
    let mut acc = 0.0;
    let mut j = hi;
    while j >= lo && j > 0 {
        acc += (j as f64).powf(-s);
        j -= 1;
    }
    acc
}

/// `S(x) = (H_n − H_x) / H_n`; zero for `x >= n`.
pub fn zipf_survival_exact(model: &ZipfModel, x: u64) -> f64 {
    if x >= model.n {
        return 0.0;
    }
    let s = model.zipf_shape;
    // H_n − H_x is the tail x+1..=n; summing it directly avoids cancellation.
    // H_n continues the same accumulation down to 1, as in `survival_table`.
    let tail = tail_sum(x + 1, model.n, s);
    let total = continue_sum(tail, x, s);
    tail / total
}

/// Adds `Σ_{j=1}^{from} j^(-s)` to `acc`, largest index first.
fn continue_sum(mut acc: f64, from: u64, s: f64) -> f64 {
    let mut j = from;
    while j > 0 {
        acc += (j as f64).powf(-s);
        j -= 1;
    }
    acc
}

/// Riemann zeta for `s > 1`: direct sum of the first terms plus an
/// Euler–Maclaurin tail. Absolute error is far below 1e-12 for `s >= 1.1`.
pub fn zeta(s: f64) -> Result<f64> {
    check_shape(s)?;
    const N: u64 = 1000;
    let head = tail_sum(1, N - 1, s);
    let n = N as f64;
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    Ok(head + tail)
}

/// `x^(1−α) / ((α − 1) ζ(α))`, an upper bound on `S(x)` for `x >= BOUND_MIN_X`.
pub fn zipf_survival_bound(shape: f64, x: u64) -> Result<f64> {
    let z = zeta(shape)?;
    Ok((x as f64).powf(1.0 - shape) / ((shape - 1.0) * z))
}

/// Bound on the probability that more than `b` of `n` vertices have degree at
/// least `min_degree`, capped at 1.
pub fn high_degree_count_bound(n: u64, min_degree: u64, b: u64, shape: f64) -> Result<f64> {
    let z = zeta(shape)?;
    if b == 0 {
        return Err(Error::InvalidArgument("b must be >= 1".into()));
    }
    let expr = n as f64 * (min_degree as f64).powf(1.0 - shape) / (b as f64 * (shape - 1.0) * z);
    Ok(expr.min(1.0))
}

/// Inverse-CDF sampler over a precomputed cumulative table.
#[derive(Clone, Debug)]
pub struct ZipfSampler {
    cumulative: Vec<f64>,
}

impl ZipfSampler {
    pub fn new(model: &ZipfModel) -> Self {
        let mut acc = 0.0;
        let cumulative = (1..=model.n)
            .map(|j| {
                acc += (j as f64).powf(-model.zipf_shape);
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Draws a value in `1..=n`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("n >= 1");
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1) as u64 + 1
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn two_term_survival() {
        let m = ZipfModel::new(2, 2.0).unwrap();
        assert!((zipf_survival_exact(&m, 1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn boundaries() {
        for (n, s) in [(1, 1.5), (10, 2.0), (1000, 3.0)] {
            let m = ZipfModel::new(n, s).unwrap();
            assert_eq!(zipf_survival_exact(&m, 0), 1.0);
            assert_eq!(zipf_survival_exact(&m, n), 0.0);
            assert_eq!(zipf_survival_exact(&m, n + 5), 0.0);
        }
    }

    #[test]
    fn survival_matches_extended_precision() {
        // 50-digit evaluation of (H_n − H_10)/H_n for n = 10^4, α = 2
        let expect = 0.057_796_918_430_019_46;
        let m = ZipfModel::new(10_000, 2.0).unwrap();
        let got = zipf_survival_exact(&m, 10);
        assert!(((got - expect) / expect).abs() <= 1e-14, "{got}");
    }

    #[test]
    fn table_matches_pointwise() {
        let m = ZipfModel::new(500, 1.5).unwrap();
        let table = m.survival_table();
        for x in [0, 1, 7, 10, 250, 499, 500] {
            assert_eq!(table[x as usize].to_bits(), zipf_survival_exact(&m, x).to_bits(), "x = {x}");
        }
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-13);
        assert!((zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(3.0).unwrap() - 1.202_056_903_159_594_2).abs() < 1e-13);
        assert!((zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-12);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn bound_examples() {
        assert!((zipf_survival_bound(2.0, 10).unwrap() - 0.060792710185402663).abs() < 1e-15);
        assert!((zipf_survival_bound(3.0, 10).unwrap() - 0.004_159_536_862_903_537).abs() < 1e-15);
        assert!(zipf_survival_bound(0.9, 10).is_err());
        let hd = high_degree_count_bound(10_000, 100, 200, 2.0).unwrap();
        assert!((hd - 0.303_963_550_927_013_3).abs() < 1e-12);
        assert_eq!(high_degree_count_bound(10_000, 10, 1, 2.0).unwrap(), 1.0);
        assert!(high_degree_count_bound(10, 10, 1, 1.0).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ZipfModel::new(10, 1.0).is_err());
        assert!(ZipfModel::new(0, 2.0).is_err());
        assert!(ZipfModel::new(10, f64::NAN).is_err());
    }

    #[test]
    fn sampler_stays_in_range_and_follows_pmf() {
        let m = ZipfModel::new(50, 2.0).unwrap();
        let s = ZipfSampler::new(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 200_000;
        let mut ones = 0;
        for _ in 0..draws {
            let x = s.sample(&mut rng);
            assert!((1..=50).contains(&x));
            ones += (x == 1) as usize;
        }
        let p1 = 1.0 / m.harmonic(50);
        let freq = ones as f64 / draws as f64;
        assert!((freq - p1).abs() < 5.0 * (p1 * (1.0 - p1) / draws as f64).sqrt());
    }
}
