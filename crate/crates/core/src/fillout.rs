//! The Laurent map `g(z_1, ..., z_phi(d)) = sum_k prod_j z_{j+1}^{b[k][j]}` on
//! the torus, sampling of its image, and how densely a period set covers it.
//!
//! For `q = p^a` an odd prime power and `d = ord_q(omega)` dividing `p - 1`, the
//! set `G(q, omega)` lies inside the image of `g`; as `q` grows with `d` fixed it
//! fills that image out. Coverage is measured as the fraction of image samples
//! within `epsilon` of a period point.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::PointGrid;
use crate::numtheory::{factorize, gcd, order_of_unit, reduce};
use crate::periods::PeriodSet;
use crate::poly::{exponent_matrix, ExponentMatrix};
use crate::sum::ComplexSum;
use crate::{Error, Result};

/// Seed used when random sampling is requested without one.
pub const DEFAULT_SEED: u64 = 0x6761_7573_7320_7065;

/// Largest number of grid samples `sample_image` will generate.
pub const MAX_GRID_SAMPLES: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMap {
    matrix: ExponentMatrix,
}

impl LaurentMap {
    pub fn new(d: u64) -> Result<Self> {
        Ok(Self {
            matrix: exponent_matrix(d)?,
        })
    }

    pub fn from_matrix(matrix: ExponentMatrix) -> Self {
        Self { matrix }
    }

    pub fn d(&self) -> u64 {
        self.matrix.d()
    }

    /// Number of torus variables, `phi(d)`.
    pub fn arity(&self) -> usize {
        self.matrix.phi_d()
    }

    pub fn matrix(&self) -> &ExponentMatrix {
        &self.matrix
    }

    /// `g` at `z_j = exp(i angles[j])`: `sum_k exp(i <b_k, angles>)`.
    pub fn eval(&self, angles: &[f64]) -> Result<Complex64> {
        if angles.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: angles.len(),
            });
        }
        Ok(self.eval_unchecked(angles))
    }

    fn eval_unchecked(&self, angles: &[f64]) -> Complex64 {
        let mut acc = ComplexSum::new();
        for row in self.matrix.rows() {
            let phase: f64 = row
                .iter()
                .zip(angles)
                .map(|(&b, &theta)| b as f64 * theta)
                .sum();
            let (s, c) = libm::sincos(phase);
            acc.add(Complex64::new(c, s));
        }
        acc.value()
    }
}

pub fn laurent_eval(map: &LaurentMap, angles: &[f64]) -> Result<Complex64> {
    map.eval(angles)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum SampleStrategy {
    /// `m` equispaced angles per axis, `m` the smallest integer with
    /// `m^phi(d) >= count`; yields `m^phi(d)` samples.
    Grid,
    /// `count` uniform random torus points from a seeded ChaCha8 stream.
    Random { seed: u64 },
}

/// Smallest `m` with `m^arity >= count`.
fn per_axis(count: u64, arity: usize) -> u64 {
    let guess = libm::floor(libm::pow(count as f64, 1.0 / arity as f64)) as u64;
    let mut m = guess.saturating_sub(1).max(1);
    while checked_pow(m, arity).is_some_and(|t| t < count) {
        m += 1;
    }
    m
}

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

/// Samples the image of `g` for `d`. Deterministic in all arguments.
pub fn sample_image(map: &LaurentMap, count: u64, strategy: SampleStrategy) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Err(Error::NotPositive { what: "sample count" });
    }
    let arity = map.arity();
    match strategy {
        SampleStrategy::Grid => {
            let m = per_axis(count, arity);
            let total = checked_pow(m, arity)
                .filter(|&t| t <= MAX_GRID_SAMPLES)
                .ok_or(Error::SampleBudget {
                    per_axis: m,
                    arity,
                    limit: MAX_GRID_SAMPLES,
                })?;
            let step = TAU / m as f64;
            let mut index = alloc::vec![0u64; arity];
            let mut angles = alloc::vec![0.0; arity];
            let mut out = Vec::with_capacity(total as usize);
            for _ in 0..total {
                for (a, &i) in angles.iter_mut().zip(&index) {
                    *a = i as f64 * step;
                }
                out.push(map.eval_unchecked(&angles));
                // odometer increment, last axis fastest
                for i in index.iter_mut().rev() {
                    *i += 1;
                    if *i < m {
                        break;
                    }
                    *i = 0;
                }
            }
            Ok(out)
        }
        SampleStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut angles = alloc::vec![0.0; arity];
            Ok((0..count)
                .map(|_| {
                    for a in angles.iter_mut() {
                        *a = rng.gen::<f64>() * TAU;
                    }
                    map.eval_unchecked(&angles)
                })
                .collect())
        }
    }
}

/// Whether the fill-out hypotheses hold for `(q, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Applicability {
    pub q: u64,
    pub omega: u64,
    pub d: u64,
    /// `q = p^a` with `p` an odd prime.
    pub is_prime_power: bool,
    pub p: Option<u64>,
    pub a: Option<u32>,
    pub d_divides_p_minus_1: bool,
}

impl Applicability {
    pub fn applicable(&self) -> bool {
        self.is_prime_power && self.d_divides_p_minus_1
    }
}

pub fn applicability_check(q: u64, omega: i64) -> Result<Applicability> {
    if q == 0 {
        return Err(Error::NotPositive { what: "q" });
    }
    let w = reduce(omega, q);
    if gcd(w, q) != 1 {
        return Err(Error::NotCoprime { omega, n: q });
    }
    let d = order_of_unit(w, q);
    let factors = factorize(q);
    let (is_prime_power, p, a) = match factors.as_slice() {
        [(p, a)] if *p != 2 => (true, Some(*p), Some(*a)),
        _ => (false, None, None),
    };
    Ok(Applicability {
        q,
        omega: w,
        d,
        is_prime_power,
        p,
        a,
        d_divides_p_minus_1: p.is_some_and(|p| (p - 1) % d == 0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageReport {
    pub epsilon: f64,
    /// Share of image samples within `epsilon` of some period point.
    pub fraction_covered: f64,
    /// Largest distance from a period point to its nearest image sample.
    pub max_point_distance: f64,
    pub sample_count: u64,
    pub strategy: SampleStrategy,
}

/// Coverage of the image of `map` by `set`, sampled with the grid strategy.
pub fn coverage(set: &PeriodSet, map: &LaurentMap, epsilon: f64, sample_count: u64) -> Result<CoverageReport> {
    let samples = sample_image(map, sample_count, SampleStrategy::Grid)?;
    Ok(coverage_of_samples(
        &set.values().collect::<Vec<_>>(),
        &samples,
        epsilon,
        SampleStrategy::Grid,
    ))
}

/// Coverage against explicit samples. `samples` must be non-empty.
pub fn coverage_of_samples(
    points: &[Complex64],
    samples: &[Complex64],
    epsilon: f64,
    strategy: SampleStrategy,
) -> CoverageReport {
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(!samples.is_empty(), "need at least one sample");
    let point_grid = PointGrid::new(points.to_vec(), epsilon);
    let covered = samples
        .iter()
        .filter(|&&s| point_grid.any_within(s, epsilon))
        .count();

    let extent = samples
        .iter()
        .fold(1.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    let cell = 4.0 * extent / libm::sqrt(samples.len() as f64);
    let sample_grid = PointGrid::new(samples.to_vec(), cell);
    let max_point_distance = points
        .iter()
        .filter_map(|&p| sample_grid.nearest(p).map(|(_, d)| d))
        .fold(0.0f64, f64::max);

    CoverageReport {
        epsilon,
        fraction_covered: covered as f64 / samples.len() as f64,
        max_point_distance,
        sample_count: samples.len() as u64,
        strategy,
    }
}
