//! Metastate weights `w_j = P(G in R_j)` for the centered Gaussian `G` with
//! covariance `C(b, b') = pi(b) 1{b=b'} - pi(b) pi(b')`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stability::{check_nondegeneracy2, StabilityVector, DEFAULT_PAIR_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{ProbabilityVector, TangentVector};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const MIN_SAMPLES: u64 = 10_000;
/// Samples whose best and second-best scores are closer than this are discarded.
pub const TIE_MARGIN: f64 = 1e-14;
pub const MAX_TIE_FRACTION: f64 = 1e-3;

const BLOCK: u64 = 1 << 16;

/// Draws `G = D^{1/2} Y - pi (s . Y)` with `Y` standard normal, `D = diag(pi)`
/// and `s_b = sqrt(pi(b))`.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
    rng: ChaCha8Rng,
}

impl GaussianSampler {
    fn with_rng(pi: &ProbabilityVector, rng: ChaCha8Rng) -> Self {
        Self {
            pi: pi.as_slice().to_vec(),
            sqrt_pi: pi.as_slice().iter().map(|p| p.sqrt()).collect(),
            rng,
        }
    }

    /// Writes one sample into `out` without allocating.
    pub fn fill(&mut self, out: &mut [f64]) {
        let mut proj = 0.0;
        for (o, s) in out.iter_mut().zip(&self.sqrt_pi) {
            let y: f64 = StandardNormal.sample(&mut self.rng);
            *o = s * y;
            proj += *o;
        }
        // s . Y equals sum_b sqrt(pi_b) Y_b, which is the sum of the scaled draws
        for (o, p) in out.iter_mut().zip(&self.pi) {
            *o -= p * proj;
        }
    }
}

impl Iterator for GaussianSampler {
    type Item = TangentVector;

    fn next(&mut self) -> Option<TangentVector> {
        let mut out = vec![0.0; self.pi.len()];
        self.fill(&mut out);
        Some(TangentVector::centered(out))
    }
}

pub fn gaussian_sampler(pi: &ProbabilityVector, seed: u64) -> Result<GaussianSampler> {
    if !pi.is_strictly_positive() {
        return Err(Error::InvalidInput("disorder law must be strictly positive".into()));
    }
    Ok(GaussianSampler::with_rng(pi, ChaCha8Rng::seed_from_u64(seed)))
}

fn block_sampler(pi: &ProbabilityVector, seed: u64, block: u64) -> GaussianSampler {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    GaussianSampler::with_rng(pi, rng)
}

/// Index of the strictly largest `<x, B_j>`, or `None` on a tie within [`TIE_MARGIN`].
pub fn classify(vectors: &[StabilityVector], x: &[f64]) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    let mut arg = 0;
    for (j, v) in vectors.iter().enumerate() {
        let s = v.dot(x);
        if s > best {
            second = best;
            best = s;
            arg = j;
        } else if s > second {
            second = s;
        }
    }
    if vectors.len() > 1 && best - second < TIE_MARGIN {
        None
    } else {
        Some(arg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub counts: Vec<u64>,
    pub std_errors: Vec<f64>,
    pub samples: u64,
    /// Samples left after discarding ties.
    pub accepted: u64,
    pub ties: u64,
}

impl WeightVector {
    fn from_counts(counts: Vec<u64>, samples: u64, ties: u64) -> Self {
        let accepted: u64 = counts.iter().sum();
        let n = accepted as f64;
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let std_errors = weights.iter().map(|w| (w * (1.0 - w) / n).sqrt()).collect();
        Self {
            weights,
            counts,
            std_errors,
            samples,
            accepted,
            ties,
        }
    }

    /// A single state carries the full weight.
    pub fn certain(states: usize, index: usize) -> Self {
        let mut weights = vec![0.0; states];
        weights[index] = 1.0;
        Self {
            weights,
            counts: vec![0; states],
            std_errors: vec![0.0; states],
            samples: 0,
            accepted: 0,
            ties: 0,
        }
    }
}

/// Per-sample argmax labels (`None` for ties) for the first `samples`
/// draws of the block streams used by [`weights_mc`].
pub fn classify_samples(
    vectors: &[StabilityVector],
    pi: &ProbabilityVector,
    samples: u64,
    seed: u64,
) -> Result<Vec<Option<usize>>> {
    check_dimensions(vectors, pi)?;
    let blocks = samples.div_ceil(BLOCK);
    let labels: Vec<Vec<Option<usize>>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let len = BLOCK.min(samples - block * BLOCK);
            let mut sampler = block_sampler(pi, seed, block);
            let mut x = vec![0.0; pi.len()];
            (0..len)
                .map(|_| {
                    sampler.fill(&mut x);
                    classify(vectors, &x)
                })
                .collect()
        })
        .collect();
    Ok(labels.into_iter().flatten().collect())
}

fn check_dimensions(vectors: &[StabilityVector], pi: &ProbabilityVector) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput("no stability vectors".into()));
    }
    if vectors.iter().any(|v| v.len() != pi.len()) {
        return Err(Error::InvalidInput("stability vectors do not match the disorder alphabet".into()));
    }
    if !pi.is_strictly_positive() {
        return Err(Error::InvalidInput("disorder law must be strictly positive".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of the metastate weights.
///
/// Samples are drawn in fixed-size blocks, each from its own ChaCha stream
/// of the master seed, so the counts do not depend on the worker count.
pub fn weights_mc(vectors: &[StabilityVector], pi: &ProbabilityVector, samples: u64, seed: u64) -> Result<WeightVector> {
    check_dimensions(vectors, pi)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    check_nondegeneracy2(vectors, DEFAULT_PAIR_TOLERANCE)?;
    let k = vectors.len();
    let blocks = samples.div_ceil(BLOCK);
    let (counts, ties) = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let len = BLOCK.min(samples - block * BLOCK);
            let mut sampler = block_sampler(pi, seed, block);
            let mut x = vec![0.0; pi.len()];
            let mut counts = vec![0u64; k];
            let mut ties = 0u64;
            for _ in 0..len {
                sampler.fill(&mut x);
                match classify(vectors, &x) {
                    Some(j) => counts[j] += 1,
                    None => ties += 1,
                }
            }
            (counts, ties)
        })
        .reduce(
            || (vec![0u64; k], 0u64),
            |(mut a, ta), (b, tb)| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                (a, ta + tb)
            },
        );
    let fraction = ties as f64 / samples as f64;
    if fraction > MAX_TIE_FRACTION {
        return Err(Error::TooManyTies {
            fraction,
            limit: MAX_TIE_FRACTION,
        });
    }
    Ok(WeightVector::from_counts(counts, samples, ties))
}

/// Closed-form weights for two disorder types: the tangent space is the
/// line `g (1, -1)`, so the state with the largest `B[0] - B[1]` wins for
/// `g > 0` and the smallest for `g < 0`, each with probability 1/2.
pub fn weights_two_type(vectors: &[StabilityVector]) -> Result<Vec<f64>> {
    if vectors.is_empty() || vectors.iter().any(|v| v.len() != 2) {
        return Err(Error::InvalidInput("closed-form weights need two disorder types".into()));
    }
    check_nondegeneracy2(vectors, DEFAULT_PAIR_TOLERANCE)?;
    let slope: Vec<f64> = vectors.iter().map(|v| v[0] - v[1]).collect();
    let mut weights = vec![0.0; vectors.len()];
    if vectors.len() == 1 {
        weights[0] = 1.0;
        return Ok(weights);
    }
    let hi = (0..slope.len()).max_by(|&a, &b| slope[a].total_cmp(&slope[b])).unwrap_or(0);
    let lo = (0..slope.len()).min_by(|&a, &b| slope[a].total_cmp(&slope[b])).unwrap_or(0);
    weights[hi] += 0.5;
    weights[lo] += 0.5;
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn samples_are_tangent() {
        let pi = ProbabilityVector::from_weights(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        for g in gaussian_sampler(&pi, 7).unwrap().take(1000) {
            assert!(g.as_slice().iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn two_types_uniform_is_antisymmetric() {
        let pi = ProbabilityVector::uniform(2);
        let draws: Vec<f64> = gaussian_sampler(&pi, 3)
            .unwrap()
            .take(200_000)
            .map(|g| {
                assert_abs_diff_eq!(g[0], -g[1], epsilon = 1e-15);
                g[0]
            })
            .collect();
        let var = draws.iter().map(|x| x * x).sum::<f64>() / draws.len() as f64;
        // Var(g) = 1/4, standard error of the sample variance ~ sqrt(2/n)/4
        assert!((var - 0.25).abs() < 5.0 * (2.0f64 / 200_000.0).sqrt() * 0.25);
    }

    #[test]
    fn classify_detects_ties() {
        let vs = [TangentVector::centered(vec![1.0, -1.0]), TangentVector::centered(vec![-1.0, 1.0])];
        assert_eq!(classify(&vs, &[0.0, 0.0]), None);
        assert_eq!(classify(&vs, &[0.5, -0.5]), Some(0));
        assert_eq!(classify(&vs, &[-0.5, 0.5]), Some(1));
    }

    #[test]
    fn rejects_small_sample_counts_and_duplicates() {
        let pi = ProbabilityVector::uniform(2);
        let a = TangentVector::centered(vec![1.0, -1.0]);
        let b = TangentVector::centered(vec![-1.0, 1.0]);
        assert!(weights_mc(&[a.clone(), b], &pi, 100, 0).is_err());
        assert!(matches!(
            weights_mc(&[a.clone(), a], &pi, MIN_SAMPLES, 0),
            Err(Error::NonDegeneracy2Violation { .. })
        ));
    }

    #[test]
    fn closed_form_two_type_weights() {
        let vs = [
            TangentVector::centered(vec![0.0, 0.0]),
            TangentVector::centered(vec![0.3, -0.3]),
            TangentVector::centered(vec![-0.1, 0.1]),
        ];
        assert_eq!(weights_two_type(&vs).unwrap(), vec![0.0, 0.5, 0.5]);
    }
}
