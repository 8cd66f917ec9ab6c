//! Alphabets, simplex points, the model triple `(F, alpha, pi)` and the
//! local mean-field kernels.
//!
//! Spin symbols and disorder symbols are plain indices `0..|E|` and
//! `0..|E'|`; every vector uses that fixed order. For the Ising builders
//! index 0 is the `+` spin and index 1 the `-` spin.

use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum == 1` for simplex points and `sum == 0` for tangent vectors.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// A point of the probability simplex over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::OffSimplex("empty vector".into()));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::OffSimplex(format!("entry {x} is negative or not finite")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::OffSimplex(format!("entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    /// Normalizes nonnegative weights with a positive total.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(format!("weights must be finite and nonnegative: {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(Error::InvalidInput("weights must have a positive total".into()));
        }
        Ok(Self(weights.iter().map(|w| w / total).collect()))
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform distribution over an empty alphabet");
        Self(vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len);
        let mut v = vec![0.0; len];
        v[at] = 1.0;
        Self(v)
    }

    /// Wraps entries produced by a normalizing computation (softmax, convex
    /// combination) without re-validating them.
    pub(crate) fn from_normalized(entries: Vec<f64>) -> Self {
        debug_assert!((entries.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|x| *x > 0.0)
    }

    /// Total-variation distance `1/2 sum |p - q|`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A vector in the tangent space of the simplex (entries sum to zero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum: f64 = entries.iter().sum();
        if entries.iter().any(|x| !x.is_finite()) || sum.abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidInput(format!("tangent vector entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    /// Projects arbitrary entries onto the tangent space by subtracting their mean.
    pub fn centered(mut entries: Vec<f64>) -> Self {
        let mean = entries.iter().sum::<f64>() / entries.len() as f64;
        for x in &mut entries {
            *x -= mean;
        }
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Index<usize> for TangentVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// The mean-field interaction `F` on `P(E)`.
///
/// Implementations are evaluated on full-length vectors and must extend
/// smoothly to a neighbourhood of the simplex, so that finite differences
/// in ambient coordinates make sense. The gradient is only meaningful up to
/// an additive constant; every consumer in this crate is shift invariant.
pub trait InteractionFunctional: Send + Sync + fmt::Debug {
    /// `|E|`.
    fn dimension(&self) -> usize;
    /// Energy per site `F(nu)`.
    fn value(&self, nu: &[f64]) -> f64;
    /// The differential `dF_nu(a)` as a function on `E`.
    fn gradient(&self, nu: &[f64]) -> Vec<f64>;
    /// Second derivatives in ambient coordinates.
    fn hessian(&self, nu: &[f64]) -> DMatrix<f64>;
}

/// `F == 0`: independent spins.
#[derive(Clone, Copy, Debug)]
pub struct ZeroInteraction {
    pub dimension: usize,
}

impl InteractionFunctional for ZeroInteraction {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn value(&self, _nu: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _nu: &[f64]) -> Vec<f64> {
        vec![0.0; self.dimension]
    }
    fn hessian(&self, _nu: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.dimension, self.dimension)
    }
}

/// `F(nu) = -beta (nu(+)^2 + nu(-)^2)`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticIsing {
    pub beta: f64,
}

impl InteractionFunctional for QuadraticIsing {
    fn dimension(&self) -> usize {
        2
    }
    fn value(&self, nu: &[f64]) -> f64 {
        -self.beta * (nu[0] * nu[0] + nu[1] * nu[1])
    }
    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        vec![-2.0 * self.beta * nu[0], -2.0 * self.beta * nu[1]]
    }
    fn hessian(&self, _nu: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal_element(2, 2, -2.0 * self.beta)
    }
}

/// `F(nu) = -(beta/2) sum_a nu(a)^2` on `q` spin states.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticPotts {
    pub q: usize,
    pub beta: f64,
}

impl InteractionFunctional for QuadraticPotts {
    fn dimension(&self) -> usize {
        self.q
    }
    fn value(&self, nu: &[f64]) -> f64 {
        -0.5 * self.beta * nu.iter().map(|x| x * x).sum::<f64>()
    }
    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        nu.iter().map(|x| -self.beta * x).collect()
    }
    fn hessian(&self, _nu: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal_element(self.q, self.q, -self.beta)
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `F(nu) = G(nu(+) - nu(-))` for a twice differentiable `G` on `[-1, 1]`.
#[derive(Clone)]
pub struct GeneralIsing {
    g: ScalarFn,
    g_prime: ScalarFn,
    g_second: ScalarFn,
}

impl fmt::Debug for GeneralIsing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralIsing").finish_non_exhaustive()
    }
}

impl GeneralIsing {
    pub fn new(
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            g_second: Arc::new(g_second),
        }
    }

    /// `G(m) = sum_k coeffs[k] m^k`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c: Vec<f64> = coeffs.to_vec();
        let d1: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let d2: Vec<f64> = d1.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        let eval = |coeffs: Vec<f64>| move |m: f64| coeffs.iter().rev().fold(0.0, |acc, a| acc * m + a);
        Self::new(eval(c), eval(d1), eval(d2))
    }

    /// `G(m) = -beta m^2 / 2`, the quadratic Ising model up to a constant.
    pub fn quadratic(beta: f64) -> Self {
        Self::polynomial(&[0.0, 0.0, -0.5 * beta])
    }

    pub fn g(&self, m: f64) -> f64 {
        (self.g)(m)
    }

    pub fn g_prime(&self, m: f64) -> f64 {
        (self.g_prime)(m)
    }
}

impl InteractionFunctional for GeneralIsing {
    fn dimension(&self) -> usize {
        2
    }
    fn value(&self, nu: &[f64]) -> f64 {
        (self.g)(nu[0] - nu[1])
    }
    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        let d = (self.g_prime)(nu[0] - nu[1]);
        vec![d, -d]
    }
    fn hessian(&self, nu: &[f64]) -> DMatrix<f64> {
        let h = (self.g_second)(nu[0] - nu[1]);
        DMatrix::from_row_slice(2, 2, &[h, -h, -h, h])
    }
}

pub fn make_quadratic_ising(beta: f64) -> Result<QuadraticIsing> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    Ok(QuadraticIsing { beta })
}

pub fn make_quadratic_potts(q: usize, beta: f64) -> Result<QuadraticPotts> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("Potts model needs q >= 2, got {q}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    Ok(QuadraticPotts { q, beta })
}

pub fn make_general_ising(
    g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    g_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    g_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> GeneralIsing {
    GeneralIsing::new(g, g_prime, g_second)
}

/// Single-site Ising measures `alpha[h](s) = e^{h s} / (2 cosh h)`, one per field.
pub fn make_ising_field_kernels(fields: &[f64]) -> Result<Vec<ProbabilityVector>> {
    fields
        .iter()
        .map(|&h| {
            if !h.is_finite() {
                return Err(Error::InvalidInput(format!("field {h} is not finite")));
            }
            // logistic form avoids overflow of cosh for large |h|
            let plus = 1.0 / (1.0 + (-2.0 * h).exp());
            let minus = 1.0 / (1.0 + (2.0 * h).exp());
            Ok(ProbabilityVector::from_normalized(vec![plus, minus]))
        })
        .collect()
}

/// Homogeneous Potts random field: `alpha[b](a) = e^{B 1{a=b}} / (e^B + q - 1)`.
pub fn make_potts_field_kernels(q: usize, field: f64) -> Result<Vec<ProbabilityVector>> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("Potts model needs q >= 2, got {q}")));
    }
    if !field.is_finite() {
        return Err(Error::InvalidInput(format!("field {field} is not finite")));
    }
    let boost = field.exp();
    let z = boost + (q - 1) as f64;
    Ok((0..q)
        .map(|b| {
            let v = (0..q).map(|a| if a == b { boost / z } else { 1.0 / z }).collect();
            ProbabilityVector::from_normalized(v)
        })
        .collect())
}

/// The triple `(F, alpha, pi)`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    interaction: Arc<dyn InteractionFunctional>,
    kernels: Vec<ProbabilityVector>,
    log_kernels: Vec<Vec<f64>>,
    disorder: ProbabilityVector,
}

impl ModelSpec {
    pub fn new(
        interaction: Arc<dyn InteractionFunctional>,
        kernels: Vec<ProbabilityVector>,
        disorder: ProbabilityVector,
    ) -> Result<Self> {
        let spins = interaction.dimension();
        if spins < 2 {
            return Err(Error::InvalidInput("spin alphabet needs at least two symbols".into()));
        }
        if kernels.len() != disorder.len() {
            return Err(Error::InvalidInput(format!(
                "{} a-priori kernels for {} disorder symbols",
                kernels.len(),
                disorder.len()
            )));
        }
        if !disorder.is_strictly_positive() {
            return Err(Error::InvalidInput("disorder law must give positive mass to every symbol".into()));
        }
        for (b, k) in kernels.iter().enumerate() {
            if k.len() != spins {
                return Err(Error::InvalidInput(format!(
                    "kernel {b} has {} entries, spin alphabet has {spins}",
                    k.len()
                )));
            }
            if !k.is_strictly_positive() {
                return Err(Error::InvalidInput(format!("kernel {b} has a zero entry")));
            }
        }
        let log_kernels = kernels.iter().map(|k| k.as_slice().iter().map(|x| x.ln()).collect()).collect();
        Ok(Self {
            interaction,
            kernels,
            log_kernels,
            disorder,
        })
    }

    pub fn interaction(&self) -> &dyn InteractionFunctional {
        self.interaction.as_ref()
    }

    pub fn kernels(&self) -> &[ProbabilityVector] {
        &self.kernels
    }

    pub fn kernel(&self, b: usize) -> &ProbabilityVector {
        &self.kernels[b]
    }

    pub(crate) fn log_kernel(&self, b: usize) -> &[f64] {
        &self.log_kernels[b]
    }

    pub fn disorder(&self) -> &ProbabilityVector {
        &self.disorder
    }

    /// `|E|`.
    pub fn spin_count(&self) -> usize {
        self.interaction.dimension()
    }

    /// `|E'|`.
    pub fn disorder_count(&self) -> usize {
        self.disorder.len()
    }

    /// Same `F` and `alpha` with a different disorder law.
    pub fn with_disorder(&self, disorder: ProbabilityVector) -> Result<Self> {
        Self::new(self.interaction.clone(), self.kernels.clone(), disorder)
    }

    /// Relabels spins: new symbol `i` is old symbol `perm[i]`. The
    /// interaction is wrapped so that `F` sees the original order.
    pub fn permute_spins(&self, perm: &[usize]) -> Result<Self> {
        let n = self.spin_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let kernels = self
            .kernels
            .iter()
            .map(|k| ProbabilityVector::from_normalized(perm.iter().map(|&p| k[p]).collect()))
            .collect();
        let interaction = Arc::new(PermutedInteraction {
            inner: self.interaction.clone(),
            perm: perm.to_vec(),
        });
        Self::new(interaction, kernels, self.disorder.clone())
    }
}

#[derive(Debug)]
struct PermutedInteraction {
    inner: Arc<dyn InteractionFunctional>,
    perm: Vec<usize>,
}

impl PermutedInteraction {
    fn to_inner(&self, nu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; nu.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = nu[i];
        }
        out
    }
}

impl InteractionFunctional for PermutedInteraction {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn value(&self, nu: &[f64]) -> f64 {
        self.inner.value(&self.to_inner(nu))
    }
    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        let g = self.inner.gradient(&self.to_inner(nu));
        self.perm.iter().map(|&p| g[p]).collect()
    }
    fn hessian(&self, nu: &[f64]) -> DMatrix<f64> {
        let h = self.inner.hessian(&self.to_inner(nu));
        DMatrix::from_fn(nu.len(), nu.len(), |i, j| h[(self.perm[i], self.perm[j])])
    }
}

/// `log sum_a exp(x_a)` without overflow.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// The local kernel for a given differential `dF_nu`, written into `out`.
/// Returns the log little partition function `log sum_a e^{-dF(a)} alpha[b](a)`.
pub(crate) fn kernel_from_gradient(log_alpha: &[f64], grad: &[f64], out: &mut [f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for (o, (la, g)) in out.iter_mut().zip(log_alpha.iter().zip(grad)) {
        *o = la - g;
        max = max.max(*o);
    }
    let mut total = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    max + total.ln()
}

/// `gamma[b](a | nu) = e^{-dF_nu(a)} alpha[b](a) / Z_b(nu)`.
pub fn gamma_kernel(model: &ModelSpec, b: usize, nu: &ProbabilityVector) -> Result<ProbabilityVector> {
    if b >= model.disorder_count() {
        return Err(Error::InvalidInput(format!("disorder symbol {b} out of range")));
    }
    if nu.len() != model.spin_count() {
        return Err(Error::InvalidInput(format!(
            "measure has {} entries, spin alphabet has {}",
            nu.len(),
            model.spin_count()
        )));
    }
    let grad = model.interaction().gradient(nu.as_slice());
    let mut out = vec![0.0; nu.len()];
    kernel_from_gradient(model.log_kernel(b), &grad, &mut out);
    Ok(ProbabilityVector::from_normalized(out))
}

/// Relative entropy `S(p | q) = sum_a p(a) log(p(a) / q(a))` with `0 log 0 = 0`.
pub fn relative_entropy(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidInput("relative entropy of vectors of different length".into()));
    }
    if !q.is_strictly_positive() {
        return Err(Error::InvalidInput("reference measure has a zero entry".into()));
    }
    Ok(relative_entropy_unchecked(p.as_slice(), q.as_slice()))
}

pub(crate) fn relative_entropy_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p.iter().zip(q).filter(|(pa, _)| **pa > 0.0).map(|(pa, qa)| pa * (pa / qa).ln()).sum();
    // rounding can push S(p|p) a hair below zero
    s.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn probability_vector_rejects_bad_entries() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbabilityVector::from_weights(&[0.0, 0.0]).is_err());
        assert_eq!(ProbabilityVector::from_weights(&[1.0, 3.0]).unwrap().as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn tangent_vector_invariant() {
        assert!(TangentVector::new(vec![1.0, -0.5]).is_err());
        let t = TangentVector::centered(vec![3.0, 1.0, 2.0]);
        assert_abs_diff_eq!(t.as_slice().iter().sum::<f64>(), 0.0, epsilon = 1e-15);
        assert_eq!(t.as_slice(), &[1.0, -1.0, 0.0]);
    }

    #[test]
    fn quadratic_ising_values() {
        let f = make_quadratic_ising(1.0).unwrap();
        assert_abs_diff_eq!(f.value(&[0.5, 0.5]), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.value(&[1.0, 0.0]), -1.0, epsilon = 1e-15);
        let g = make_quadratic_ising(2.0).unwrap().gradient(&[0.7, 0.3]);
        assert_abs_diff_eq!(g[0], -2.8, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1], -1.2, epsilon = 1e-14);
        assert!(make_quadratic_ising(0.0).is_err());
        assert!(make_quadratic_ising(-1.0).is_err());
    }

    #[test]
    fn quadratic_potts_values() {
        let f = make_quadratic_potts(3, 3.0).unwrap();
        assert_abs_diff_eq!(f.value(&[1.0 / 3.0; 3]), -0.5, epsilon = 1e-15);
        let g = make_quadratic_potts(3, 1.0).unwrap().gradient(&[0.5, 0.3, 0.2]);
        assert_eq!(g, vec![-0.5, -0.3, -0.2]);
        let potts = make_quadratic_potts(2, 2.0).unwrap();
        let ising = make_quadratic_ising(1.0).unwrap();
        for x in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
            let nu = [x, 1.0 - x];
            assert_abs_diff_eq!(potts.value(&nu), ising.value(&nu), epsilon = 1e-15);
        }
        assert!(make_quadratic_potts(1, 1.0).is_err());
        assert!(make_quadratic_potts(3, 0.0).is_err());
    }

    #[test]
    fn ising_field_kernels() {
        let k = make_ising_field_kernels(&[0.0, 3f64.ln() / 2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(k[0][0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k[1][0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(k[1][1], 0.25, epsilon = 1e-15);
        let e = 1f64.exp();
        assert_abs_diff_eq!(k[2][0], e / (e + 1.0 / e), epsilon = 1e-15);
        assert_abs_diff_eq!(k[2][0], 0.880797077977882, epsilon = 1e-12);
        // extreme fields stay finite and normalized
        let k = make_ising_field_kernels(&[800.0]).unwrap();
        assert_eq!(k[0].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn potts_field_kernels() {
        let k = make_potts_field_kernels(3, 0.0).unwrap();
        for row in &k {
            for a in 0..3 {
                assert_abs_diff_eq!(row[a], 1.0 / 3.0, epsilon = 1e-15);
            }
        }
        let k = make_potts_field_kernels(3, 2f64.ln()).unwrap();
        for (b, row) in k.iter().enumerate() {
            for a in 0..3 {
                let want = if a == b { 0.5 } else { 0.25 };
                assert_abs_diff_eq!(row[a], want, epsilon = 1e-15);
            }
        }
        let k = make_potts_field_kernels(3, 0.3).unwrap();
        let e = 0.3f64.exp();
        assert_abs_diff_eq!(k[1][1], e / (e + 2.0), epsilon = 1e-15);
    }

    #[test]
    fn gamma_kernel_special_cases() {
        let model = ModelSpec::new(
            Arc::new(ZeroInteraction { dimension: 2 }),
            make_ising_field_kernels(&[0.4]).unwrap(),
            ProbabilityVector::uniform(1),
        )
        .unwrap();
        let g = gamma_kernel(&model, 0, &pv(&[0.2, 0.8])).unwrap();
        assert_abs_diff_eq!(g[0], model.kernel(0)[0], epsilon = 1e-15);

        // quadratic Ising: gamma(+) - gamma(-) = tanh(beta m + h)
        let (beta, h) = (1.3, -0.7);
        let model = ModelSpec::new(
            Arc::new(make_quadratic_ising(beta).unwrap()),
            make_ising_field_kernels(&[h]).unwrap(),
            ProbabilityVector::uniform(1),
        )
        .unwrap();
        for m in [-0.9, -0.2, 0.0, 0.45, 0.99] {
            let nu = pv(&[(1.0 + m) / 2.0, (1.0 - m) / 2.0]);
            let g = gamma_kernel(&model, 0, &nu).unwrap();
            assert_abs_diff_eq!(g[0] - g[1], (beta * m + h).tanh(), epsilon = 1e-14);
        }

        // Potts q=3, beta=2, B=0.3 at the uniform measure
        let model = ModelSpec::new(
            Arc::new(make_quadratic_potts(3, 2.0).unwrap()),
            make_potts_field_kernels(3, 0.3).unwrap(),
            ProbabilityVector::uniform(3),
        )
        .unwrap();
        let g = gamma_kernel(&model, 2, &ProbabilityVector::uniform(3)).unwrap();
        let x = (2.0 / 3.0 + 0.3f64).exp();
        let y = (2.0f64 / 3.0).exp();
        assert_abs_diff_eq!(g[2], x / (x + 2.0 * y), epsilon = 1e-15);
        assert_abs_diff_eq!(g[2], 0.3f64.exp() / (0.3f64.exp() + 2.0), epsilon = 1e-15);
        assert!(gamma_kernel(&model, 3, &ProbabilityVector::uniform(3)).is_err());
        assert!(gamma_kernel(&model, 0, &ProbabilityVector::uniform(2)).is_err());
    }

    #[test]
    fn relative_entropy_values() {
        let p = pv(&[0.2, 0.5, 0.3]);
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let half = ProbabilityVector::uniform(2);
        assert_abs_diff_eq!(
            relative_entropy(&pv(&[1.0, 0.0]), &half).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
        let want = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert_abs_diff_eq!(relative_entropy(&pv(&[0.75, 0.25]), &half).unwrap(), want, epsilon = 1e-15);
        assert!(relative_entropy(&half, &pv(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn model_spec_validation() {
        let f: Arc<dyn InteractionFunctional> = Arc::new(make_quadratic_ising(1.0).unwrap());
        let k = make_ising_field_kernels(&[0.1, -0.1]).unwrap();
        assert!(ModelSpec::new(f.clone(), k.clone(), ProbabilityVector::uniform(3)).is_err());
        assert!(ModelSpec::new(f.clone(), k.clone(), pv(&[1.0, 0.0])).is_err());
        let zero_kernel = vec![pv(&[1.0, 0.0]), pv(&[0.5, 0.5])];
        assert!(ModelSpec::new(f.clone(), zero_kernel, ProbabilityVector::uniform(2)).is_err());
        let potts_kernels = make_potts_field_kernels(3, 0.1).unwrap();
        assert!(ModelSpec::new(f, potts_kernels, ProbabilityVector::uniform(3)).is_err());
    }

    #[test]
    fn polynomial_general_ising() {
        let g = GeneralIsing::polynomial(&[1.0, -2.0, 0.5, 0.25]);
        let m = 0.3f64;
        assert_abs_diff_eq!(g.g(m), 1.0 - 2.0 * m + 0.5 * m * m + 0.25 * m.powi(3), epsilon = 1e-15);
        assert_abs_diff_eq!(g.g_prime(m), -2.0 + m + 0.75 * m * m, epsilon = 1e-15);
        let h = g.hessian(&[0.65, 0.35]);
        assert_abs_diff_eq!(h[(0, 0)], 1.0 + 1.5 * m, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 1)], -(1.0 + 1.5 * m), epsilon = 1e-15);
    }
}
