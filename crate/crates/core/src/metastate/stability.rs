//! Stability vectors: the negative linearization of `Phi` in the disorder law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::Profile;
use crate::model::{kernel_from_gradient, relative_entropy_unchecked, ModelSpec, ProbabilityVector, TangentVector};

/// Stability vectors live in the tangent space `T P(E')`.
pub type StabilityVector = TangentVector;

/// Default sup-distance below which two stability vectors count as equal.
pub const DEFAULT_PAIR_TOLERANCE: f64 = 1e-8;

/// `B[b] = -( dF_{pi nu_hat}(nu_hat(b)) + S(nu_hat(b) | alpha[b]) )`, centered over `b`.
pub fn stability_vector_direct(model: &ModelSpec, profile: &Profile) -> Result<StabilityVector> {
    if profile.disorder_count() != model.disorder_count() || profile.spin_count() != model.spin_count() {
        return Err(Error::InvalidInput("profile does not match the model".into()));
    }
    let nu = profile.total(model.disorder());
    let df = model.interaction().gradient(nu.as_slice());
    let raw = profile
        .components()
        .iter()
        .enumerate()
        .map(|(b, comp)| {
            let energy: f64 = comp.as_slice().iter().zip(&df).map(|(p, d)| p * d).sum();
            -(energy + relative_entropy_unchecked(comp.as_slice(), model.kernel(b).as_slice()))
        })
        .collect();
    Ok(TangentVector::centered(raw))
}

/// `log Z_b(nu) = log sum_a e^{-dF_nu(a)} alpha[b](a)` for every disorder symbol.
pub fn log_partition_functions(model: &ModelSpec, nu: &ProbabilityVector) -> Result<Vec<f64>> {
    if nu.len() != model.spin_count() {
        return Err(Error::InvalidInput("measure does not match the spin alphabet".into()));
    }
    let df = model.interaction().gradient(nu.as_slice());
    let mut scratch = vec![0.0; nu.len()];
    Ok((0..model.disorder_count())
        .map(|b| kernel_from_gradient(model.log_kernel(b), &df, &mut scratch))
        .collect())
}

/// `B_hat_nu[b] = log Z_b(nu) - C` with `C` the mean of `log Z_b` over `b`.
pub fn stability_vector_partition(model: &ModelSpec, nu: &ProbabilityVector) -> Result<StabilityVector> {
    Ok(TangentVector::centered(log_partition_functions(model, nu)?))
}

/// The free energy at `Gamma_hat(nu)` written through the little partition
/// functions: `F(nu) - <dF_nu, nu> - <B_hat_nu, pi> - C`. Agrees with
/// `phi(model, pi, Gamma_hat(nu))` whenever `nu` solves the total mean-field
/// equation.
pub fn phi_via_partition(model: &ModelSpec, nu: &ProbabilityVector) -> Result<f64> {
    let log_z = log_partition_functions(model, nu)?;
    let c = log_z.iter().sum::<f64>() / log_z.len() as f64;
    let b_hat = TangentVector::centered(log_z);
    let f = model.interaction();
    let df = f.gradient(nu.as_slice());
    let inner: f64 = df.iter().zip(nu.as_slice()).map(|(d, n)| d * n).sum();
    Ok(f.value(nu.as_slice()) - inner - b_hat.dot(model.disorder().as_slice()) - c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonDegeneracy2 {
    /// Least pairwise sup-distance; `None` with fewer than two vectors.
    pub min_distance: Option<f64>,
    pub closest_pair: Option<(usize, usize)>,
}

/// Passes iff all stability vectors are pairwise more than `pair_tolerance` apart.
pub fn check_nondegeneracy2(vectors: &[StabilityVector], pair_tolerance: f64) -> Result<NonDegeneracy2> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput("no stability vectors".into()));
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let d = vectors[i].sup_distance(&vectors[j]);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, i, j));
            }
        }
    }
    if let Some((distance, first, second)) = best {
        if distance <= pair_tolerance {
            return Err(Error::NonDegeneracy2Violation {
                first,
                second,
                distance,
                tolerance: pair_tolerance,
            });
        }
    }
    Ok(NonDegeneracy2 {
        min_distance: best.map(|b| b.0),
        closest_pair: best.map(|b| (b.1, b.2)),
    })
}
