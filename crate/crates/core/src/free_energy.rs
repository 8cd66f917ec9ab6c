//! The quenched free energy `Phi[pi](nu_hat)`, the coupled mean-field
//! equations, and the multi-start search for the minimizer set `M*`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{kernel_from_gradient, relative_entropy_unchecked, ModelSpec, ProbabilityVector};

/// One spin distribution per disorder type, `nu_hat in P(E)^{E'}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    components: Vec<ProbabilityVector>,
}

impl Profile {
    pub fn new(components: Vec<ProbabilityVector>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidInput("profile needs at least one component".into()));
        };
        if components.iter().any(|c| c.len() != first.len()) {
            return Err(Error::InvalidInput("profile components have different lengths".into()));
        }
        Ok(Self { components })
    }

    /// The same spin distribution on every disorder type.
    pub fn constant(nu: &ProbabilityVector, types: usize) -> Self {
        Self {
            components: vec![nu.clone(); types],
        }
    }

    pub(crate) fn from_flat(flat: &[f64], spins: usize) -> Self {
        Self {
            components: flat
                .chunks(spins)
                .map(|c| ProbabilityVector::from_normalized(c.to_vec()))
                .collect(),
        }
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.components.iter().flat_map(|c| c.as_slice().iter().copied()).collect()
    }

    pub fn components(&self) -> &[ProbabilityVector] {
        &self.components
    }

    pub fn component(&self, b: usize) -> &ProbabilityVector {
        &self.components[b]
    }

    pub fn disorder_count(&self) -> usize {
        self.components.len()
    }

    pub fn spin_count(&self) -> usize {
        self.components[0].len()
    }

    /// The total measure `sum_b pi(b) nu_hat(b)`.
    pub fn total(&self, pi: &ProbabilityVector) -> ProbabilityVector {
        ProbabilityVector::from_normalized(total_flat(&self.to_flat(), pi.as_slice(), self.spin_count()))
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sup_distance(b))
            .fold(0.0, f64::max)
    }

    fn check_against(&self, model: &ModelSpec) -> Result<()> {
        if self.disorder_count() != model.disorder_count() || self.spin_count() != model.spin_count() {
            return Err(Error::InvalidInput(format!(
                "profile shape {}x{} does not match model {}x{}",
                self.disorder_count(),
                self.spin_count(),
                model.disorder_count(),
                model.spin_count()
            )));
        }
        Ok(())
    }
}

fn total_flat(flat: &[f64], pi: &[f64], spins: usize) -> Vec<f64> {
    let mut nu = vec![0.0; spins];
    for (block, p) in flat.chunks(spins).zip(pi) {
        for (n, x) in nu.iter_mut().zip(block) {
            *n += p * x;
        }
    }
    nu
}

fn check_pi(model: &ModelSpec, pi_hat: &ProbabilityVector) -> Result<()> {
    if pi_hat.len() != model.disorder_count() {
        return Err(Error::InvalidInput(format!(
            "disorder law has {} entries, model has {} disorder symbols",
            pi_hat.len(),
            model.disorder_count()
        )));
    }
    Ok(())
}

/// `Phi[pi_hat](nu_hat) = F(pi_hat . nu_hat) + sum_b pi_hat(b) S(nu_hat(b) | alpha[b])`.
pub fn phi(model: &ModelSpec, pi_hat: &ProbabilityVector, profile: &Profile) -> Result<f64> {
    check_pi(model, pi_hat)?;
    profile.check_against(model)?;
    Ok(phi_flat(model, pi_hat.as_slice(), &profile.to_flat()))
}

pub(crate) fn phi_flat(model: &ModelSpec, pi: &[f64], flat: &[f64]) -> f64 {
    let spins = model.spin_count();
    let nu = total_flat(flat, pi, spins);
    let entropy: f64 = flat
        .chunks(spins)
        .enumerate()
        .filter(|(b, _)| pi[*b] > 0.0)
        .map(|(b, block)| pi[b] * relative_entropy_unchecked(block, model.kernel(b).as_slice()))
        .sum();
    model.interaction().value(&nu) + entropy
}

/// Gradient of `Phi` in reduced coordinates: per block, the first `|E|-1`
/// entries with the last one eliminated.
pub fn phi_gradient(model: &ModelSpec, pi_hat: &ProbabilityVector, profile: &Profile) -> Result<DVector<f64>> {
    check_pi(model, pi_hat)?;
    profile.check_against(model)?;
    Ok(gradient_flat(model, pi_hat.as_slice(), &profile.to_flat()))
}

fn gradient_flat(model: &ModelSpec, pi: &[f64], flat: &[f64]) -> DVector<f64> {
    let spins = model.spin_count();
    let last = spins - 1;
    let nu = total_flat(flat, pi, spins);
    let df = model.interaction().gradient(&nu);
    let mut g = DVector::zeros(model.disorder_count() * last);
    for (b, block) in flat.chunks(spins).enumerate() {
        let log_alpha = model.log_kernel(b);
        let tail = block[last].ln() - log_alpha[last];
        for a in 0..last {
            let entropic = block[a].ln() - log_alpha[a] - tail;
            g[b * last + a] = pi[b] * (df[a] - df[last] + entropic);
        }
    }
    g
}

/// Hessian of `Phi` in the same reduced coordinates as [`phi_gradient`].
/// The profile must lie in the open simplex.
pub fn phi_hessian(model: &ModelSpec, pi_hat: &ProbabilityVector, profile: &Profile) -> Result<DMatrix<f64>> {
    check_pi(model, pi_hat)?;
    profile.check_against(model)?;
    if profile.components().iter().any(|c| !c.is_strictly_positive()) {
        return Err(Error::InvalidInput("Hessian needs a strictly interior profile".into()));
    }
    Ok(hessian_flat(model, pi_hat.as_slice(), &profile.to_flat()))
}

fn hessian_flat(model: &ModelSpec, pi: &[f64], flat: &[f64]) -> DMatrix<f64> {
    let spins = model.spin_count();
    let last = spins - 1;
    let types = model.disorder_count();
    let nu = total_flat(flat, pi, spins);
    let hf = model.interaction().hessian(&nu);
    let reduced_f = DMatrix::from_fn(last, last, |a, c| hf[(a, c)] - hf[(a, last)] - hf[(last, c)] + hf[(last, last)]);
    let dim = types * last;
    let mut h = DMatrix::zeros(dim, dim);
    for b in 0..types {
        for c in 0..types {
            let w = pi[b] * pi[c];
            for a in 0..last {
                for d in 0..last {
                    h[(b * last + a, c * last + d)] = w * reduced_f[(a, d)];
                }
            }
        }
        let block = &flat[b * spins..(b + 1) * spins];
        for a in 0..last {
            for d in 0..last {
                let diag = if a == d { 1.0 / block[a] } else { 0.0 };
                h[(b * last + a, b * last + d)] += pi[b] * (diag + 1.0 / block[last]);
            }
        }
    }
    h
}

/// `Gamma_hat(nu) = (gamma[b](. | nu))_b`.
pub fn mean_field_map(model: &ModelSpec, nu: &ProbabilityVector) -> Result<Profile> {
    if nu.len() != model.spin_count() {
        return Err(Error::InvalidInput("measure does not match the spin alphabet".into()));
    }
    Ok(Profile::from_flat(&mean_field_flat(model, nu.as_slice()), model.spin_count()))
}

fn mean_field_flat(model: &ModelSpec, nu: &[f64]) -> Vec<f64> {
    let spins = model.spin_count();
    let df = model.interaction().gradient(nu);
    let mut out = vec![0.0; spins * model.disorder_count()];
    for (b, block) in out.chunks_mut(spins).enumerate() {
        kernel_from_gradient(model.log_kernel(b), &df, block);
    }
    out
}

/// Sup-norm of `nu - sum_b pi(b) gamma[b](. | nu)`.
pub fn total_mean_field_residual(model: &ModelSpec, nu: &ProbabilityVector) -> Result<f64> {
    let image = mean_field_map(model, nu)?.total(model.disorder());
    Ok(nu.sup_distance(&image))
}

/// Sup-norm of `nu_hat - Gamma_hat(pi . nu_hat)`.
pub fn fixed_point_residual(model: &ModelSpec, profile: &Profile) -> Result<f64> {
    profile.check_against(model)?;
    Ok(residual_flat(model, &profile.to_flat()))
}

fn residual_flat(model: &ModelSpec, flat: &[f64]) -> f64 {
    let nu = total_flat(flat, model.disorder().as_slice(), model.spin_count());
    let image = mean_field_flat(model, &nu);
    flat.iter().zip(&image).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// The Potts free energy along `nu_{j,u}` for the homogeneous random field
/// with uniform disorder law, up to a `u`-independent constant. Vanishes at
/// `u = 0`.
pub fn phi_reduced_potts(q: usize, beta: f64, field: f64, u: f64) -> f64 {
    let qf = q as f64;
    let bu = beta * u;
    let eb = field.exp();
    let shared = bu.exp() + eb + qf - 2.0;
    let ratio = ((bu + field).exp() + qf - 1.0) / shared;
    ((eb + qf - 1.0) / shared).ln() + beta * (qf - 1.0) / (2.0 * qf) * u * u + bu / qf - ratio.ln() / qf
}

/// The spin distribution `nu_{j,u}`: mass `(1 + u(q-1))/q` on `j`, `(1-u)/q` elsewhere.
pub fn potts_order_measure(q: usize, j: usize, u: f64) -> ProbabilityVector {
    let qf = q as f64;
    let v = (0..q)
        .map(|a| if a == j { (1.0 + u * (qf - 1.0)) / qf } else { (1.0 - u) / qf })
        .collect();
    ProbabilityVector::from_normalized(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Dirichlet-uniform random starts on top of the deterministic grid.
    pub random_starts: usize,
    pub damping: f64,
    pub max_iterations: usize,
    pub newton_steps: usize,
    /// Required sup-norm fixed-point residual.
    pub residual_tolerance: f64,
    pub dedup_tolerance: f64,
    pub global_gap_tolerance: f64,
    pub eigenvalue_threshold: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            random_starts: 64,
            damping: 0.5,
            max_iterations: 10_000,
            newton_steps: 50,
            residual_tolerance: 1e-10,
            dedup_tolerance: 1e-6,
            global_gap_tolerance: 1e-8,
            eigenvalue_threshold: 1e-8,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        for (name, v) in [
            ("residual_tolerance", self.residual_tolerance),
            ("dedup_tolerance", self.dedup_tolerance),
            ("global_gap_tolerance", self.global_gap_tolerance),
            ("eigenvalue_threshold", self.eigenvalue_threshold),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }
}

/// A converged local minimizer of `Phi[pi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub profile: Profile,
    pub total_measure: ProbabilityVector,
    pub phi_value: f64,
    /// Reduced-coordinate Hessian spectrum, ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub hessian_min_eigenvalue: f64,
    pub fixed_point_residual: f64,
    /// Member of `M*`: within the global gap tolerance of the least value.
    pub global: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Solution {
    /// Distinct local minimizers, sorted by `Phi` then by total measure.
    pub minimizers: Vec<Minimizer>,
    pub starts: usize,
    pub unconverged_starts: usize,
    /// Distinct stationary points rejected because the Hessian has a negative direction.
    pub saddles: usize,
}

impl Solution {
    /// The members of `M*`.
    pub fn global_minimizers(&self) -> Vec<Minimizer> {
        self.minimizers.iter().filter(|m| m.global).cloned().collect()
    }

    pub fn global_count(&self) -> usize {
        self.minimizers.iter().filter(|m| m.global).count()
    }
}

fn start_profiles(model: &ModelSpec, opts: &SolverOptions) -> Vec<Vec<f64>> {
    let spins = model.spin_count();
    let types = model.disorder_count();
    let mut starts = Vec::new();
    starts.push(model.kernels().iter().flat_map(|k| k.as_slice().iter().copied()).collect());
    for weight in [0.9, 0.5] {
        for a in 0..spins {
            let block: Vec<f64> = (0..spins)
                .map(|c| (1.0 - weight) / spins as f64 + if c == a { weight } else { 0.0 })
                .collect();
            starts.push(block.repeat(types));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let mut flat = Vec::with_capacity(spins * types);
        for _ in 0..types {
            let draws: Vec<f64> = (0..spins).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = draws.iter().sum();
            flat.extend(draws.iter().map(|x: &f64| x / total));
        }
        starts.push(flat);
    }
    starts
}

enum StartOutcome {
    Converged(Vec<f64>, f64),
    Failed,
}

fn solve_from(model: &ModelSpec, mut flat: Vec<f64>, opts: &SolverOptions) -> StartOutcome {
    let spins = model.spin_count();
    let pi = model.disorder().as_slice();
    let switch = (opts.residual_tolerance * 100.0).max(1e-8);
    for _ in 0..opts.max_iterations {
        let nu = total_flat(&flat, pi, spins);
        let image = mean_field_flat(model, &nu);
        let res = flat.iter().zip(&image).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if res < switch {
            break;
        }
        for (x, y) in flat.iter_mut().zip(&image) {
            *x += opts.damping * (y - *x);
        }
    }
    let (flat, res) = newton_polish(model, flat, opts);
    if res <= opts.residual_tolerance {
        StartOutcome::Converged(flat, res)
    } else {
        StartOutcome::Failed
    }
}

fn to_reduced(flat: &[f64], spins: usize) -> DVector<f64> {
    DVector::from_iterator(
        flat.len() / spins * (spins - 1),
        flat.chunks(spins).flat_map(|c| c[..spins - 1].iter().copied()),
    )
}

fn from_reduced(x: &DVector<f64>, spins: usize) -> Vec<f64> {
    let last = spins - 1;
    let mut flat = Vec::with_capacity(x.len() / last * spins);
    for block in x.as_slice().chunks(last) {
        flat.extend_from_slice(block);
        flat.push(1.0 - block.iter().sum::<f64>());
    }
    flat
}

/// Newton's method on the reduced gradient. Keeps the best iterate by
/// fixed-point residual; steps are halved until they stay interior.
fn newton_polish(model: &ModelSpec, flat: Vec<f64>, opts: &SolverOptions) -> (Vec<f64>, f64) {
    let spins = model.spin_count();
    let pi = model.disorder().as_slice();
    let mut best_res = residual_flat(model, &flat);
    let mut best = flat.clone();
    let mut current = flat;
    for _ in 0..opts.newton_steps {
        if best_res <= opts.residual_tolerance * 1e-2 {
            break;
        }
        let g = gradient_flat(model, pi, &current);
        let h = hessian_flat(model, pi, &current);
        let Some(step) = h.lu().solve(&(-g)) else { break };
        let x = to_reduced(&current, spins);
        let mut scale = 1.0;
        let next = loop {
            let candidate = from_reduced(&(&x + &step * scale), spins);
            if candidate.iter().all(|v| *v > 0.0) {
                break Some(candidate);
            }
            scale *= 0.5;
            if scale < 1e-12 {
                break None;
            }
        };
        let Some(next) = next else { break };
        let res = residual_flat(model, &next);
        current = next;
        if res < best_res {
            best_res = res;
            best = current.clone();
        }
    }
    (best, best_res)
}

/// Multi-start search for the local minimizers of `Phi[pi]`.
///
/// Every start runs the damped iteration `nu_hat <- (1-l) nu_hat + l Gamma_hat(pi nu_hat)`
/// followed by a Newton polish. Converged points are classified by the
/// reduced Hessian: a negative direction marks a saddle, which is dropped.
/// Completeness of the returned set is heuristic.
pub fn find_minimizers(model: &ModelSpec, opts: &SolverOptions) -> Result<Solution> {
    opts.validate()?;
    let spins = model.spin_count();
    let pi = model.disorder().as_slice();
    let starts = start_profiles(model, opts);
    let total = starts.len();
    let outcomes: Vec<StartOutcome> = starts.into_par_iter().map(|s| solve_from(model, s, opts)).collect();

    let mut converged = Vec::new();
    let mut failed = 0;
    for outcome in outcomes {
        match outcome {
            StartOutcome::Converged(flat, res) => converged.push((flat, res)),
            StartOutcome::Failed => failed += 1,
        }
    }
    if converged.is_empty() {
        return Err(Error::SolverDidNotConverge { failed, total });
    }

    // distinct stationary points, first occurrence wins
    let mut stationary: Vec<(Vec<f64>, f64)> = Vec::new();
    for (flat, res) in converged {
        let dup = stationary.iter().any(|(kept, _)| {
            kept.iter().zip(&flat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= opts.dedup_tolerance
        });
        if !dup {
            stationary.push((flat, res));
        }
    }

    let mut minimizers = Vec::new();
    let mut saddles = 0;
    for (flat, res) in stationary {
        let h = hessian_flat(model, pi, &flat);
        let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let min_eig = eig.first().copied().unwrap_or(f64::INFINITY);
        if min_eig < -opts.eigenvalue_threshold {
            saddles += 1;
            continue;
        }
        let profile = Profile::from_flat(&flat, spins);
        minimizers.push(Minimizer {
            total_measure: profile.total(model.disorder()),
            phi_value: phi_flat(model, pi, &flat),
            profile,
            hessian_eigenvalues: eig,
            hessian_min_eigenvalue: min_eig,
            fixed_point_residual: res,
            global: false,
        });
    }

    // only saddles converged: the minimizers sit behind the unconverged starts
    if minimizers.is_empty() {
        return Err(Error::SolverDidNotConverge { failed, total });
    }

    sort_minimizers(&mut minimizers, opts.global_gap_tolerance);
    let least = minimizers.iter().map(|m| m.phi_value).fold(f64::INFINITY, f64::min);
    for m in &mut minimizers {
        m.global = m.phi_value <= least + opts.global_gap_tolerance;
    }
    for (index, m) in minimizers.iter().enumerate() {
        if m.global && m.hessian_min_eigenvalue <= opts.eigenvalue_threshold {
            return Err(Error::NonDegeneracy1Violation {
                index,
                eigenvalue: m.hessian_min_eigenvalue,
                threshold: opts.eigenvalue_threshold,
            });
        }
    }
    Ok(Solution {
        minimizers,
        starts: total,
        unconverged_starts: failed,
        saddles,
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Sort by `Phi`; runs of values within `gap` of the run's first element are
/// ordered lexicographically by total measure so symmetric states come out
/// in a stable order.
fn sort_minimizers(ms: &mut [Minimizer], gap: f64) {
    ms.sort_by(|a, b| a.phi_value.total_cmp(&b.phi_value));
    let mut start = 0;
    while start < ms.len() {
        let head = ms[start].phi_value;
        let mut end = start + 1;
        while end < ms.len() && ms[end].phi_value - head <= gap {
            end += 1;
        }
        ms[start..end].sort_by(|a, b| lex_cmp(a.total_measure.as_slice(), b.total_measure.as_slice()));
        start = end;
    }
}
