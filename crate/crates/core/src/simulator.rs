//! Exact finite-volume Gibbs computations at small `n`.
//!
//! The Gibbs weight of a spin configuration depends on it only through the
//! per-type count vectors, so all sums run over count profiles with
//! multinomial multiplicities instead of over `|E|^n` configurations. The
//! interaction term depends only on the total counts, which lets most
//! quantities be computed from a convolution of per-type count tables.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{log_sum_exp, ModelSpec, ProbabilityVector};

pub const DEFAULT_BUDGET: u128 = 10_000_000;
pub const DEFAULT_DOMINANCE_THRESHOLD: f64 = 0.5;

/// Quenched disorder on `n` sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisorderSample {
    pub eta: Vec<usize>,
    /// `|Lambda_n(b)|` per disorder symbol.
    pub type_counts: Vec<usize>,
}

impl DisorderSample {
    pub fn new(eta: Vec<usize>, disorder_count: usize) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidInput("disorder sample needs at least one site".into()));
        }
        let mut type_counts = vec![0; disorder_count];
        for &b in &eta {
            if b >= disorder_count {
                return Err(Error::InvalidInput(format!("disorder symbol {b} out of range")));
            }
            type_counts[b] += 1;
        }
        Ok(Self { eta, type_counts })
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// The empirical disorder law `pi_hat_n`.
    pub fn empirical_law(&self) -> ProbabilityVector {
        let n = self.eta.len() as f64;
        ProbabilityVector::from_normalized(self.type_counts.iter().map(|&c| c as f64 / n).collect())
    }

    /// The first `n` sites.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.eta.len() {
            return Err(Error::InvalidInput(format!("prefix length {n} out of range")));
        }
        Self::new(self.eta[..n].to_vec(), self.type_counts.len())
    }
}

/// I.i.d. disorder from `pi`. Sites are drawn in order, so a longer sample
/// with the same seed extends a shorter one.
pub fn sample_disorder(pi: &ProbabilityVector, n: usize, seed: u64) -> Result<DisorderSample> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let dist = WeightedIndex::new(pi.as_slice()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = (0..n).map(|_| rng.sample(&dist)).collect();
    DisorderSample::new(eta, pi.len())
}

/// Spin counts per disorder type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountProfile {
    pub counts: Vec<Vec<u32>>,
}

impl CountProfile {
    pub fn total_counts(&self) -> Vec<u32> {
        let spins = self.counts.first().map_or(0, Vec::len);
        (0..spins).map(|a| self.counts.iter().map(|c| c[a]).sum()).collect()
    }

    /// `pi_hat_n . nu_hat`, the total empirical spin distribution.
    pub fn total_measure(&self) -> ProbabilityVector {
        counts_to_measure(&self.total_counts())
    }

    /// `nu_hat(b)`, or `None` when no site has type `b`.
    pub fn type_measure(&self, b: usize) -> Option<ProbabilityVector> {
        let c = &self.counts[b];
        (c.iter().sum::<u32>() > 0).then(|| counts_to_measure(c))
    }
}

fn counts_to_measure(c: &[u32]) -> ProbabilityVector {
    let n: u32 = c.iter().sum();
    ProbabilityVector::from_normalized(c.iter().map(|&x| x as f64 / n as f64).collect())
}

/// `log k!` for `k = 0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Number of count vectors with `parts` entries summing to `m`.
fn compositions_count(m: usize, parts: usize) -> u128 {
    binomial((m + parts - 1) as u128, (parts - 1) as u128)
}

fn for_each_composition(m: u32, parts: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(rest: u32, slot: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if slot + 1 == cur.len() {
            cur[slot] = rest;
            f(cur);
            return;
        }
        for c in 0..=rest {
            cur[slot] = c;
            rec(rest - c, slot + 1, cur, f);
        }
    }
    let mut cur = vec![0; parts];
    rec(m, 0, &mut cur, f);
}

/// `(counts, log multiplicity + log prior)` for every count vector of one disorder type.
fn type_table(log_alpha: &[f64], m: usize, lf: &[f64]) -> Vec<(Vec<u32>, f64)> {
    let mut out = Vec::new();
    for_each_composition(m as u32, log_alpha.len(), &mut |c| {
        let mut w = lf[m];
        for (&ca, la) in c.iter().zip(log_alpha) {
            w += ca as f64 * la - lf[ca as usize];
        }
        out.push((c.to_vec(), w));
    });
    out
}

fn log_interaction(model: &ModelSpec, total: &[u32], n: usize) -> f64 {
    let nu: Vec<f64> = total.iter().map(|&c| c as f64 / n as f64).collect();
    -(n as f64) * model.interaction().value(&nu)
}

/// Dense table over total count vectors, keyed by the first `|E| - 1`
/// counts in base `n + 1`; the last count is implied.
#[derive(Clone, Debug)]
struct TotalTable {
    spins: usize,
    radix: usize,
    log_w: Vec<f64>,
}

impl TotalTable {
    fn new(spins: usize, n: usize, budget: u128) -> Result<Self> {
        let radix = n + 1;
        let size = (radix as u128).checked_pow((spins - 1) as u32).unwrap_or(u128::MAX);
        if size > budget {
            return Err(Error::BudgetExceeded { size, budget });
        }
        let mut log_w = vec![f64::NEG_INFINITY; size as usize];
        log_w[0] = 0.0;
        Ok(Self { spins, radix, log_w })
    }

    fn key(&self, c: &[u32]) -> usize {
        c[..self.spins - 1].iter().rev().fold(0, |k, &x| k * self.radix + x as usize)
    }

    fn counts(&self, mut key: usize, total: u32) -> Vec<u32> {
        let mut c = Vec::with_capacity(self.spins);
        let mut used = 0;
        for _ in 0..self.spins - 1 {
            let x = (key % self.radix) as u32;
            key /= self.radix;
            used += x;
            c.push(x);
        }
        c.push(total - used);
        c
    }

    /// Convolves in one type's table.
    fn absorb(&mut self, table: &[(Vec<u32>, f64)]) {
        let shifts: Vec<(usize, f64)> = table.iter().map(|(c, w)| (self.key(c), *w)).collect();
        let mut next = vec![f64::NEG_INFINITY; self.log_w.len()];
        for (k, &w) in self.log_w.iter().enumerate() {
            if w == f64::NEG_INFINITY {
                continue;
            }
            for &(s, ws) in &shifts {
                let slot = &mut next[k + s];
                *slot = log_add(*slot, w + ws);
            }
        }
        self.log_w = next;
    }

    fn entries(&self, total: u32) -> impl Iterator<Item = (Vec<u32>, f64)> + '_ {
        self.log_w
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > f64::NEG_INFINITY)
            .map(move |(k, &w)| (self.counts(k, total), w))
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_sample(model: &ModelSpec, eta: &DisorderSample) -> Result<()> {
    if eta.type_counts.len() != model.disorder_count() {
        return Err(Error::InvalidInput("disorder sample does not match the model".into()));
    }
    Ok(())
}

/// Convolution of all per-type tables for the sites in `counts`.
fn convolved(model: &ModelSpec, type_counts: &[usize], n: usize, budget: u128) -> Result<TotalTable> {
    let lf = log_factorials(n);
    let mut table = TotalTable::new(model.spin_count(), n, budget)?;
    for (b, &m) in type_counts.iter().enumerate() {
        if m > 0 {
            table.absorb(&type_table(model.log_kernel(b), m, &lf));
        }
    }
    Ok(table)
}

/// Law of the total spin counts `n L_n` under the finite-volume Gibbs measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalDistribution {
    pub n: usize,
    pub atoms: Vec<(Vec<u32>, f64)>,
}

impl TotalDistribution {
    pub fn measure(&self, i: usize) -> ProbabilityVector {
        counts_to_measure(&self.atoms[i].0)
    }
}

/// Exact law of the total empirical spin distribution.
pub fn total_distribution(model: &ModelSpec, eta: &DisorderSample, budget: u128) -> Result<TotalDistribution> {
    check_sample(model, eta)?;
    let n = eta.len();
    let table = convolved(model, &eta.type_counts, n, budget)?;
    let mut atoms: Vec<(Vec<u32>, f64)> = table
        .entries(n as u32)
        .map(|(c, w)| {
            let lw = w + log_interaction(model, &c, n);
            (c, lw)
        })
        .collect();
    let logs: Vec<f64> = atoms.iter().map(|a| a.1).collect();
    let z = log_sum_exp(&logs);
    for a in &mut atoms {
        a.1 = (a.1 - z).exp();
    }
    Ok(TotalDistribution { n, atoms })
}

/// Exact law over all count profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub n: usize,
    pub atoms: Vec<(CountProfile, f64)>,
}

impl EmpiricalDistribution {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn probability(&self, profile: &CountProfile) -> f64 {
        self.atoms.iter().find(|a| &a.0 == profile).map_or(0.0, |a| a.1)
    }

    /// Marginal law of the total counts, in the same format as [`total_distribution`].
    pub fn totals(&self) -> TotalDistribution {
        let mut map: std::collections::BTreeMap<Vec<u32>, f64> = Default::default();
        for (p, w) in &self.atoms {
            *map.entry(p.total_counts()).or_default() += w;
        }
        TotalDistribution {
            n: self.n,
            atoms: map.into_iter().collect(),
        }
    }
}

/// Size of the full count-profile enumeration for `eta`.
pub fn enumeration_size(spins: usize, eta: &DisorderSample) -> u128 {
    eta.type_counts
        .iter()
        .fold(1u128, |acc, &m| acc.saturating_mul(compositions_count(m, spins)))
}

/// Every count profile with its exact Gibbs probability.
pub fn exact_empirical_distribution(model: &ModelSpec, eta: &DisorderSample, budget: u128) -> Result<EmpiricalDistribution> {
    check_sample(model, eta)?;
    let size = enumeration_size(model.spin_count(), eta);
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let n = eta.len();
    let lf = log_factorials(n);
    let tables: Vec<Vec<(Vec<u32>, f64)>> = eta
        .type_counts
        .iter()
        .enumerate()
        .map(|(b, &m)| type_table(model.log_kernel(b), m, &lf))
        .collect();

    let spins = model.spin_count();
    let mut atoms = Vec::with_capacity(size as usize);
    let mut idx = vec![0usize; tables.len()];
    loop {
        let counts: Vec<Vec<u32>> = idx.iter().zip(&tables).map(|(&i, t)| t[i].0.clone()).collect();
        let mut total = vec![0u32; spins];
        let mut lw = 0.0;
        for (&i, t) in idx.iter().zip(&tables) {
            lw += t[i].1;
            for (s, c) in total.iter_mut().zip(&t[i].0) {
                *s += c;
            }
        }
        lw += log_interaction(model, &total, n);
        atoms.push((CountProfile { counts }, lw));

        // odometer over the per-type tables
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let logs: Vec<f64> = atoms.iter().map(|a| a.1).collect();
                let z = log_sum_exp(&logs);
                for a in &mut atoms {
                    a.1 = (a.1 - z).exp();
                }
                return Ok(EmpiricalDistribution { n, atoms });
            }
            idx[pos] += 1;
            if idx[pos] < tables[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Joint law of the first `k` spins. Configurations are indexed with the
/// first site most significant, so prefixes occupy contiguous blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMarginal {
    pub spins: usize,
    pub k: usize,
    pub probs: Vec<f64>,
}

impl KMarginal {
    pub fn index(&self, sigma: &[usize]) -> usize {
        sigma.iter().fold(0, |acc, &s| acc * self.spins + s)
    }

    pub fn probability(&self, sigma: &[usize]) -> f64 {
        self.probs[self.index(sigma)]
    }

    /// Law of the first `i <= k` spins.
    pub fn restrict(&self, i: usize) -> KMarginal {
        let block = self.spins.pow((self.k - i) as u32);
        let probs = self.probs.chunks(block).map(|c| c.iter().sum()).collect();
        KMarginal {
            spins: self.spins,
            k: i,
            probs,
        }
    }

    /// Product law with the given single-site factors.
    pub fn product(factors: &[ProbabilityVector]) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidInput("product of zero factors".into()));
        };
        let spins = first.len();
        if factors.iter().any(|f| f.len() != spins) {
            return Err(Error::InvalidInput("factors over different alphabets".into()));
        }
        let mut probs = vec![1.0];
        for f in factors {
            probs = probs.iter().flat_map(|p| f.as_slice().iter().map(move |q| p * q)).collect();
        }
        Ok(Self {
            spins,
            k: factors.len(),
            probs,
        })
    }
}

/// Exact law of `(sigma_1, ..., sigma_k)` under the finite-volume Gibbs measure.
pub fn exact_k_marginal(model: &ModelSpec, eta: &DisorderSample, k: usize, budget: u128) -> Result<KMarginal> {
    check_sample(model, eta)?;
    let n = eta.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} must lie in 1..={n}")));
    }
    let spins = model.spin_count();
    let configs = (spins as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if configs > budget {
        return Err(Error::BudgetExceeded { size: configs, budget });
    }
    let head = DisorderSample::new(eta.eta[..k].to_vec(), model.disorder_count())?;
    let rest_counts: Vec<usize> = eta.type_counts.iter().zip(&head.type_counts).map(|(a, b)| a - b).collect();
    let rest = convolved(model, &rest_counts, n, budget)?;
    let rest_atoms: Vec<(Vec<u32>, f64)> = rest.entries((n - k) as u32).collect();

    let mut logs = Vec::with_capacity(configs as usize);
    let mut sigma = vec![0usize; k];
    let mut total = vec![0u32; spins];
    let mut terms = Vec::with_capacity(rest_atoms.len());
    for _ in 0..configs {
        total.iter_mut().for_each(|t| *t = 0);
        let mut prior = 0.0;
        for (i, &s) in sigma.iter().enumerate() {
            total[s] += 1;
            prior += model.log_kernel(eta.eta[i])[s];
        }
        terms.clear();
        for (c, w) in &rest_atoms {
            let full: Vec<u32> = c.iter().zip(&total).map(|(a, b)| a + b).collect();
            terms.push(w + log_interaction(model, &full, n));
        }
        logs.push(prior + log_sum_exp(&terms));
        // advance sigma, last site fastest
        for slot in (0..k).rev() {
            sigma[slot] += 1;
            if sigma[slot] < spins {
                break;
            }
            sigma[slot] = 0;
        }
    }
    let z = log_sum_exp(&logs);
    Ok(KMarginal {
        spins,
        k,
        probs: logs.iter().map(|l| (l - z).exp()).collect(),
    })
}

/// `sum_{i <= k} 2^{-i} TV_i(p, q)` with `TV_i` the total-variation distance
/// of the laws of the first `i` spins.
pub fn marginal_distance(p: &KMarginal, q: &KMarginal, k: usize) -> Result<f64> {
    if p.spins != q.spins || k == 0 || k > p.k || k > q.k {
        return Err(Error::InvalidInput("marginals are not comparable on the requested sites".into()));
    }
    let mut d = 0.0;
    for i in 1..=k {
        let (a, b) = (p.restrict(i), q.restrict(i));
        let tv = 0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>();
        d += tv / 2f64.powi(i as i32);
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub masses: Vec<f64>,
    pub remainder: f64,
}

/// Gibbs mass of the total-variation balls of radius `epsilon` around each center.
pub fn ball_mass(distribution: &TotalDistribution, centers: &[ProbabilityVector], epsilon: f64) -> Result<BallMass> {
    if centers.is_empty() {
        return Err(Error::InvalidInput("no centers".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if let Some(d) = min_center_distance(centers) {
        if epsilon >= d / 2.0 {
            return Err(Error::InvalidInput(format!(
                "epsilon {epsilon} lets balls overlap (centers are {d} apart)"
            )));
        }
    }
    let mut masses = vec![0.0; centers.len()];
    let mut remainder = 0.0;
    for (i, (_, p)) in distribution.atoms.iter().enumerate() {
        let nu = distribution.measure(i);
        match centers.iter().position(|c| c.total_variation(&nu) <= epsilon) {
            Some(j) => masses[j] += p,
            None => remainder += p,
        }
    }
    Ok(BallMass { masses, remainder })
}

pub fn min_center_distance(centers: &[ProbabilityVector]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d = centers[i].total_variation(&centers[j]);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

/// One disorder draw of [`empirical_weights`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub draw: usize,
    pub seed: u64,
    pub empirical_law: ProbabilityVector,
    pub masses: Vec<f64>,
    pub remainder: f64,
    pub attribution: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalWeightEstimate {
    pub n: usize,
    pub samples: usize,
    pub epsilon: f64,
    pub dominance_threshold: f64,
    pub frequencies: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub unresolved: f64,
    pub records: Vec<DrawRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpiricalOptions {
    pub samples: usize,
    /// Ball radius; defaults to a third of the least distance between centers.
    pub epsilon: Option<f64>,
    pub dominance_threshold: f64,
    pub seed: u64,
    pub budget: u64,
}

impl Default for EmpiricalOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            epsilon: None,
            dominance_threshold: DEFAULT_DOMINANCE_THRESHOLD,
            seed: 0,
            budget: DEFAULT_BUDGET as u64,
        }
    }
}

/// Seed of the `draw`-th disorder sample under a master seed.
pub fn draw_seed(seed: u64, draw: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw as u64);
    rng.next_u64()
}

/// Frequencies with which disorder draws put most Gibbs mass near each center.
pub fn empirical_weights(
    model: &ModelSpec,
    centers: &[ProbabilityVector],
    n: usize,
    opts: &EmpiricalOptions,
) -> Result<EmpiricalWeightEstimate> {
    if opts.samples == 0 {
        return Err(Error::InvalidInput("need at least one disorder draw".into()));
    }
    let epsilon = match (opts.epsilon, min_center_distance(centers)) {
        (Some(e), _) => e,
        (None, Some(d)) => d / 3.0,
        (None, None) => 0.1,
    };
    let records = (0..opts.samples)
        .into_par_iter()
        .map(|draw| {
            let seed = draw_seed(opts.seed, draw);
            let eta = sample_disorder(model.disorder(), n, seed)?;
            let dist = total_distribution(model, &eta, opts.budget as u128)?;
            let balls = ball_mass(&dist, centers, epsilon)?;
            let attribution = balls.masses.iter().position(|&m| m > opts.dominance_threshold);
            Ok(DrawRecord {
                draw,
                seed,
                empirical_law: eta.empirical_law(),
                masses: balls.masses,
                remainder: balls.remainder,
                attribution,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = records.len() as f64;
    let mut frequencies = vec![0.0; centers.len()];
    let mut unresolved = 0.0;
    for r in &records {
        match r.attribution {
            Some(j) => frequencies[j] += 1.0,
            None => unresolved += 1.0,
        }
    }
    frequencies.iter_mut().for_each(|f| *f /= total);
    let std_errors = frequencies.iter().map(|f| (f * (1.0 - f) / total).sqrt()).collect();
    Ok(EmpiricalWeightEstimate {
        n,
        samples: opts.samples,
        epsilon,
        dominance_threshold: opts.dominance_threshold,
        frequencies,
        std_errors,
        unresolved: unresolved / total,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn free_model() -> ModelSpec {
        ModelSpec::new(
            Arc::new(ZeroInteraction { dimension: 3 }),
            make_potts_field_kernels(3, 0.7).unwrap(),
            ProbabilityVector::from_weights(&[1.0, 2.0, 3.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn free_model_is_multinomial() {
        let model = free_model();
        let eta = DisorderSample::new(vec![0, 1, 1, 2, 0], 3).unwrap();
        let dist = exact_empirical_distribution(&model, &eta, DEFAULT_BUDGET).unwrap();
        assert_abs_diff_eq!(dist.total_mass(), 1.0, epsilon = 1e-12);
        let lf = log_factorials(5);
        for (p, w) in &dist.atoms {
            let mut expect = 0.0;
            for (b, c) in p.counts.iter().enumerate() {
                let m: u32 = c.iter().sum();
                expect += lf[m as usize];
                for (a, &x) in c.iter().enumerate() {
                    expect += x as f64 * model.kernel(b)[a].ln() - lf[x as usize];
                }
            }
            assert_abs_diff_eq!(*w, expect.exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn totals_agree_with_convolution() {
        let model = ModelSpec::new(
            Arc::new(make_quadratic_potts(3, 2.5).unwrap()),
            make_potts_field_kernels(3, 0.3).unwrap(),
            ProbabilityVector::uniform(3),
        )
        .unwrap();
        let eta = sample_disorder(model.disorder(), 9, 4).unwrap();
        let full = exact_empirical_distribution(&model, &eta, DEFAULT_BUDGET).unwrap().totals();
        let conv = total_distribution(&model, &eta, DEFAULT_BUDGET).unwrap();
        assert_eq!(full.atoms.len(), conv.atoms.len());
        for (c, p) in &conv.atoms {
            let q = full.atoms.iter().find(|a| &a.0 == c).unwrap().1;
            assert_abs_diff_eq!(*p, q, epsilon = 1e-12);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let model = free_model();
        let eta = sample_disorder(model.disorder(), 30, 1).unwrap();
        match exact_empirical_distribution(&model, &eta, 1000) {
            Err(Error::BudgetExceeded { size, budget }) => {
                assert_eq!(size, enumeration_size(3, &eta));
                assert_eq!(budget, 1000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn free_marginal_is_product_and_restricts() {
        let model = free_model();
        let eta = DisorderSample::new(vec![2, 0, 1, 1, 0, 2], 3).unwrap();
        let m3 = exact_k_marginal(&model, &eta, 3, DEFAULT_BUDGET).unwrap();
        let factors: Vec<_> = eta.eta[..3].iter().map(|&b| model.kernel(b).clone()).collect();
        let prod = KMarginal::product(&factors).unwrap();
        for (a, b) in m3.probs.iter().zip(&prod.probs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let m2 = exact_k_marginal(&model, &eta, 2, DEFAULT_BUDGET).unwrap();
        for (a, b) in m3.restrict(2).probs.iter().zip(&m2.probs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn marginal_distance_closed_forms() {
        let p = KMarginal::product(&[ProbabilityVector::point_mass(2, 0)]).unwrap();
        let q = KMarginal::product(&[ProbabilityVector::point_mass(2, 1)]).unwrap();
        assert_abs_diff_eq!(marginal_distance(&p, &q, 1).unwrap(), 0.5);
        assert_eq!(marginal_distance(&p, &p, 1).unwrap(), 0.0);
    }

    #[test]
    fn disorder_prefixes_are_consistent() {
        let pi = ProbabilityVector::from_weights(&[1.0, 3.0]).unwrap();
        let long = sample_disorder(&pi, 50, 9).unwrap();
        let short = sample_disorder(&pi, 20, 9).unwrap();
        assert_eq!(long.prefix(20).unwrap(), short);
        let point = sample_disorder(&ProbabilityVector::point_mass(3, 1), 40, 2).unwrap();
        assert!(point.eta.iter().all(|&b| b == 1));
    }

    #[test]
    fn ball_masses_partition() {
        let model = ModelSpec::new(
            Arc::new(make_quadratic_ising(2.0).unwrap()),
            make_ising_field_kernels(&[0.2, -0.2]).unwrap(),
            ProbabilityVector::uniform(2),
        )
        .unwrap();
        let eta = sample_disorder(model.disorder(), 60, 3).unwrap();
        let dist = total_distribution(&model, &eta, DEFAULT_BUDGET).unwrap();
        let centers = [
            ProbabilityVector::new(vec![0.97, 0.03]).unwrap(),
            ProbabilityVector::new(vec![0.03, 0.97]).unwrap(),
        ];
        let b = ball_mass(&dist, &centers, 0.1).unwrap();
        assert_abs_diff_eq!(b.masses.iter().sum::<f64>() + b.remainder, 1.0, epsilon = 1e-12);
        assert!(ball_mass(&dist, &centers, 0.5).is_err());
    }
}
