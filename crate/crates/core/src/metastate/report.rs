//! Assembly of the full metastate picture for one model.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::stability::{
    check_nondegeneracy2, phi_via_partition, stability_vector_direct, stability_vector_partition, NonDegeneracy2,
    StabilityVector, DEFAULT_PAIR_TOLERANCE,
};
use super::visibility::{visibility, VisibilityEntry, DEFAULT_LP_TOLERANCE};
use super::weights::{weights_mc, WeightVector, DEFAULT_SAMPLES};
use crate::error::Result;
use crate::free_energy::{mean_field_map, phi, Minimizer, Profile, Solution};
use crate::model::{ModelSpec, ProbabilityVector};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetastateOptions {
    pub lp_tolerance: f64,
    pub pair_tolerance: f64,
    pub samples: u64,
    pub seed: u64,
    /// Local minimizers outside `M*` but within this distance of the least
    /// free energy are flagged as near ties.
    pub near_tie_window: f64,
}

impl Default for MetastateOptions {
    fn default() -> Self {
        Self {
            lp_tolerance: DEFAULT_LP_TOLERANCE,
            pair_tolerance: DEFAULT_PAIR_TOLERANCE,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            near_tie_window: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub profile: Profile,
    pub total_measure: ProbabilityVector,
    pub phi_value: f64,
    pub hessian_min_eigenvalue: f64,
    pub fixed_point_residual: f64,
    pub stability_vector: StabilityVector,
    /// The same vector through the little partition functions at `pi nu_hat`.
    pub stability_vector_partition: StabilityVector,
    pub visibility: VisibilityEntry,
    pub weight: f64,
    pub weight_std_error: f64,
    /// `gamma[b](.|pi nu_hat_j)` for every disorder symbol: the single-site
    /// factors of the product state.
    pub kernels: Vec<ProbabilityVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub nondegeneracy2: NonDegeneracy2,
    /// Largest sup-distance between the two stability-vector formulas.
    pub formula_gap: f64,
    /// Largest gap between `Phi` and its little-partition-function form.
    pub identity_gap: f64,
    pub min_hessian_eigenvalue: f64,
    /// Non-global local minimizers whose `Phi` is within the near-tie window.
    pub near_ties: Vec<f64>,
    pub local_minimizers: usize,
    pub saddles: usize,
    pub starts: usize,
    pub unconverged_starts: usize,
    /// Enumeration of `M*` is multi-start, not a certified global search.
    pub enumeration_heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetastateReport {
    pub schema_version: String,
    pub disorder: ProbabilityVector,
    pub states: Vec<StateReport>,
    pub weights: WeightVector,
    pub diagnostics: Diagnostics,
}

impl MetastateReport {
    pub fn weight_vector(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.weight).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "metastate: {} state(s) in M*", self.states.len());
        for (j, st) in self.states.iter().enumerate() {
            let _ = writeln!(
                s,
                "  [{j}] phi = {:.12}  nu = {}  {}  w = {:.4} +/- {:.4}",
                st.phi_value,
                fmt_vec(st.total_measure.as_slice()),
                if st.visibility.visible { "visible  " } else { "invisible" },
                st.weight,
                st.weight_std_error,
            );
            let _ = writeln!(s, "      B = {}", fmt_vec(st.stability_vector.as_slice()));
        }
        let d = &self.diagnostics;
        if let Some(m) = d.nondegeneracy2.min_distance {
            let _ = writeln!(s, "  min |B_i - B_j| = {m:.3e}");
        }
        let _ = writeln!(
            s,
            "  formula gap = {:.3e}, identity gap = {:.3e}, min Hessian eigenvalue = {:.3e}",
            d.formula_gap, d.identity_gap, d.min_hessian_eigenvalue
        );
        if self.weights.samples > 0 {
            let _ = writeln!(s, "  samples = {}, ties = {}", self.weights.samples, self.weights.ties);
        }
        if !d.near_ties.is_empty() {
            let _ = writeln!(s, "  warning: {} local minimizer(s) nearly tie with M*", d.near_ties.len());
        }
        let _ = writeln!(s, "  note: completeness of M* rests on a multi-start search");
        s
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Builds the report from the global minimizers of `solution`.
pub fn build_metastate_report(model: &ModelSpec, solution: &Solution, opts: &MetastateOptions) -> Result<MetastateReport> {
    let globals: Vec<&Minimizer> = solution.minimizers.iter().filter(|m| m.global).collect();
    let pi = model.disorder();

    let mut direct = Vec::with_capacity(globals.len());
    let mut partition = Vec::with_capacity(globals.len());
    let mut formula_gap: f64 = 0.0;
    let mut identity_gap: f64 = 0.0;
    for m in &globals {
        let b = stability_vector_direct(model, &m.profile)?;
        let b_hat = stability_vector_partition(model, &m.total_measure)?;
        formula_gap = formula_gap.max(b.sup_distance(&b_hat));
        let at_gamma = phi(model, pi, &mean_field_map(model, &m.total_measure)?)?;
        identity_gap = identity_gap.max((at_gamma - phi_via_partition(model, &m.total_measure)?).abs());
        direct.push(b);
        partition.push(b_hat);
    }

    let nondegeneracy2 = check_nondegeneracy2(&direct, opts.pair_tolerance)?;
    let vis = visibility(&direct, opts.lp_tolerance)?;
    let weights = if direct.len() == 1 {
        WeightVector::certain(1, 0)
    } else {
        weights_mc(&direct, pi, opts.samples, opts.seed)?
    };

    let least = globals.iter().map(|m| m.phi_value).fold(f64::INFINITY, f64::min);
    let near_ties = solution
        .minimizers
        .iter()
        .filter(|m| !m.global && m.phi_value - least <= opts.near_tie_window)
        .map(|m| m.phi_value - least)
        .collect();

    let states = globals
        .iter()
        .zip(direct)
        .zip(partition)
        .zip(vis.entries)
        .enumerate()
        .map(|(j, (((m, b), b_hat), v))| {
            let kernels = mean_field_map(model, &m.total_measure)?.components().to_vec();
            Ok(StateReport {
                profile: m.profile.clone(),
                total_measure: m.total_measure.clone(),
                phi_value: m.phi_value,
                hessian_min_eigenvalue: m.hessian_min_eigenvalue,
                fixed_point_residual: m.fixed_point_residual,
                stability_vector: b,
                stability_vector_partition: b_hat,
                visibility: v,
                weight: weights.weights[j],
                weight_std_error: weights.std_errors[j],
                kernels,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MetastateReport {
        schema_version: SCHEMA_VERSION.into(),
        disorder: pi.clone(),
        diagnostics: Diagnostics {
            nondegeneracy2,
            formula_gap,
            identity_gap,
            min_hessian_eigenvalue: globals
                .iter()
                .map(|m| m.hessian_min_eigenvalue)
                .fold(f64::INFINITY, f64::min),
            near_ties,
            local_minimizers: solution.minimizers.len(),
            saddles: solution.saddles,
            starts: solution.starts,
            unconverged_starts: solution.unconverged_starts,
            enumeration_heuristic: true,
        },
        states,
        weights,
    })
}
