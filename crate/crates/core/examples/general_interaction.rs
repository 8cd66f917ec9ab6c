//! A user-defined interaction. Any smooth `F` works; here a Curie-Weiss
//! energy with a quartic correction written out by hand, checked against
//! the built-in polynomial family.

use std::sync::Arc;

use nalgebra::DMatrix;

use metastates::metastate::{build_metastate_report, MetastateOptions};
use metastates::model::{make_ising_field_kernels, GeneralIsing, InteractionFunctional, ModelSpec, ProbabilityVector};
use metastates::{find_minimizers, SolverOptions};

/// `F(nu) = -m^2 - m^4 / 2` with `m = nu(+) - nu(-)`.
#[derive(Debug)]
struct Quartic;

impl InteractionFunctional for Quartic {
    fn dimension(&self) -> usize {
        2
    }
    fn value(&self, nu: &[f64]) -> f64 {
        let m = nu[0] - nu[1];
        -m * m - 0.5 * m.powi(4)
    }
    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        let m = nu[0] - nu[1];
        let g = -2.0 * m - 2.0 * m.powi(3);
        vec![g, -g]
    }
    fn hessian(&self, nu: &[f64]) -> DMatrix<f64> {
        let m = nu[0] - nu[1];
        let h = -2.0 - 6.0 * m * m;
        DMatrix::from_row_slice(2, 2, &[h, -h, -h, h])
    }
}

fn main() -> metastates::Result<()> {
    let kernels = make_ising_field_kernels(&[0.4, -0.1, -0.6])?;
    let pi = ProbabilityVector::from_weights(&[1.0, 2.0, 1.0])?;
    let hand = ModelSpec::new(Arc::new(Quartic), kernels.clone(), pi.clone())?;
    let builtin = ModelSpec::new(Arc::new(GeneralIsing::polynomial(&[0.0, 0.0, -1.0, 0.0, -0.5])), kernels, pi)?;

    for (name, model) in [("hand-written", &hand), ("polynomial", &builtin)] {
        let solution = find_minimizers(model, &SolverOptions::default())?;
        let report = build_metastate_report(model, &solution, &MetastateOptions::default())?;
        println!("{name}:");
        for s in &report.states {
            let m = s.total_measure[0] - s.total_measure[1];
            println!("  m = {m:+.8}  phi = {:.10}  weight = {:.4}", s.phi_value, s.weight);
        }
    }
    Ok(())
}
