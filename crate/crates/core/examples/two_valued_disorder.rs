//! Two disorder values and three coexisting minimizers: only the two
//! extreme stability vectors are visible, each with weight 1/2.

use std::sync::Arc;

use metastates::metastate::{build_metastate_report, weights_two_type, MetastateOptions};
use metastates::model::{make_ising_field_kernels, make_quadratic_ising, ModelSpec, ProbabilityVector};
use metastates::scan::{locate_coexistence, CoexistenceFamily, ScanAxis};
use metastates::{find_minimizers, SolverOptions};

fn main() -> metastates::Result<()> {
    let beta = 3.0;
    let h = locate_coexistence(CoexistenceFamily::SymmetricIsing, ScanAxis::Field, beta, 0.05, 6.0, 1e-9)?.parameter;
    println!("beta = {beta}: m = 0 and ±m* coexist at h = {h:.10}");

    let model = ModelSpec::new(
        Arc::new(make_quadratic_ising(beta)?),
        make_ising_field_kernels(&[h, -h])?,
        ProbabilityVector::uniform(2),
    )?;
    let solution = find_minimizers(&model, &SolverOptions::default())?;
    let report = build_metastate_report(&model, &solution, &MetastateOptions::default())?;
    let vectors: Vec<_> = report.states.iter().map(|s| s.stability_vector.clone()).collect();
    let exact = weights_two_type(&vectors)?;
    for ((s, w), e) in report.states.iter().zip(report.weight_vector()).zip(exact) {
        let m = s.total_measure[0] - s.total_measure[1];
        println!("m = {m:+.6}  Monte Carlo weight {w:.4}  exact {e}");
    }
    Ok(())
}
