//! Random-field Ising model with fields ±h: two symmetric phases, each
//! chosen with probability 1/2 by the disorder.

use std::sync::Arc;

use metastates::metastate::{build_metastate_report, MetastateOptions};
use metastates::model::{make_ising_field_kernels, make_quadratic_ising, ModelSpec, ProbabilityVector};
use metastates::{find_minimizers, SolverOptions};

fn main() -> metastates::Result<()> {
    let model = ModelSpec::new(
        Arc::new(make_quadratic_ising(2.0)?),
        make_ising_field_kernels(&[0.5, -0.5])?,
        ProbabilityVector::uniform(2),
    )?;
    let solution = find_minimizers(&model, &SolverOptions::default())?;
    let report = build_metastate_report(&model, &solution, &MetastateOptions::default())?;
    print!("{}", report.summary());
    for s in &report.states {
        let m = s.total_measure[0] - s.total_measure[1];
        println!("m = {m:+.6}  B = {:?}  weight = {:.4}", s.stability_vector.as_slice(), s.weight);
    }
    Ok(())
}
