//! Three-state Potts model with a random field at its first-order
//! transition: four equally deep minimizers, one of which is never selected.

use std::sync::Arc;

use metastates::metastate::{build_metastate_report, MetastateOptions};
use metastates::model::{make_potts_field_kernels, make_quadratic_potts, ModelSpec, ProbabilityVector};
use metastates::scan::{locate_coexistence, CoexistenceFamily, ScanAxis};
use metastates::{find_minimizers, SolverOptions};

fn main() -> metastates::Result<()> {
    let (q, field) = (3, 0.3);
    let point = locate_coexistence(CoexistenceFamily::Potts { q }, ScanAxis::Beta, field, 2.0, 4.0, 1e-9)?;
    let beta = point.parameter;
    println!("transition at beta = {beta:.10} (beta - 4 log 2 = {:.6})", beta - 4.0 * 2f64.ln());

    let model = ModelSpec::new(
        Arc::new(make_quadratic_potts(q, beta)?),
        make_potts_field_kernels(q, field)?,
        ProbabilityVector::uniform(q),
    )?;
    let solution = find_minimizers(&model, &SolverOptions::default())?;
    let report = build_metastate_report(&model, &solution, &MetastateOptions::default())?;
    for (j, s) in report.states.iter().enumerate() {
        println!(
            "[{j}] nu = {:.4?}  visible = {}  weight = {:.4}",
            s.total_measure.as_slice(),
            s.visibility.visible,
            s.weight
        );
        if let Some(lambda) = &s.visibility.combination {
            println!("    B is the convex combination {lambda:.4?} of the others");
        }
    }
    Ok(())
}
