//! Exact finite-volume Gibbs measures: the law of the empirical spin
//! distribution for one disorder draw, and the frequency with which each
//! minimizer dominates over many draws.

use std::sync::Arc;

use metastates::model::{make_ising_field_kernels, make_quadratic_ising, ModelSpec, ProbabilityVector};
use metastates::simulator::{
    ball_mass, empirical_weights, min_center_distance, sample_disorder, total_distribution, EmpiricalOptions,
    DEFAULT_BUDGET,
};
use metastates::{find_minimizers, SolverOptions};

fn main() -> metastates::Result<()> {
    let model = ModelSpec::new(
        Arc::new(make_quadratic_ising(2.0)?),
        make_ising_field_kernels(&[0.5, -0.5])?,
        ProbabilityVector::uniform(2),
    )?;
    let centers: Vec<_> = find_minimizers(&model, &SolverOptions::default())?
        .global_minimizers()
        .into_iter()
        .map(|m| m.total_measure)
        .collect();

    let eta = sample_disorder(model.disorder(), 200, 1)?;
    println!("one draw, n = 200, type counts {:?}", eta.type_counts);
    let dist = total_distribution(&model, &eta, DEFAULT_BUDGET)?;
    let eps = min_center_distance(&centers).unwrap() / 3.0;
    let balls = ball_mass(&dist, &centers, eps)?;
    println!("  ball masses {:.4?}, remainder {:.2e}", balls.masses, balls.remainder);

    let opts = EmpiricalOptions {
        samples: 400,
        seed: 3,
        ..Default::default()
    };
    for n in [50, 100, 400] {
        let est = empirical_weights(&model, &centers, n, &opts)?;
        println!(
            "n = {n:>3}: frequencies {:.4?} ± {:.4?}, unresolved {:.3}",
            est.frequencies, est.std_errors, est.unresolved
        );
    }
    Ok(())
}
