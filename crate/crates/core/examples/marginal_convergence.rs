//! Two-site marginals of the exact Gibbs measure against the product of
//! single-site kernels of the dominant state.

use std::sync::Arc;

use metastates::free_energy::mean_field_map;
use metastates::model::{make_ising_field_kernels, make_quadratic_ising, ModelSpec, ProbabilityVector};
use metastates::simulator::{
    ball_mass, exact_k_marginal, marginal_distance, min_center_distance, sample_disorder, total_distribution,
    KMarginal, DEFAULT_BUDGET,
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
    let eps = min_center_distance(&centers).unwrap() / 3.0;

    for seed in 0..5 {
        let long = sample_disorder(model.disorder(), 80, seed)?;
        print!("draw {seed}:");
        for n in [20, 40, 80] {
            let eta = long.prefix(n)?;
            let balls = ball_mass(&total_distribution(&model, &eta, DEFAULT_BUDGET)?, &centers, eps)?;
            let dom = if balls.masses[0] >= balls.masses[1] { 0 } else { 1 };
            let kernels = mean_field_map(&model, &centers[dom])?;
            let product = KMarginal::product(&[
                kernels.component(eta.eta[0]).clone(),
                kernels.component(eta.eta[1]).clone(),
            ])?;
            let exact = exact_k_marginal(&model, &eta, 2, DEFAULT_BUDGET)?;
            let d = marginal_distance(&exact, &product, 2)?;
            print!("  n={n}: state {dom} (mass {:.3}) d = {d:.4}", balls.masses[dom]);
        }
        println!();
    }
    Ok(())
}
