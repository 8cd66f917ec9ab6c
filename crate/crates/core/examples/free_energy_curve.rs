//! Reduced free-energy curve along the order parameter, as written by the
//! `plotdata` command, built from an inline TOML configuration.

use metastates::cli::{curve_points, RunConfig};

fn main() -> metastates::Result<()> {
    let config = RunConfig::from_toml(
        r#"
        [model]
        family = "quadratic-potts"
        q = 3
        beta = 2.8046245004516095
        field = 0.3

        [plotdata]
        points = 19
        "#,
    )?;
    for p in curve_points(&config)? {
        if p.minimum {
            println!("local minimum at u = {:.6}: phi = {:.3e}", p.x, p.phi);
        } else {
            println!("u = {:.3}  phi = {:+.6}  {}", p.x, p.phi, "*".repeat((p.phi.max(0.0) * 2000.0) as usize));
        }
    }
    Ok(())
}
