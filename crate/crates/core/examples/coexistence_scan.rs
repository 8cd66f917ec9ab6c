//! Coexistence lines of the two reduced families.

use metastates::scan::{potts_critical_beta, scan, CoexistenceFamily, ScanAxis, ScanOptions};

fn main() -> metastates::Result<()> {
    let potts = ScanOptions {
        axis: ScanAxis::Beta,
        lo: 2.0,
        hi: 4.0,
        others: vec![0.0, 0.1, 0.2, 0.3, 0.5],
        tolerance: 1e-8,
    };
    println!("Potts q = 3 (zero-field closed form {:.10})", potts_critical_beta(3));
    for p in scan(CoexistenceFamily::Potts { q: 3 }, &potts)? {
        println!("  B = {:.2}: beta* = {:.10}, u* = {:.6}", p.other, p.parameter, p.order_parameter);
    }

    let ising = ScanOptions {
        axis: ScanAxis::Field,
        lo: 0.05,
        hi: 6.0,
        others: vec![2.0, 2.5, 3.0, 4.0, 5.0],
        tolerance: 1e-8,
    };
    println!("Ising with fields ±h");
    for p in scan(CoexistenceFamily::SymmetricIsing, &ising)? {
        println!("  beta = {:.1}: h* = {:.10}, m* = {:.6}", p.other, p.parameter, p.order_parameter);
    }
    Ok(())
}
