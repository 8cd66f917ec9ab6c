//! Coexistence lines: where a symmetry-broken minimizer and the symmetric
//! one have equal free energy.
//!
//! Both families reduce to a one-dimensional order parameter with the
//! symmetric state at the origin and a free energy vanishing there, so the
//! gap `min_{x > 0} Phi(x) - Phi(0)` decides which state wins. It is `+inf`
//! when there is no interior local minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::phi_reduced_potts;

const GRID: usize = 2000;
const GOLDEN: f64 = 0.381_966_011_250_105_1;
/// Bisection keeps going past the parameter tolerance until the gap is this small.
const GAP_TARGET: f64 = 1e-11;
const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoexistenceFamily {
    /// Quadratic Potts with homogeneous random field, uniform disorder.
    Potts { q: usize },
    /// Quadratic Ising with fields `+h` and `-h` of probability 1/2 each.
    SymmetricIsing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanAxis {
    Beta,
    Field,
}

/// Reduced free energy of the symmetric two-field Ising model at magnetization `m`.
pub fn phi_reduced_symmetric_ising(beta: f64, field: f64, m: f64) -> f64 {
    let lc = |x: f64| x.abs() + (-2.0 * x.abs()).exp().ln_1p();
    let log_ratio = |h: f64| lc(beta * m + h) - lc(h);
    beta * m * m / 2.0 - 0.5 * (log_ratio(field) + log_ratio(-field))
}

impl CoexistenceFamily {
    /// Reduced free energy at order parameter `x`, zero at `x = 0`.
    pub fn reduced_phi(&self, beta: f64, field: f64, x: f64) -> f64 {
        match *self {
            CoexistenceFamily::Potts { q } => phi_reduced_potts(q, beta, field, x),
            CoexistenceFamily::SymmetricIsing => phi_reduced_symmetric_ising(beta, field, x),
        }
    }

    /// Upper end of the order-parameter range.
    pub fn order_parameter_max(&self) -> f64 {
        1.0 - 1e-9
    }

    fn validate(&self) -> Result<()> {
        if let CoexistenceFamily::Potts { q } = self {
            if *q < 3 {
                return Err(Error::InvalidInput("Potts coexistence needs q >= 3".into()));
            }
        }
        Ok(())
    }
}

/// A local minimum of the reduced free energy over `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderMinimum {
    pub x: f64,
    pub phi: f64,
}

pub(crate) fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = a + GOLDEN * (b - a);
    let mut d = b - GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = a + GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = b - GOLDEN * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Newton on the finite-difference derivative; keeps the best point seen.
fn newton_polish(f: &impl Fn(f64) -> f64, mut x: f64, lo: f64, hi: f64) -> f64 {
    let h = 1e-5;
    let mut best = (f(x), x);
    for _ in 0..8 {
        let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        if d2 <= 0.0 {
            break;
        }
        x = (x - d1 / d2).clamp(lo, hi);
        let fx = f(x);
        if fx < best.0 {
            best = (fx, x);
        }
    }
    best.1
}

/// All interior local minima over `(0, x_max)`.
pub fn order_minima(family: CoexistenceFamily, beta: f64, field: f64) -> Vec<OrderMinimum> {
    let f = |x: f64| family.reduced_phi(beta, field, x);
    let top = family.order_parameter_max();
    // Chebyshev-style spacing resolves minima crowding against either end
    let xs: Vec<f64> = (0..=GRID)
        .map(|i| top * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / GRID as f64).cos()))
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 1..=GRID {
        let descending = ys[i] <= ys[i - 1];
        if i < GRID && descending && ys[i] < ys[i + 1] {
            let x = golden_section(&f, xs[i - 1], xs[i + 1], 1e-12);
            let x = newton_polish(&f, x, xs[i - 1], xs[i + 1]);
            out.push(OrderMinimum { x, phi: f(x) });
        } else if i == GRID && descending {
            // the last cell may still hold an interior minimum
            let x = golden_section(&f, xs[i - 1], top, 1e-14);
            if f(x) < ys[i] && top - x > 1e-13 {
                out.push(OrderMinimum { x, phi: f(x) });
            }
        }
    }
    out
}

/// `min_{x > 0} Phi(x)` over interior local minima; `+inf` if there is none.
pub fn free_energy_gap(family: CoexistenceFamily, beta: f64, field: f64) -> (f64, Option<OrderMinimum>) {
    order_minima(family, beta, field)
        .into_iter()
        .min_by(|a, b| a.phi.total_cmp(&b.phi))
        .map_or((f64::INFINITY, None), |m| (m.phi, Some(m)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoexistencePoint {
    pub axis: ScanAxis,
    /// Located value on the scanned axis.
    pub parameter: f64,
    /// Fixed value of the other parameter.
    pub other: f64,
    pub gap: f64,
    pub order_parameter: f64,
    pub bracket_width: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    pub axis: ScanAxis,
    pub lo: f64,
    pub hi: f64,
    /// Values of the parameter that is held fixed.
    pub others: Vec<f64>,
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            axis: ScanAxis::Beta,
            lo: 2.0,
            hi: 4.0,
            others: vec![0.0],
            tolerance: 1e-6,
        }
    }
}

fn gap_at(family: CoexistenceFamily, axis: ScanAxis, t: f64, other: f64) -> (f64, Option<OrderMinimum>) {
    match axis {
        ScanAxis::Beta => free_energy_gap(family, t, other),
        ScanAxis::Field => free_energy_gap(family, other, t),
    }
}

/// Bisection on the sign of the gap along `axis` in `[lo, hi]`.
pub fn locate_coexistence(
    family: CoexistenceFamily,
    axis: ScanAxis,
    other: f64,
    lo: f64,
    hi: f64,
    tolerance: f64,
) -> Result<CoexistencePoint> {
    family.validate()?;
    if !(lo < hi) || !(tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("bad scan interval [{lo}, {hi}] / tolerance {tolerance}")));
    }
    let (mut a, mut b) = (lo, hi);
    let (ga, _) = gap_at(family, axis, a, other);
    let (gb, _) = gap_at(family, axis, b, other);
    if (ga > 0.0) == (gb > 0.0) {
        return Err(Error::NoBracket {
            lo,
            hi,
            gap_lo: ga,
            gap_hi: gb,
        });
    }
    let a_positive = ga > 0.0;
    let mut iterations = 0;
    let mut mid = 0.5 * (a + b);
    let (mut gm, mut best) = gap_at(family, axis, mid, other);
    while iterations < MAX_BISECTIONS && (b - a > tolerance || gm.abs() > GAP_TARGET) {
        if (gm > 0.0) == a_positive {
            a = mid;
        } else {
            b = mid;
        }
        let next = 0.5 * (a + b);
        if next == mid || next <= a || next >= b {
            break;
        }
        mid = next;
        (gm, best) = gap_at(family, axis, mid, other);
        iterations += 1;
    }
    Ok(CoexistencePoint {
        axis,
        parameter: mid,
        other,
        gap: gm,
        order_parameter: best.map_or(0.0, |m| m.x),
        bracket_width: b - a,
        iterations,
    })
}

/// One coexistence point per fixed value of the other parameter.
pub fn scan(family: CoexistenceFamily, opts: &ScanOptions) -> Result<Vec<CoexistencePoint>> {
    if opts.others.is_empty() {
        return Err(Error::InvalidInput("scan needs at least one value of the fixed parameter".into()));
    }
    opts.others
        .iter()
        .map(|&o| locate_coexistence(family, opts.axis, o, opts.lo, opts.hi, opts.tolerance))
        .collect()
}

/// Closed-form Potts transition without field, `2(q-1)/(q-2) log(q-1)`.
pub fn potts_critical_beta(q: usize) -> f64 {
    let qf = q as f64;
    2.0 * (qf - 1.0) / (qf - 2.0) * (qf - 1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_potts_matches_closed_form() {
        let p = locate_coexistence(CoexistenceFamily::Potts { q: 3 }, ScanAxis::Beta, 0.0, 2.0, 3.5, 1e-6).unwrap();
        assert!((p.parameter - potts_critical_beta(3)).abs() < 1e-5, "{p:?}");
        assert!(p.gap.abs() < 1e-9);
    }

    #[test]
    fn high_temperature_has_no_interior_minimum() {
        assert_eq!(free_energy_gap(CoexistenceFamily::Potts { q: 3 }, 1.0, 0.3).0, f64::INFINITY);
        assert!(free_energy_gap(CoexistenceFamily::Potts { q: 3 }, 4.0, 0.3).0 < 0.0);
    }

    #[test]
    fn no_bracket_is_reported() {
        let r = locate_coexistence(CoexistenceFamily::Potts { q: 3 }, ScanAxis::Beta, 0.3, 0.5, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::NoBracket { .. })));
    }

    #[test]
    fn symmetric_ising_reduced_phi_is_even_and_stable() {
        let f = |m| phi_reduced_symmetric_ising(3.0, 1.2, m);
        assert_eq!(f(0.0), 0.0);
        assert!((f(0.4) - f(-0.4)).abs() < 1e-14);
        // large arguments must not overflow cosh
        assert!(phi_reduced_symmetric_ising(500.0, 400.0, 0.9).is_finite());
    }
}
