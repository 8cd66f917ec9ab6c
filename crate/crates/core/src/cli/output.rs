//! Long-format CSV emitters. Every file has a header row and a fixed row order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{Family, RunConfig};
use crate::error::{Error, Result};
use crate::free_energy::{phi_reduced_potts, Solution};
use crate::metastate::{phi_via_partition, MetastateReport};
use crate::model::ProbabilityVector;
use crate::scan::{golden_section, CoexistencePoint, ScanAxis};
use crate::simulator::EmpiricalWeightEstimate;

pub fn minimizers_csv(solution: &Solution) -> String {
    let mut s = String::from("minimizer,global,quantity,b,a,value\n");
    for (j, m) in solution.minimizers.iter().enumerate() {
        let g = m.global;
        let _ = writeln!(s, "{j},{g},phi,,,{}", m.phi_value);
        let _ = writeln!(s, "{j},{g},fixed_point_residual,,,{}", m.fixed_point_residual);
        for (i, e) in m.hessian_eigenvalues.iter().enumerate() {
            let _ = writeln!(s, "{j},{g},hessian_eigenvalue,,{i},{e}");
        }
        for (a, v) in m.total_measure.as_slice().iter().enumerate() {
            let _ = writeln!(s, "{j},{g},total_measure,,{a},{v}");
        }
        for (b, comp) in m.profile.components().iter().enumerate() {
            for (a, v) in comp.as_slice().iter().enumerate() {
                let _ = writeln!(s, "{j},{g},profile,{b},{a},{v}");
            }
        }
    }
    s
}

pub fn minimizers_table(solution: &Solution) -> String {
    let mut s = format!(
        "{} local minimizer(s), {} in M*, {} saddle(s), {}/{} starts unconverged\n",
        solution.minimizers.len(),
        solution.global_count(),
        solution.saddles,
        solution.unconverged_starts,
        solution.starts
    );
    for (j, m) in solution.minimizers.iter().enumerate() {
        let nu: Vec<String> = m.total_measure.as_slice().iter().map(|x| format!("{x:.6}")).collect();
        let _ = writeln!(
            s,
            "  [{j}] {} phi = {:.12}  nu = ({})  min eig = {:.3e}  residual = {:.1e}",
            if m.global { "*" } else { " " },
            m.phi_value,
            nu.join(", "),
            m.hessian_min_eigenvalue,
            m.fixed_point_residual
        );
    }
    s
}

pub fn weights_csv(report: &MetastateReport) -> String {
    let mut s = String::from("state,visible,weight,std_error,phi,b,stability\n");
    for (j, st) in report.states.iter().enumerate() {
        for (b, v) in st.stability_vector.as_slice().iter().enumerate() {
            let _ = writeln!(
                s,
                "{j},{},{},{},{},{b},{v}",
                st.visibility.visible, st.weight, st.weight_std_error, st.phi_value
            );
        }
    }
    s
}

pub fn scan_csv(points: &[CoexistencePoint]) -> String {
    let mut s = String::from("axis,other,parameter,gap,order_parameter,bracket_width,iterations\n");
    for p in points {
        let axis = match p.axis {
            ScanAxis::Beta => "beta",
            ScanAxis::Field => "field",
        };
        let _ = writeln!(
            s,
            "{axis},{},{},{},{},{},{}",
            p.other, p.parameter, p.gap, p.order_parameter, p.bracket_width, p.iterations
        );
    }
    s
}

pub fn simulate_csv(estimates: &[EmpiricalWeightEstimate]) -> String {
    let mut s = String::from("n,state,frequency,std_error,unresolved,samples,epsilon\n");
    for e in estimates {
        for (j, (f, se)) in e.frequencies.iter().zip(&e.std_errors).enumerate() {
            let _ = writeln!(s, "{},{j},{f},{se},{},{},{}", e.n, e.unresolved, e.samples, e.epsilon);
        }
    }
    s
}

pub fn draws_csv(estimates: &[EmpiricalWeightEstimate]) -> String {
    let mut s = String::from("n,draw,seed,attribution,state,mass,remainder\n");
    for e in estimates {
        for r in &e.records {
            let att = r.attribution.map_or(String::new(), |a| a.to_string());
            for (j, m) in r.masses.iter().enumerate() {
                let _ = writeln!(s, "{},{},{},{att},{j},{m},{}", e.n, r.draw, r.seed, r.remainder);
            }
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub minimum: bool,
    pub x: f64,
    pub phi: f64,
}

/// Samples of the reduced free energy along the order parameter, followed
/// by the refined local minima of the sampled curve.
///
/// Potts: `u -> Phi(Gamma_hat(nu_{j,u}))` on `[0, 0.9]` by default. Ising
/// families: the same along `nu_m`, `m in [-0.99, 0.99]`, shifted to vanish
/// at `m = 0`.
pub fn curve_points(config: &RunConfig) -> Result<Vec<CurvePoint>> {
    let plot = &config.plotdata;
    if plot.points < 3 {
        return Err(Error::Config("plotdata.points must be at least 3".into()));
    }
    let f: Box<dyn Fn(f64) -> f64> = match config.model.family {
        Family::QuadraticPotts => {
            config.model()?;
            let m = &config.model;
            let (q, beta, field) = (m.q.unwrap_or(2), m.beta.unwrap_or(0.0), m.field.unwrap_or(0.0));
            Box::new(move |u| phi_reduced_potts(q, beta, field, u))
        }
        Family::QuadraticIsing | Family::GeneralIsing => {
            let model = config.model()?;
            let at = move |m: f64| {
                let nu = ProbabilityVector::from_weights(&[1.0 + m, 1.0 - m]).expect("interior magnetization");
                phi_via_partition(&model, &nu).expect("two-state model")
            };
            let base = at(0.0);
            Box::new(move |m| at(m) - base)
        }
    };
    let (lo_default, hi_default) = match config.model.family {
        Family::QuadraticPotts => (0.0, 0.9),
        _ => (-0.99, 0.99),
    };
    let lo = plot.lo.unwrap_or(lo_default);
    let hi = plot.hi.unwrap_or(hi_default);
    if !(lo < hi) {
        return Err(Error::Config(format!("plotdata range [{lo}, {hi}] is empty")));
    }
    let n = plot.points;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out: Vec<CurvePoint> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &phi)| CurvePoint { minimum: false, x, phi })
        .collect();
    for i in 0..n {
        let left = i == 0 || ys[i] <= ys[i - 1];
        let right = i + 1 == n || ys[i] < ys[i + 1];
        if left && right {
            let x = if i == 0 || i + 1 == n {
                xs[i]
            } else {
                golden_section(&|x| f(x), xs[i - 1], xs[i + 1], 1e-12)
            };
            out.push(CurvePoint {
                minimum: true,
                x,
                phi: f(x),
            });
        }
    }
    Ok(out)
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("kind,x,phi\n");
    for p in points {
        let _ = writeln!(s, "{},{},{}", if p.minimum { "minimum" } else { "curve" }, p.x, p.phi);
    }
    s
}
