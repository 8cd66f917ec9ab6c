//! Visible versus invisible states.
//!
//! State `j` has a nonempty stability region iff `B_j` is an extreme point of
//! the convex hull of all stability vectors. Per `j` we solve
//!
//! ```text
//! max t  s.t.  <x, B_j - B_i> >= t  for i != j,   |x|_inf <= 1
//! ```
//!
//! A positive optimum yields a witness direction `x` inside the stability
//! region. A zero optimum comes with dual multipliers that express `B_j` as
//! a convex combination of the others.

use serde::{Deserialize, Serialize};

use super::lp;
use super::stability::StabilityVector;
use crate::error::{Error, Result};

pub const DEFAULT_LP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityEntry {
    pub visible: bool,
    /// `<x, B_j> - max_{i != j} <x, B_i>` at the LP witness; `None` when
    /// there are no competitors.
    pub margin: Option<f64>,
    /// Witness direction, projected to the tangent space.
    pub witness: Vec<f64>,
    /// Convex weights over all states (zero at `j`) reproducing `B_j`, for
    /// invisible states.
    pub combination: Option<Vec<f64>>,
    /// `|sum_i lambda_i B_i - B_j|_inf` for the combination.
    pub combination_residual: Option<f64>,
}

impl VisibilityEntry {
    /// Re-checks the certificate against the vectors it was computed from.
    pub fn verify(&self, vectors: &[StabilityVector], j: usize, tolerance: f64) -> bool {
        if self.visible {
            let Some(margin) = self.margin else {
                return vectors.len() == 1;
            };
            let own = vectors[j].dot(&self.witness);
            let best_other = vectors
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, v)| v.dot(&self.witness))
                .fold(f64::NEG_INFINITY, f64::max);
            own - best_other >= margin - 1e-12 && margin > tolerance
        } else {
            let Some(lambda) = &self.combination else {
                return false;
            };
            if lambda.iter().any(|l| *l < 0.0) || (lambda.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return false;
            }
            let d = vectors[j].len();
            (0..d).all(|c| {
                let mix: f64 = lambda.iter().zip(vectors).map(|(l, v)| l * v[c]).sum();
                (mix - vectors[j][c]).abs() <= tolerance
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub entries: Vec<VisibilityEntry>,
    pub min_pair_distance: Option<f64>,
}

impl VisibilityReport {
    pub fn visible_indices(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| e.visible).map(|(i, _)| i).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn classify_one(vectors: &[StabilityVector], j: usize, lp_tolerance: f64) -> Result<VisibilityEntry> {
    let k = vectors.len();
    let d = vectors[j].len();
    if k == 1 {
        return Ok(VisibilityEntry {
            visible: true,
            margin: None,
            witness: vec![0.0; d],
            combination: None,
            combination_residual: None,
        });
    }
    // variables: t, x_plus[0..d], x_minus[0..d], all >= 0
    let others: Vec<usize> = (0..k).filter(|&i| i != j).collect();
    let n = 1 + 2 * d;
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    let mut rows = Vec::with_capacity(others.len() + 2 * d);
    let mut rhs = Vec::with_capacity(others.len() + 2 * d);
    for &i in &others {
        let mut row = vec![0.0; n];
        row[0] = 1.0;
        for q in 0..d {
            let diff = vectors[j][q] - vectors[i][q];
            row[1 + q] = -diff;
            row[1 + d + q] = diff;
        }
        rows.push(row);
        rhs.push(0.0);
    }
    for q in 0..2 * d {
        let mut row = vec![0.0; n];
        row[1 + q] = 1.0;
        rows.push(row);
        rhs.push(1.0);
    }
    let sol = lp::maximize(&c, &rows, &rhs)?;

    let raw: Vec<f64> = (0..d).map(|q| sol.x[1 + q] - sol.x[1 + d + q]).collect();
    let mean = raw.iter().sum::<f64>() / d as f64;
    let witness: Vec<f64> = raw.iter().map(|x| x - mean).collect();
    let own = dot(vectors[j].as_slice(), &witness);
    let best_other = others
        .iter()
        .map(|&i| dot(vectors[i].as_slice(), &witness))
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = own - best_other;
    if margin > lp_tolerance {
        return Ok(VisibilityEntry {
            visible: true,
            margin: Some(margin),
            witness,
            combination: None,
            combination_residual: None,
        });
    }

    let y: Vec<f64> = sol.duals[..others.len()].to_vec();
    let total: f64 = y.iter().sum();
    if total <= 0.0 {
        return Err(Error::LpFailure(format!("state {j}: zero optimum without dual certificate")));
    }
    let mut lambda = vec![0.0; k];
    for (&i, yi) in others.iter().zip(&y) {
        lambda[i] = yi / total;
    }
    let residual = (0..d)
        .map(|q| {
            let mix: f64 = lambda.iter().zip(vectors).map(|(l, v)| l * v[q]).sum();
            (mix - vectors[j][q]).abs()
        })
        .fold(0.0, f64::max);
    Ok(VisibilityEntry {
        visible: false,
        margin: Some(margin),
        witness,
        combination: Some(lambda),
        combination_residual: Some(residual),
    })
}

/// Classifies every state as visible (extreme stability vector) or invisible.
pub fn visibility(vectors: &[StabilityVector], lp_tolerance: f64) -> Result<VisibilityReport> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput("no stability vectors".into()));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidInput("stability vectors have different lengths".into()));
    }
    let entries = (0..vectors.len())
        .map(|j| classify_one(vectors, j, lp_tolerance))
        .collect::<Result<Vec<_>>>()?;
    let mut min_pair: Option<f64> = None;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let dist = vectors[i].sup_distance(&vectors[j]);
            min_pair = Some(min_pair.map_or(dist, |m| m.min(dist)));
        }
    }
    Ok(VisibilityReport {
        entries,
        min_pair_distance: min_pair,
    })
}
