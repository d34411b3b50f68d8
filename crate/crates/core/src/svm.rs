//! Linear hinge-loss SVM trained by dual coordinate descent.
//!
//! The primal problem is 0.5 |w|^2 + C sum_i max(0, 1 - y_i (w . x_i + b)).
//! The bias is handled as an appended constant feature (so it is regularized
//! and the dual has pure box constraints). Training stops when the duality
//! gap certifies the objective to the requested relative tolerance.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A trained linear classifier, plus its optimality certificate.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub box_c: f64,
    /// Primal objective at the returned weights.
    pub primal_objective: f64,
    /// Primal minus dual objective at return (>= 0; certifies optimality).
    pub duality_gap: f64,
}

/// Default relative tolerance on the certified objective.
pub const DEFAULT_SVM_TOL: f64 = 1e-3;

const MAX_EPOCHS: usize = 200_000;

fn check_features(features: &Array2<f64>, labels: &Array1<f64>) -> Result<()> {
    if features.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "svm labels",
            expected: features.nrows(),
            found: labels.len(),
        });
    }
    Ok(())
}

/// Train on an n x p feature matrix with labels in {+1, -1}.
pub fn train_linear_svm(
    features: &Array2<f64>,
    labels: &Array1<f64>,
    box_c: f64,
    tol: f64,
) -> Result<LinearModel> {
    check_features(features, labels)?;
    let n = features.nrows();
    let p = features.ncols();
    if n < 2 {
        return Err(Error::DegenerateData("svm needs at least two samples".into()));
    }
    let pos = labels.iter().any(|&y| y > 0.0);
    let neg = labels.iter().any(|&y| y < 0.0);
    if !pos || !neg {
        return Err(Error::DegenerateData("svm needs both classes present".into()));
    }
    if !(box_c > 0.0) {
        return Err(Error::InvalidParameter("svm C must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("svm tolerance must be positive".into()));
    }

    let x = features.as_slice().expect("standard layout");
    // Squared row norms, with the appended constant bias feature.
    let q_diag: Vec<f64> = (0..n)
        .map(|i| {
            let row = &x[i * p..(i + 1) * p];
            row.iter().map(|v| v * v).sum::<f64>() + 1.0
        })
        .collect();

    let mut alpha = vec![0.0f64; n];
    // w has p feature weights plus the bias coordinate.
    let mut w = vec![0.0f64; p + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f3759df);

    let mut certified = None;
    for _epoch in 0..MAX_EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = &x[i * p..(i + 1) * p];
            let y = labels[i];
            let mut f = w[p];
            for (wj, xj) in w[..p].iter().zip(row.iter()) {
                f += wj * xj;
            }
            let g = y * f - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= box_c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() > 1e-14 {
                let old = alpha[i];
                let new = (old - g / q_diag[i]).clamp(0.0, box_c);
                if new != old {
                    alpha[i] = new;
                    let delta = (new - old) * y;
                    for (wj, xj) in w[..p].iter_mut().zip(row.iter()) {
                        *wj += delta * xj;
                    }
                    w[p] += delta;
                }
            }
        }

        // Recompute w from alpha to cancel accumulated drift, then check the gap.
        let mut w_fresh = vec![0.0f64; p + 1];
        for i in 0..n {
            let coef = alpha[i] * labels[i];
            if coef != 0.0 {
                let row = &x[i * p..(i + 1) * p];
                for (wj, xj) in w_fresh[..p].iter_mut().zip(row.iter()) {
                    *wj += coef * xj;
                }
                w_fresh[p] += coef;
            }
        }
        w = w_fresh;
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        let mut hinge = 0.0;
        for i in 0..n {
            let row = &x[i * p..(i + 1) * p];
            let mut f = w[p];
            for (wj, xj) in w[..p].iter().zip(row.iter()) {
                f += wj * xj;
            }
            hinge += (1.0 - labels[i] * f).max(0.0);
        }
        let primal = 0.5 * norm_sq + box_c * hinge;
        let dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        let gap = primal - dual;
        if gap <= tol * (1.0 + primal.abs()) {
            certified = Some((primal, gap));
            break;
        }
    }

    let (primal_objective, duality_gap) = certified.ok_or_else(|| {
        Error::Solver(format!(
            "dual coordinate descent did not certify tolerance {tol} within {MAX_EPOCHS} epochs"
        ))
    })?;

    Ok(LinearModel {
        weights: Array1::from_vec(w[..p].to_vec()),
        bias: w[p],
        box_c,
        primal_objective,
        duality_gap,
    })
}

/// Decision values w . x + b.
pub fn decision_values(model: &LinearModel, features: &Array2<f64>) -> Result<Array1<f64>> {
    if features.ncols() != model.weights.len() {
        return Err(Error::DimensionMismatch {
            what: "svm features",
            expected: model.weights.len(),
            found: features.ncols(),
        });
    }
    Ok(features.dot(&model.weights) + model.bias)
}

/// Predicted labels; a decision value of exactly zero resolves to +1.
pub fn predict(model: &LinearModel, features: &Array2<f64>) -> Result<Array1<f64>> {
    Ok(decision_values(model, features)?.mapv(|v| if v >= 0.0 { 1.0 } else { -1.0 }))
}

/// Fraction of matching labels.
pub fn accuracy(predicted: &Array1<f64>, labels: &Array1<f64>) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = predicted
        .iter()
        .zip(labels.iter())
        .filter(|(p, y)| p == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// Geometric margin min_i y_i (w . x_i + b) / |w|; negative when any point
/// is misclassified.
pub fn margin(model: &LinearModel, features: &Array2<f64>, labels: &Array1<f64>) -> Result<f64> {
    check_features(features, labels)?;
    let norm = model.weights.dot(&model.weights).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroWeights);
    }
    let values = decision_values(model, features)?;
    let min = values
        .iter()
        .zip(labels.iter())
        .map(|(&f, &y)| y * f)
        .fold(f64::INFINITY, f64::min);
    Ok(min / norm)
}
