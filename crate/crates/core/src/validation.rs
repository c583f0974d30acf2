//! Numerical rank analysis of a stacked regressor and cross-validation of an
//! analytical nullspace against it.

use nalgebra::{DMatrix, RowDVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance;

/// Rank analysis of a stacked regressor by column-pivoted QR.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericalAnalysis {
    pub rank: usize,
    /// Columns selected as independent, in pivot order.
    pub independent: Vec<usize>,
    /// `|R_kk| / |R_00|` in pivot order.
    pub pivots: Vec<f64>,
    pub rank_tol: f64,
    /// Pivot positions within a factor of the tolerance band of the threshold.
    pub near_threshold: Vec<usize>,
}

impl NumericalAnalysis {
    pub fn has_near_threshold(&self) -> bool {
        !self.near_threshold.is_empty()
    }
}

pub fn numerical_base_analysis(y: &DMatrix<f64>, rank_tol: f64) -> Result<NumericalAnalysis> {
    if y.nrows() == 0 || y.ncols() == 0 {
        return Err(Error::Empty("regressor matrix".into()));
    }
    let qr = y.clone().col_piv_qr();
    let r = qr.r();
    let mut order = RowDVector::from_iterator(y.ncols(), (0..y.ncols()).map(|k| k as f64));
    qr.p().permute_columns(&mut order);
    let k = r.nrows().min(r.ncols());
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let max = diag.first().copied().unwrap_or(0.0);
    let pivots: Vec<f64> = diag.iter().map(|&d| if max > 0.0 { d / max } else { 0.0 }).collect();
    let rank = pivots.iter().filter(|&&p| p > rank_tol).count();
    let lo = rank_tol / tolerance::NEAR_THRESHOLD_BAND;
    let hi = rank_tol * tolerance::NEAR_THRESHOLD_BAND;
    let near_threshold = (0..k).filter(|&i| pivots[i] > lo && pivots[i] < hi).collect();
    let independent = (0..rank).map(|i| order[i] as usize).collect();
    Ok(NumericalAnalysis { rank, independent, pivots, rank_tol, near_threshold })
}

/// Rank from singular values above `rel_tol` times the largest.
pub fn svd_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = a.clone().singular_values();
    let max = s.max();
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * max).count()
}

/// Outcome of checking an analytical nullspace against a regressor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidation {
    pub rank_yb: usize,
    pub rank_b: usize,
    pub rank_ok: bool,
    /// `||Y B_null||_F`.
    pub residual_abs: f64,
    /// `||Y B_null||_F / ||Y||_F`.
    pub residual_rel: f64,
    pub residual_tol: f64,
    pub residual_ok: bool,
    pub pass: bool,
}

pub fn cross_validate(y: &DMatrix<f64>, b_null: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64) -> Result<CrossValidation> {
    if y.ncols() != b_null.nrows() || y.ncols() != b.nrows() {
        return Err(Error::Shape(format!(
            "regressor has {} columns, nullspace {} rows, complement {} rows",
            y.ncols(),
            b_null.nrows(),
            b.nrows()
        )));
    }
    let rank_yb = svd_rank(&(y * b), rank_tol);
    let rank_b = svd_rank(b, rank_tol);
    let residual_abs = (y * b_null).norm();
    let ynorm = y.norm();
    let residual_rel = if ynorm > 0.0 { residual_abs / ynorm } else { residual_abs };
    let residual_tol = tolerance::MEMBERSHIP_RESIDUAL;
    let rank_ok = rank_yb == rank_b;
    let residual_ok = residual_rel <= residual_tol;
    Ok(CrossValidation {
        rank_yb,
        rank_b,
        rank_ok,
        residual_abs,
        residual_rel,
        residual_tol,
        residual_ok,
        pass: rank_ok && residual_ok,
    })
}
