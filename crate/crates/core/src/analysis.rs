//! End-to-end analysis, validation and timing of a robot model, producing
//! serializable reports.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::model::RobotModel;
use crate::nullspace::{complement, drng, ColumnTag, NullspaceBasis};
use crate::regressor::{random_samples, stack, Stacked};
use crate::tolerance;
use crate::validation::{cross_validate, numerical_base_analysis, CrossValidation, NumericalAnalysis};

/// Analytical nullspace and base space of a model.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub basis: NullspaceBasis,
    pub b_null: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub report: AnalysisReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub robot: String,
    pub bodies: usize,
    pub loop_joints: usize,
    /// Apparent acceleration of gravity (points fall along its negative).
    pub gravity: [f64; 3],
    pub parameters: usize,
    /// Nullspace dimension.
    pub d: usize,
    /// Number of base parameters, `10n - d`.
    pub base: usize,
    pub planar_rotation: Vec<bool>,
    pub columns: Vec<ColumnTag>,
}

pub fn analyze(model: &RobotModel) -> Result<Analysis> {
    let basis = drng(model);
    let b_null = basis.matrix();
    let b = complement(&b_null)?;
    let report = AnalysisReport {
        robot: model.name.clone(),
        bodies: model.n,
        loop_joints: model.nl,
        gravity: [model.g.mom.x, model.g.mom.y, model.g.mom.z],
        parameters: 10 * model.n,
        d: basis.d(),
        base: 10 * model.n - basis.d(),
        planar_rotation: model.is_pr.clone(),
        columns: basis.columns.iter().map(|c| c.tag.clone()).collect(),
    };
    Ok(Analysis { basis, b_null, b, report })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidateOptions {
    pub samples: usize,
    pub seed: u64,
    pub cond_gate: f64,
    pub rank_tol: f64,
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            samples: 100,
            seed: 0,
            cond_gate: tolerance::DEFAULT_COND_GATE,
            rank_tol: tolerance::DEFAULT_RANK_TOL,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleCounts {
    pub requested: usize,
    pub accepted: usize,
    pub out_of_workspace: usize,
    pub ill_conditioned: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub robot: String,
    pub gravity: [f64; 3],
    pub options: ValidateOptions,
    pub samples: SampleCounts,
    /// Rows and columns of the stacked regressor.
    pub regressor_shape: [usize; 2],
    pub d: usize,
    pub base: usize,
    pub numerical: NumericalAnalysis,
    /// Numerical rank equals `10n - d`.
    pub numerical_rank_agrees: bool,
    pub criteria: CrossValidation,
    pub pass: bool,
}

/// Validation outcome with the matrices it was computed from.
#[derive(Clone, Debug)]
pub struct Validation {
    pub analysis: Analysis,
    pub stacked: Stacked,
    pub report: ValidationReport,
}

pub fn validate(model: &RobotModel, opts: &ValidateOptions) -> Result<Validation> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let analysis = analyze(model)?;
    let kin = Kinematics::new(model);
    let samples = random_samples(model, opts.samples, opts.seed);
    let stacked = stack(&kin, &samples, opts.cond_gate, opts.parallel)?;
    let numerical = numerical_base_analysis(&stacked.y, opts.rank_tol)?;
    let criteria = cross_validate(&stacked.y, &analysis.b_null, &analysis.b, opts.rank_tol)?;
    let report = ValidationReport {
        robot: model.name.clone(),
        gravity: analysis.report.gravity,
        options: opts.clone(),
        samples: SampleCounts {
            requested: stacked.requested,
            accepted: stacked.accepted,
            out_of_workspace: stacked.out_of_workspace,
            ill_conditioned: stacked.ill_conditioned,
        },
        regressor_shape: [stacked.y.nrows(), stacked.y.ncols()],
        d: analysis.report.d,
        base: analysis.report.base,
        numerical_rank_agrees: numerical.rank == analysis.report.base,
        numerical,
        pass: criteria.pass,
        criteria,
    };
    Ok(Validation { analysis, stacked, report })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub robot: String,
    pub repetitions: usize,
    pub d: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Wall time of the nullspace construction over `repetitions` runs.
pub fn bench(model: &RobotModel, repetitions: usize) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut d = 0;
    for _ in 0..repetitions {
        let t = Instant::now();
        let basis = std::hint::black_box(drng(std::hint::black_box(model)));
        times.push(t.elapsed().as_secs_f64() * 1e3);
        d = basis.d();
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median_ms = if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) };
    Ok(BenchReport {
        robot: model.name.clone(),
        repetitions,
        d,
        median_ms,
        min_ms: times[0],
        max_ms: times[times.len() - 1],
    })
}
