//! Dynamics regressor of a robot from body states, its stacking over
//! random samples, and matrix export.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{BodyState, Kinematics};
use crate::model::RobotModel;
use crate::pga::Line;
use crate::rigid_body::{bar, regressor_coeff, tp_wrench, PseudoInertia, TetrahedralPoints};

/// Regressor `Y` (`n_a x 10n`) of one state: column block `i` holds
/// `bar(R_i)` with `R_i[m][n] = Jv_i .^ (E_m v Edd_n)`.
pub fn dr(states: &[BodyState], g: &Line) -> DMatrix<f64> {
    let n = states.len();
    let n_a = states.first().map_or(0, |s| s.jv.len());
    let mut y = DMatrix::zeros(n_a, 10 * n);
    for (i, s) in states.iter().enumerate() {
        let tp = TetrahedralPoints::moving(&s.m, &s.v, &s.vdot, g);
        for (j, l) in s.jv.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let mut r = Matrix4::zeros();
            for m in 0..4 {
                for k in 0..4 {
                    r[(m, k)] = regressor_coeff(l, &tp.pos[m], &tp.acc[k]);
                }
            }
            for (c, v) in bar(&r).iter().enumerate() {
                y[(j, 10 * i + c)] = *v;
            }
        }
    }
    y
}

/// Generalized actuated forces from body wrenches: `tau_j = sum_i L^i_j ^ w_i`.
pub fn generalized_forces(states: &[BodyState], inertias: &[PseudoInertia], g: &Line) -> DVector<f64> {
    let n_a = states.first().map_or(0, |s| s.jv.len());
    let mut tau = DVector::zeros(n_a);
    for (s, n) in states.iter().zip(inertias) {
        let tp = TetrahedralPoints::moving(&s.m, &s.v, &s.vdot, g);
        let w = tp_wrench(n, &tp);
        for (j, l) in s.jv.iter().enumerate() {
            tau[j] += l.pairing(&w);
        }
    }
    tau
}

/// Stacked inertial parameters `[hat(N_1); ...; hat(N_n)]`.
pub fn parameter_vector(inertias: &[PseudoInertia]) -> DVector<f64> {
    DVector::from_iterator(10 * inertias.len(), inertias.iter().flat_map(|n| n.hat().0))
}

/// Actuated positions, rates and accelerations of one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub q_a: Vec<f64>,
    pub qd_a: Vec<f64>,
    pub qdd_a: Vec<f64>,
}

/// Seeded samples: `q_a` uniform in the model's box, rates and
/// accelerations uniform on (0, 1).
pub fn random_samples(model: &RobotModel, count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_a = model.n_a();
    (0..count)
        .map(|_| {
            let q_a = (0..n_a)
                .map(|k| {
                    let (lo, hi) = (model.sampling.min[k], model.sampling.max[k]);
                    if lo == hi {
                        lo
                    } else {
                        rng.gen_range(lo..hi)
                    }
                })
                .collect();
            let qd_a = (0..n_a).map(|_| rng.gen::<f64>()).collect();
            let qdd_a = (0..n_a).map(|_| rng.gen::<f64>()).collect();
            Sample { q_a, qd_a, qdd_a }
        })
        .collect()
}

/// Outcome of evaluating one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Accepted,
    OutOfWorkspace,
    IllConditioned,
}

/// Stacked regressor with sample bookkeeping.
#[derive(Clone, Debug)]
pub struct Stacked {
    pub y: DMatrix<f64>,
    pub requested: usize,
    pub accepted: usize,
    pub out_of_workspace: usize,
    pub ill_conditioned: usize,
    pub status: Vec<SampleStatus>,
}

fn evaluate(kin: &Kinematics, s: &Sample, cond_gate: f64) -> (SampleStatus, Option<DMatrix<f64>>) {
    match kin.body_states(&s.q_a, &s.qd_a, &s.qdd_a, None) {
        Ok(st) if st.cond < cond_gate => (SampleStatus::Accepted, Some(dr(&st.bodies, &kin.model().g))),
        Ok(_) | Err(Error::Singular { .. }) => (SampleStatus::IllConditioned, None),
        Err(_) => (SampleStatus::OutOfWorkspace, None),
    }
}

/// Regressors of all samples stacked in sample order. Samples whose loops
/// cannot close or whose passive Jacobian has condition number at or above
/// `cond_gate` are rejected and counted.
pub fn stack(kin: &Kinematics, samples: &[Sample], cond_gate: f64, parallel: bool) -> Result<Stacked> {
    let results: Vec<_> = if parallel {
        samples.par_iter().map(|s| evaluate(kin, s, cond_gate)).collect()
    } else {
        samples.iter().map(|s| evaluate(kin, s, cond_gate)).collect()
    };
    let status: Vec<SampleStatus> = results.iter().map(|r| r.0).collect();
    let count = |st: SampleStatus| status.iter().filter(|&&s| s == st).count();
    let blocks: Vec<&DMatrix<f64>> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    if blocks.is_empty() {
        return Err(Error::NoAcceptedSamples {
            requested: samples.len(),
            out_of_workspace: count(SampleStatus::OutOfWorkspace),
            ill_conditioned: count(SampleStatus::IllConditioned),
        });
    }
    let (rows, cols) = blocks[0].shape();
    let mut y = DMatrix::zeros(rows * blocks.len(), cols);
    for (k, b) in blocks.iter().enumerate() {
        y.view_mut((k * rows, 0), (rows, cols)).copy_from(b);
    }
    Ok(Stacked {
        y,
        requested: samples.len(),
        accepted: blocks.len(),
        out_of_workspace: count(SampleStatus::OutOfWorkspace),
        ill_conditioned: count(SampleStatus::IllConditioned),
        status,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Comma-separated rows with full round-trip precision.
pub fn to_csv(y: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..y.nrows() {
        let row: Vec<String> = (0..y.ncols()).map(|c| format!("{:e}", y[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(y: &DMatrix<f64>, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(y)).map_err(io_err(path))
}

/// Binary dump: `u64` rows, `u64` cols, then `f64` row-major, all
/// little-endian.
pub fn to_binary(y: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * y.len());
    out.extend_from_slice(&(y.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(y.ncols() as u64).to_le_bytes());
    for r in 0..y.nrows() {
        for c in 0..y.ncols() {
            out.extend_from_slice(&y[(r, c)].to_le_bytes());
        }
    }
    out
}

pub fn from_binary(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let word = |k: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * k..8 * k + 8)
            .map(|s| s.try_into().expect("eight bytes"))
            .ok_or_else(|| Error::Shape("binary matrix is truncated".into()))
    };
    let rows = u64::from_le_bytes(word(0)?) as usize;
    let cols = u64::from_le_bytes(word(1)?) as usize;
    let len = rows.checked_mul(cols).ok_or_else(|| Error::Shape("binary matrix header overflows".into()))?;
    if bytes.len() != 16 + 8 * len {
        return Err(Error::Shape(format!("binary matrix {rows}x{cols} needs {} bytes, found {}", 16 + 8 * len, bytes.len())));
    }
    let mut y = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            y[(r, c)] = f64::from_le_bytes(word(2 + r * cols + c)?);
        }
    }
    Ok(y)
}

pub fn write_binary(y: &DMatrix<f64>, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&to_binary(y)).map_err(io_err(path))
}

pub fn read_binary(path: &Path) -> Result<DMatrix<f64>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(io_err(path))?;
    from_binary(&bytes)
}
