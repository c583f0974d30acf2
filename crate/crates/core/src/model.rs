//! Constrained kinematic-tree robot description.
//!
//! Bodies are numbered `1..=n` with the fixed base at index 0; tree joint
//! `i` connects body `parent[i]` to body `i`. Loop joints close kinematic
//! loops between `lparent[l] < lchild[l]`.
//!
//! Planar rotations caused by loop joints are not detected: a model must
//! be built so that planar rotations arise from tree joints only.

use std::fmt;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pga::{Line, Motor, Point};
use crate::rigid_body::FRAME_POINTS;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JointType {
    R,
    P,
    U,
    S,
    F,
}

impl JointType {
    /// Number of joint coordinates.
    pub fn dof(self) -> usize {
        match self {
            JointType::R | JointType::P => 1,
            JointType::U => 2,
            JointType::S => 3,
            JointType::F => 6,
        }
    }
}

impl fmt::Display for JointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            JointType::R => "R",
            JointType::P => "P",
            JointType::U => "U",
            JointType::S => "S",
            JointType::F => "F",
        };
        f.write_str(s)
    }
}

/// Uniform sampling box for the actuated coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// File form of a robot, one field per model attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotDescription {
    pub name: String,
    pub n: usize,
    #[serde(rename = "type")]
    pub joint_type: Vec<JointType>,
    pub parent: Vec<usize>,
    pub nl: usize,
    pub ltype: Vec<JointType>,
    pub lparent: Vec<usize>,
    pub lchild: Vec<usize>,
    /// Initial coordinates of all tree joints, concatenated by joint.
    pub q0: Vec<f64>,
    /// Actuated tree joints (body indices, 1-based).
    pub actuated: Vec<usize>,
    #[serde(rename = "M0")]
    pub m0: Vec<[f64; 8]>,
    #[serde(rename = "Ml")]
    pub ml: Vec<[f64; 8]>,
    #[serde(rename = "L0")]
    pub l0: Vec<[f64; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_pr: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_pr: Option<Vec<[f64; 3]>>,
    pub g: [f64; 6],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingBox>,
    #[serde(default)]
    pub provenance: String,
}

/// A validated robot model. Vectors indexed by body are 0-based
/// (`type_[i - 1]` is the joint of body `i`); stored body indices keep the
/// 1-based convention with 0 for the base.
#[derive(Clone, Debug)]
pub struct RobotModel {
    pub name: String,
    pub n: usize,
    pub joint_type: Vec<JointType>,
    pub parent: Vec<usize>,
    pub nl: usize,
    pub ltype: Vec<JointType>,
    pub lparent: Vec<usize>,
    pub lchild: Vec<usize>,
    pub q0: Vec<f64>,
    pub actuated: Vec<usize>,
    pub m0: Vec<Motor>,
    pub ml: Vec<Motor>,
    pub l0: Vec<Line>,
    pub is_pr: Vec<bool>,
    pub d_pr: Vec<Vector3<f64>>,
    pub g: Line,
    pub sampling: SamplingBox,
    pub provenance: String,
    /// Offset of each joint's first coordinate in the tree coordinate vector.
    pub q_offset: Vec<usize>,
}

fn model_err(field: &str, message: impl Into<String>) -> Error {
    Error::Model { field: field.to_string(), message: message.into() }
}

fn check_len(field: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(model_err(field, format!("expected {want} entries, found {got}")));
    }
    Ok(())
}

/// Joint axis line of a frame: rotation about its z axis for R, translation
/// along its z axis for P, zero otherwise.
pub fn joint_axis(frame: &Motor, joint: JointType) -> Line {
    let z = frame.apply_point(&FRAME_POINTS[2]).xyz;
    let o = frame.apply_point(&FRAME_POINTS[3]).xyz;
    match joint {
        JointType::R => Line::rotation_axis(z, o),
        JointType::P => Line::translation(z),
        _ => Line::ZERO,
    }
}

impl RobotModel {
    pub fn load(path: impl AsRef<Path>) -> Result<RobotModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Parse and validate a JSON description; `origin` names the source in
    /// diagnostics.
    pub fn from_json(text: &str, origin: &str) -> Result<RobotModel> {
        let desc: RobotDescription = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_description(desc)
    }

    pub fn from_description(desc: RobotDescription) -> Result<RobotModel> {
        let n = desc.n;
        let nl = desc.nl;
        if n == 0 {
            return Err(model_err("n", "a robot needs at least one body"));
        }
        check_len("type", desc.joint_type.len(), n)?;
        check_len("parent", desc.parent.len(), n)?;
        check_len("M0", desc.m0.len(), n)?;
        check_len("L0", desc.l0.len(), n)?;
        check_len("ltype", desc.ltype.len(), nl)?;
        check_len("lparent", desc.lparent.len(), nl)?;
        check_len("lchild", desc.lchild.len(), nl)?;
        check_len("Ml", desc.ml.len(), nl)?;

        for (k, &p) in desc.parent.iter().enumerate() {
            if p > k {
                return Err(model_err(
                    &format!("parent[{}]", k + 1),
                    format!("parent {p} must be smaller than body index {}", k + 1),
                ));
            }
        }
        for l in 0..nl {
            let (p, c) = (desc.lparent[l], desc.lchild[l]);
            if c == 0 || c > n || p > n {
                return Err(model_err(&format!("lchild[{}]", l + 1), format!("body index out of range (parent {p}, child {c})")));
            }
            if p >= c {
                return Err(model_err(
                    &format!("lparent[{}]", l + 1),
                    format!("loop parent {p} must be smaller than loop child {c}"),
                ));
            }
            if desc.ltype[l] == JointType::F {
                return Err(model_err(&format!("ltype[{}]", l + 1), "loop joints cannot be floating"));
            }
        }

        let mut q_offset = Vec::with_capacity(n);
        let mut nq = 0;
        for t in &desc.joint_type {
            q_offset.push(nq);
            nq += t.dof();
        }
        check_len("q0", desc.q0.len(), nq)?;

        let mut actuated = desc.actuated.clone();
        actuated.sort_unstable();
        actuated.dedup();
        if actuated.len() != desc.actuated.len() {
            return Err(model_err("actuated", "duplicate joint index"));
        }
        if let Some(&bad) = actuated.iter().find(|&&j| j == 0 || j > n) {
            return Err(model_err("actuated", format!("joint index {bad} out of range 1..={n}")));
        }
        if actuated.is_empty() {
            return Err(model_err("actuated", "at least one actuated joint is required"));
        }
        if nl == 0 && actuated.len() != n {
            return Err(model_err("actuated", "a tree robot must actuate every joint"));
        }
        let n_a: usize = actuated.iter().map(|&j| desc.joint_type[j - 1].dof()).sum();

        let motor = |field: String, c: [f64; 8]| {
            Motor::from_coeffs(c, tolerance::MOTOR_UNIT_FILE).map_err(|e| model_err(&field, e.to_string()))
        };
        let m0 = desc
            .m0
            .iter()
            .enumerate()
            .map(|(k, &c)| motor(format!("M0[{}]", k + 1), c))
            .collect::<Result<Vec<_>>>()?;
        let ml = desc
            .ml
            .iter()
            .enumerate()
            .map(|(k, &c)| motor(format!("Ml[{}]", k + 1), c))
            .collect::<Result<Vec<_>>>()?;

        let l0: Vec<Line> = desc.l0.iter().map(|&c| Line::from_array(c)).collect();
        for k in 0..n {
            let expected = joint_axis(&m0[k], desc.joint_type[k]);
            let err = (l0[k] - expected).max_abs();
            if err > tolerance::MOTOR_UNIT_FILE {
                return Err(model_err(
                    &format!("L0[{}]", k + 1),
                    format!(
                        "axis does not match the z axis of the {} joint frame (error {err:e})",
                        desc.joint_type[k]
                    ),
                ));
            }
        }

        let g = Line::from_array(desc.g);
        if g.dir.norm() != 0.0 {
            return Err(model_err("g", "gravity must be an ideal line (zero direction part)"));
        }

        let sampling = match desc.sampling {
            Some(b) => {
                check_len("sampling.min", b.min.len(), n_a)?;
                check_len("sampling.max", b.max.len(), n_a)?;
                if b.min.iter().zip(&b.max).any(|(lo, hi)| lo > hi || !lo.is_finite() || !hi.is_finite()) {
                    return Err(model_err("sampling", "each box needs finite min <= max"));
                }
                b
            }
            None => SamplingBox { min: vec![0.0; n_a], max: vec![1.0; n_a] },
        };

        let mut model = RobotModel {
            name: desc.name,
            n,
            joint_type: desc.joint_type,
            parent: desc.parent,
            nl,
            ltype: desc.ltype,
            lparent: desc.lparent,
            lchild: desc.lchild,
            q0: desc.q0,
            actuated,
            m0,
            ml,
            l0,
            is_pr: vec![false; n],
            d_pr: vec![Vector3::zeros(); n],
            g,
            sampling,
            provenance: desc.provenance,
            q_offset,
        };
        let (is_pr, d_pr) = pri(&model);
        if let Some(flags) = &desc.is_pr {
            check_len("is_pr", flags.len(), n)?;
            for k in 0..n {
                if (flags[k] != 0) != is_pr[k] {
                    return Err(model_err(
                        &format!("is_pr[{}]", k + 1),
                        format!("declared {} but the joint chain gives {}", flags[k], is_pr[k] as u8),
                    ));
                }
            }
        }
        if let Some(dirs) = &desc.d_pr {
            check_len("d_pr", dirs.len(), n)?;
            for k in 0..n {
                if (Vector3::from(dirs[k]) - d_pr[k]).amax() > tolerance::MOTOR_UNIT_FILE {
                    return Err(model_err(&format!("d_pr[{}]", k + 1), "declared direction disagrees with the joint chain"));
                }
            }
        }
        model.is_pr = is_pr;
        model.d_pr = d_pr;
        Ok(model)
    }

    pub fn to_description(&self) -> RobotDescription {
        RobotDescription {
            name: self.name.clone(),
            n: self.n,
            joint_type: self.joint_type.clone(),
            parent: self.parent.clone(),
            nl: self.nl,
            ltype: self.ltype.clone(),
            lparent: self.lparent.clone(),
            lchild: self.lchild.clone(),
            q0: self.q0.clone(),
            actuated: self.actuated.clone(),
            m0: self.m0.iter().map(|m| m.coeffs()).collect(),
            ml: self.ml.iter().map(|m| m.coeffs()).collect(),
            l0: self.l0.iter().map(|l| l.to_array()).collect(),
            is_pr: Some(self.is_pr.iter().map(|&b| b as u8).collect()),
            d_pr: Some(self.d_pr.iter().map(|d| [d.x, d.y, d.z]).collect()),
            g: self.g.to_array(),
            sampling: Some(self.sampling.clone()),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_description()).expect("description serializes")
    }

    /// A copy of the model with another gravity line.
    pub fn with_gravity(&self, g: Vector3<f64>) -> RobotModel {
        let mut m = self.clone();
        m.g = Line::ideal(g);
        m
    }

    /// Number of tree coordinates.
    pub fn nq(&self) -> usize {
        self.joint_type.iter().map(|t| t.dof()).sum()
    }

    /// Number of actuated coordinates.
    pub fn n_a(&self) -> usize {
        self.actuated.iter().map(|&j| self.joint_type[j - 1].dof()).sum()
    }

    /// Indices of actuated coordinates in the tree coordinate vector.
    pub fn actuated_coords(&self) -> Vec<usize> {
        self.coords_of(|j| self.actuated.binary_search(&j).is_ok())
    }

    /// Indices of passive coordinates in the tree coordinate vector.
    pub fn passive_coords(&self) -> Vec<usize> {
        self.coords_of(|j| self.actuated.binary_search(&j).is_err())
    }

    fn coords_of(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        for j in 1..=self.n {
            if keep(j) {
                let o = self.q_offset[j - 1];
                out.extend(o..o + self.joint_type[j - 1].dof());
            }
        }
        out
    }

    /// Joint frame origin of body `i` at the initial configuration.
    pub fn joint_origin(&self, i: usize) -> Point {
        self.m0[i - 1].apply_point(&FRAME_POINTS[3])
    }
}

fn is_zero3(v: &Vector3<f64>) -> bool {
    v.amax() <= tolerance::MODEL_ZERO
}

/// Planar-rotation indicator: flags bodies reached from the base through
/// R and P joints with mutually parallel rotation axes, and records the
/// common axis direction.
pub fn pri(model: &RobotModel) -> (Vec<bool>, Vec<Vector3<f64>>) {
    let n = model.n;
    let mut is_pr = vec![false; n];
    let mut d_pr = vec![Vector3::zeros(); n];
    let ld = |i: usize| model.l0[i - 1].dir;
    for i in 1..=n {
        let t = model.joint_type[i - 1];
        if t != JointType::R && t != JointType::P {
            continue;
        }
        let p = model.parent[i - 1];
        if p == 0 {
            is_pr[i - 1] = true;
            d_pr[i - 1] = ld(i);
        } else if is_pr[p - 1] && is_zero3(&ld(i).cross(&ld(p))) {
            is_pr[i - 1] = true;
            d_pr[i - 1] = if !is_zero3(&ld(p)) {
                ld(p)
            } else if !is_zero3(&d_pr[p - 1]) {
                d_pr[p - 1]
            } else {
                ld(i)
            };
        }
    }
    (is_pr, d_pr)
}
