//! Analytical dynamics-regressor nullspace from shared points, fixed points
//! and planar rotations, and its orthonormal complement.
//!
//! Parameter block `i` (rows `10(i-1)..10i`) holds `hat(N_i)` of body `i`.
//! Joint columns carry the child block with `+` sign and the parent block
//! with `-` sign; the fixed base has no block.

use nalgebra::{DMatrix, Vector3, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{JointType, RobotModel};
use crate::pga::{Line, Motor};
use crate::rigid_body::{hat_outer, hat_sym_outer, FRAME_POINTS};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Principle {
    SharedPoints,
    FixedPoints,
    PlanarRotation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    Tree,
    Loop,
}

/// Where a nullspace column comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnTag {
    pub principle: Principle,
    pub joint_kind: JointKind,
    /// Tree joint index (child body) or loop joint index, 1-based.
    pub joint: usize,
    pub joint_type: JointType,
    /// Points entering the relation, e.g. `zO` or `xx-yy`.
    pub relation: String,
    /// Bodies with a nonzero block.
    pub bodies: Vec<usize>,
}

/// A nullspace column stored by parameter blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct NullColumn {
    /// `(body, coefficients)` pairs with 1-based body indices.
    pub blocks: Vec<(usize, [f64; 10])>,
    pub tag: ColumnTag,
}

/// Columns spanning the regressor nullspace of a robot.
#[derive(Clone, Debug, PartialEq)]
pub struct NullspaceBasis {
    pub n: usize,
    pub columns: Vec<NullColumn>,
}

impl NullspaceBasis {
    pub fn d(&self) -> usize {
        self.columns.len()
    }

    /// Dense `10n x d` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(10 * self.n, self.columns.len());
        for (k, col) in self.columns.iter().enumerate() {
            for (body, v) in &col.blocks {
                for (r, x) in v.iter().enumerate() {
                    b[(10 * (body - 1) + r, k)] += x;
                }
            }
        }
        b
    }
}

/// Homogeneous coordinates of a joint's shared points under the spatial
/// assignment; identical for parent and child.
pub fn ssp(m0: &Motor, t: JointType) -> Vec<Vector4<f64>> {
    let pick: &[usize] = match t {
        JointType::R => &[2, 3],
        JointType::P => &[0, 1, 2],
        JointType::U | JointType::S => &[3],
        JointType::F => &[],
    };
    pick.iter().map(|&k| m0.apply_point(&FRAME_POINTS[k]).coords()).collect()
}

/// 1-based column index of the pair `(i, j)`, `1 <= i <= j <= n_s`.
pub fn jng_index(n_s: usize, i: usize, j: usize) -> usize {
    (2 * n_s + 2 - i) * (i - 1) / 2 + j - i + 1
}

const POINT_NAMES: [&str; 4] = ["x", "y", "z", "O"];

fn point_names(t: JointType) -> Vec<&'static str> {
    match t {
        JointType::R => vec!["z", "O"],
        JointType::P => vec!["x", "y", "z"],
        JointType::U | JointType::S => vec!["O"],
        JointType::F => vec![],
    }
}

/// Shared-point columns of one joint, ordered by the pair index.
pub fn jng(
    n_s: usize,
    p: usize,
    c: usize,
    cp: &[Vector4<f64>],
    cc: &[Vector4<f64>],
) -> Vec<Vec<(usize, [f64; 10])>> {
    let mut cols = vec![Vec::new(); n_s * (n_s + 1) / 2];
    for i in 1..=n_s {
        for j in i..=n_s {
            let k = jng_index(n_s, i, j);
            let (vp, vc) = if i == j {
                (hat_outer(&cp[j - 1]), hat_outer(&cc[j - 1]))
            } else {
                (hat_sym_outer(&cp[i - 1], &cp[j - 1]), hat_sym_outer(&cc[i - 1], &cc[j - 1]))
            };
            let col = &mut cols[k - 1];
            col.push((c, vc));
            if p > 0 {
                col.push((p, vp.map(|x| -x)));
            }
        }
    }
    cols
}

fn is_zero3(v: &Vector3<f64>) -> bool {
    v.amax() <= tolerance::MODEL_ZERO
}

fn sub10(a: [f64; 10], b: [f64; 10]) -> [f64; 10] {
    std::array::from_fn(|k| a[k] - b[k])
}

/// Frame coordinates `[x, y, z, O]` of a joint frame.
fn frame_coords(m: &Motor) -> [Vector4<f64>; 4] {
    FRAME_POINTS.map(|p| m.apply_point(&p).coords())
}

struct Emitter<'a> {
    out: &'a mut Vec<NullColumn>,
    kind: JointKind,
    joint: usize,
    joint_type: JointType,
}

impl Emitter<'_> {
    fn push(&mut self, principle: Principle, relation: String, blocks: Vec<(usize, [f64; 10])>) {
        let bodies = blocks.iter().map(|b| b.0).collect();
        self.out.push(NullColumn {
            blocks,
            tag: ColumnTag {
                principle,
                joint_kind: self.kind,
                joint: self.joint,
                joint_type: self.joint_type,
                relation,
                bodies,
            },
        });
    }

    fn shared_points(&mut self, m: &Motor, p: usize, c: usize) {
        let pts = ssp(m, self.joint_type);
        let names = point_names(self.joint_type);
        let n_s = pts.len();
        for (k, blocks) in jng(n_s, p, c, &pts, &pts).into_iter().enumerate() {
            let (i, j) = pair_of_index(n_s, k + 1);
            self.push(Principle::SharedPoints, format!("{}{}", names[i - 1], names[j - 1]), blocks);
        }
    }
}

fn pair_of_index(n_s: usize, k: usize) -> (usize, usize) {
    for i in 1..=n_s {
        for j in i..=n_s {
            if jng_index(n_s, i, j) == k {
                return (i, j);
            }
        }
    }
    unreachable!("index {k} outside 1..={}", n_s * (n_s + 1) / 2)
}

/// Nullspace columns of a tree joint.
fn tree_joint_columns(model: &RobotModel, i: usize, out: &mut Vec<NullColumn>) {
    let t = model.joint_type[i - 1];
    let p = model.parent[i - 1];
    let m0 = &model.m0[i - 1];
    let mut e = Emitter { out, kind: JointKind::Tree, joint: i, joint_type: t };

    // Principle 1: shared points.
    e.shared_points(m0, p, i);

    let c = frame_coords(m0);
    let sym = |a: usize, b: usize| hat_sym_outer(&c[a], &c[b]);
    let name = |a: usize, b: usize| format!("{}{}", POINT_NAMES[a], POINT_NAMES[b]);
    let (x, y, z, o) = (0, 1, 2, 3);
    let g_zero = model.g.max_abs() <= tolerance::MODEL_ZERO;

    // Principle 2: fixed points on bodies attached to the base.
    if p == 0 {
        let rel: Vec<(usize, usize)> = match t {
            JointType::S | JointType::U if g_zero => vec![(o, x), (o, y), (o, z)],
            JointType::P => vec![(o, x), (o, y), (o, z)],
            JointType::R => {
                if gravity_aligned(&model.l0[i - 1], &model.g) {
                    vec![(o, x), (o, y), (z, x), (z, y)]
                } else {
                    vec![(z, x), (z, y)]
                }
            }
            _ => vec![],
        };
        for (a, b) in rel {
            e.push(Principle::FixedPoints, name(a, b), vec![(i, sym(a, b))]);
        }
    }

    // Principle 3: planar rotations.
    if model.is_pr[i - 1] {
        match t {
            JointType::R => {
                let xx_yy = sub10(hat_outer(&c[x]), hat_outer(&c[y]));
                e.push(Principle::PlanarRotation, "xx-yy".into(), vec![(i, xx_yy)]);
                e.push(Principle::PlanarRotation, name(x, y), vec![(i, sym(x, y))]);
                if p != 0 {
                    e.push(Principle::PlanarRotation, name(z, x), vec![(i, sym(z, x))]);
                    e.push(Principle::PlanarRotation, name(z, y), vec![(i, sym(z, y))]);
                }
            }
            JointType::P if p != 0 && !is_zero3(&model.d_pr[i - 1]) => {
                let d = model.d_pr[i - 1];
                let cd = Vector4::new(d.x, d.y, d.z, 0.0);
                e.push(Principle::PlanarRotation, "dO".into(), vec![(i, hat_sym_outer(&cd, &c[o]))]);
                // Translation along the rotation axis transfers O-x and O-y
                // terms to the parent.
                let slide = Vector3::new(c[z].x, c[z].y, c[z].z);
                if is_zero3(&slide.cross(&d)) {
                    for a in [x, y] {
                        let v = sym(o, a);
                        e.push(Principle::PlanarRotation, name(o, a), vec![(i, v), (p, v.map(|s| -s))]);
                    }
                }
            }
            _ => {}
        }
    }
}

/// Analytical nullspace basis of the regressor.
pub fn drng(model: &RobotModel) -> NullspaceBasis {
    let mut columns = Vec::with_capacity(4 * (model.n + model.nl));
    for i in 1..=model.n {
        tree_joint_columns(model, i, &mut columns);
    }
    for l in 0..model.nl {
        let mut e = Emitter { out: &mut columns, kind: JointKind::Loop, joint: l + 1, joint_type: model.ltype[l] };
        e.shared_points(&model.ml[l], model.lparent[l], model.lchild[l]);
    }
    NullspaceBasis { n: model.n, columns }
}

/// Numerical rank from a column-pivoted QR with tolerance relative to the
/// Frobenius norm.
pub fn column_rank(b: &DMatrix<f64>, rel_tol: f64) -> usize {
    if b.ncols() == 0 || b.nrows() == 0 {
        return 0;
    }
    let tol = rel_tol * b.norm();
    let qr = b.clone().col_piv_qr();
    let r = qr.r();
    (0..r.nrows().min(r.ncols())).filter(|&k| r[(k, k)].abs() > tol).count()
}

/// Orthonormal basis of the orthogonal complement of `span(B_null)`.
pub fn complement(b_null: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, d) = b_null.shape();
    let rank = column_rank(b_null, tolerance::NULLSPACE_RANK_TOL);
    if rank < d {
        return Err(Error::RankDeficientNullspace { rank, columns: d });
    }
    let mut aug = DMatrix::zeros(rows, d + rows);
    aug.view_mut((0, 0), (rows, d)).copy_from(b_null);
    aug.view_mut((0, d), (rows, rows)).fill_with_identity();
    let q = aug.qr().q();
    Ok(q.columns(d, rows - d).into_owned())
}

/// `L0 x G` vanishes: the joint axis is aligned with gravity.
pub fn gravity_aligned(l0: &Line, g: &Line) -> bool {
    let c = l0.commutator(g);
    is_zero3(&c.dir) && is_zero3(&c.mom)
}
