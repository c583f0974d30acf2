//! Forward kinematics of the constrained tree, loop closure, and the body
//! states (motor, twist, twist rate, Jacobian lines) consumed by the
//! regressor.
//!
//! Multi-DOF joints are expanded into chains of 1-DOF virtual joints about
//! the axes of their joint frame: U = rotations about x then y; S =
//! rotations about x, y, z; F = translations along x, y, z then rotations
//! about x, y, z. Virtual joint k carries tree coordinate k.
//!
//! Body displacements use the spatial assignment: the displacement of
//! virtual joint k is `exp((q_k - q0_k) L0_k / 2)` followed by the
//! displacement of its parent, so every body sits at the identity motor
//! when `q = q0`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::model::{JointType, RobotModel};
use crate::pga::{motor_exp, Line, Motor, Point};
use crate::rigid_body::{point_kinematics, FRAME_POINTS};
use crate::tolerance;

/// Increments of the continuation fallback in [`Kinematics::close`].
const CONTINUATION_STEPS: usize = 16;

/// Kinematic state of one body in the spatial frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyState {
    pub m: Motor,
    pub v: Line,
    pub vdot: Line,
    /// Jacobian lines with respect to the actuated coordinates.
    pub jv: Vec<Line>,
}

/// Loop-closure residual with its Jacobians over actuated and passive
/// coordinates.
#[derive(Clone, Debug)]
pub struct LoopResidual {
    pub c: DVector<f64>,
    pub j_a: DMatrix<f64>,
    pub j_p: DMatrix<f64>,
}

/// Result of a loop-closure solve.
#[derive(Clone, Debug)]
pub struct LoopSolution {
    /// Full tree coordinates.
    pub q: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Full state of the robot at one sample.
#[derive(Clone, Debug)]
pub struct RobotState {
    pub q: Vec<f64>,
    pub qd: Vec<f64>,
    pub qdd: Vec<f64>,
    pub bodies: Vec<BodyState>,
    /// Condition number of the passive constraint Jacobian (1 without loops).
    pub cond: f64,
}

/// Motors, twists and twist rates of every virtual joint.
#[derive(Clone, Debug)]
pub struct TreeState {
    pub d: Vec<Motor>,
    pub v: Vec<Line>,
    pub vdot: Vec<Line>,
    /// Current joint axes.
    pub axes: Vec<Line>,
}

/// Precomputed kinematic structure of a model.
#[derive(Clone, Debug)]
pub struct Kinematics {
    model: RobotModel,
    axis0: Vec<Line>,
    vparent: Vec<Option<usize>>,
    body_last: Vec<usize>,
    on_path: Vec<Vec<bool>>,
    act: Vec<usize>,
    pas: Vec<usize>,
    loop_points: Vec<[Point; 4]>,
}

/// One scalar constraint with its first and second time derivatives.
#[derive(Clone, Copy, Debug, Default)]
struct Term {
    val: f64,
    d1: f64,
    d2: f64,
}

/// Position, velocity, acceleration of a point, as 3-vectors.
#[derive(Clone, Copy)]
struct Pk {
    p: Vector3<f64>,
    v: Vector3<f64>,
    a: Vector3<f64>,
}

impl Pk {
    fn component(&self, k: usize) -> Term {
        Term { val: self.p[k], d1: self.v[k], d2: self.a[k] }
    }

    fn sub(&self, o: &Pk) -> Pk {
        Pk { p: self.p - o.p, v: self.v - o.v, a: self.a - o.a }
    }

    fn dot(&self, o: &Pk) -> Term {
        Term {
            val: self.p.dot(&o.p),
            d1: self.v.dot(&o.p) + self.p.dot(&o.v),
            d2: self.a.dot(&o.p) + 2.0 * self.v.dot(&o.v) + self.p.dot(&o.a),
        }
    }
}

fn virtual_axes(model: &RobotModel, body: usize) -> Vec<Line> {
    let t = model.joint_type[body - 1];
    let m = &model.m0[body - 1];
    let dir = |k: usize| m.apply_point(&FRAME_POINTS[k]).xyz;
    let o = m.apply_point(&FRAME_POINTS[3]).xyz;
    let rot = |k: usize| Line::rotation_axis(dir(k), o);
    match t {
        JointType::R | JointType::P => vec![model.l0[body - 1]],
        JointType::U => vec![rot(0), rot(1)],
        JointType::S => vec![rot(0), rot(1), rot(2)],
        JointType::F => vec![
            Line::translation(dir(0)),
            Line::translation(dir(1)),
            Line::translation(dir(2)),
            rot(0),
            rot(1),
            rot(2),
        ],
    }
}

impl Kinematics {
    pub fn new(model: &RobotModel) -> Kinematics {
        let nq = model.nq();
        let mut axis0 = Vec::with_capacity(nq);
        let mut vparent = Vec::with_capacity(nq);
        let mut body_last = Vec::with_capacity(model.n);
        let mut on_path: Vec<Vec<bool>> = Vec::with_capacity(model.n);
        for i in 1..=model.n {
            let p = model.parent[i - 1];
            let mut prev = if p == 0 { None } else { Some(body_last[p - 1]) };
            let mut path = if p == 0 { vec![false; nq] } else { on_path[p - 1].clone() };
            for axis in virtual_axes(model, i) {
                let k = axis0.len();
                axis0.push(axis);
                vparent.push(prev);
                path[k] = true;
                prev = Some(k);
            }
            body_last.push(prev.expect("every joint has a coordinate"));
            on_path.push(path);
        }
        let loop_points = model
            .ml
            .iter()
            .map(|m| {
                let mut pts = FRAME_POINTS;
                for p in pts.iter_mut() {
                    *p = m.apply_point(p);
                }
                pts
            })
            .collect();
        Kinematics {
            model: model.clone(),
            axis0,
            vparent,
            body_last,
            on_path,
            act: model.actuated_coords(),
            pas: model.passive_coords(),
            loop_points,
        }
    }

    pub fn model(&self) -> &RobotModel {
        &self.model
    }

    pub fn actuated_coords(&self) -> &[usize] {
        &self.act
    }

    pub fn passive_coords(&self) -> &[usize] {
        &self.pas
    }

    /// Initial axis of each virtual joint.
    pub fn initial_axes(&self) -> &[Line] {
        &self.axis0
    }

    /// Recursive tree kinematics for full coordinates and rates.
    pub fn tree(&self, q: &[f64], qd: &[f64], qdd: &[f64]) -> TreeState {
        let nq = self.axis0.len();
        let mut s = TreeState {
            d: Vec::with_capacity(nq),
            v: Vec::with_capacity(nq),
            vdot: Vec::with_capacity(nq),
            axes: Vec::with_capacity(nq),
        };
        for k in 0..nq {
            let (dp, vp, vdp) = match self.vparent[k] {
                Some(p) => (s.d[p], s.v[p], s.vdot[p]),
                None => (Motor::IDENTITY, Line::ZERO, Line::ZERO),
            };
            let axis = dp.apply_line(&self.axis0[k]);
            let d = motor_exp(&(self.axis0[k] * ((q[k] - self.model.q0[k]) / 2.0))).then(&dp);
            s.d.push(d);
            s.v.push(vp + axis * qd[k]);
            s.vdot.push(vdp + axis.commutator(&vp) * qd[k] + axis * qdd[k]);
            s.axes.push(axis);
        }
        s
    }

    /// Body motors for full tree coordinates.
    pub fn forward_tree(&self, q: &[f64]) -> Vec<Motor> {
        let zero = vec![0.0; q.len()];
        let s = self.tree(q, &zero, &zero);
        self.body_last.iter().map(|&k| s.d[k]).collect()
    }

    fn body(&self, s: &TreeState, b: usize) -> (Motor, Line, Line) {
        if b == 0 {
            (Motor::IDENTITY, Line::ZERO, Line::ZERO)
        } else {
            let k = self.body_last[b - 1];
            (s.d[k], s.v[k], s.vdot[k])
        }
    }

    fn loop_terms(&self, l: usize, parent: (Motor, Line, Line), child: (Motor, Line, Line), out: &mut Vec<Term>) {
        let pk = |p: &Point, (m, v, vd): (Motor, Line, Line)| {
            let (p, pd, pdd) = point_kinematics(p, &m, &v, &vd, &Line::ZERO);
            Pk { p: p.xyz, v: pd.xyz, a: pdd.xyz }
        };
        let pts = &self.loop_points[l];
        let [xp, yp, zp, op] = [0, 1, 2, 3].map(|k| pk(&pts[k], parent));
        let [xc, yc, zc, oc] = [0, 1, 2, 3].map(|k| pk(&pts[k], child));
        let gap = oc.sub(&op);
        match self.model.ltype[l] {
            JointType::S => out.extend((0..3).map(|k| gap.component(k))),
            JointType::U => {
                out.extend((0..3).map(|k| gap.component(k)));
                out.push(xp.dot(&yc));
            }
            JointType::R => {
                out.extend((0..3).map(|k| gap.component(k)));
                out.push(zc.dot(&xp));
                out.push(zc.dot(&yp));
            }
            JointType::P => {
                out.push(xp.dot(&yc));
                out.push(yp.dot(&zc));
                out.push(zp.dot(&xc));
                out.push(gap.dot(&xp));
                out.push(gap.dot(&yp));
            }
            JointType::F => unreachable!("loop joints are never floating"),
        }
    }

    fn constraint_terms(&self, s: &TreeState) -> Vec<Term> {
        let mut out = Vec::new();
        for l in 0..self.model.nl {
            let parent = self.body(s, self.model.lparent[l]);
            let child = self.body(s, self.model.lchild[l]);
            self.loop_terms(l, parent, child, &mut out);
        }
        out
    }

    /// Constraint residual and its Jacobians at full coordinates `q`.
    pub fn loop_residual(&self, q: &[f64]) -> LoopResidual {
        let nq = q.len();
        let zero = vec![0.0; nq];
        let s = self.tree(q, &zero, &zero);
        let c: Vec<f64> = self.constraint_terms(&s).iter().map(|t| t.val).collect();
        let rows = c.len();
        let mut jac = DMatrix::zeros(rows, nq);
        let mut unit = s.clone();
        for k in 0..nq {
            // Body twists for a unit rate of coordinate k.
            for j in 0..nq {
                unit.v[j] = if self.vparent_chain_contains(j, k) { s.axes[k] } else { Line::ZERO };
            }
            let col = self.constraint_terms(&unit);
            for (r, t) in col.iter().enumerate() {
                jac[(r, k)] = t.d1;
            }
        }
        LoopResidual {
            c: DVector::from_vec(c),
            j_a: jac.select_columns(&self.act),
            j_p: jac.select_columns(&self.pas),
        }
    }

    /// Whether virtual joint `j` moves with coordinate `k`.
    fn vparent_chain_contains(&self, j: usize, k: usize) -> bool {
        let mut cur = Some(j);
        while let Some(c) = cur {
            if c == k {
                return true;
            }
            if c < k {
                return false;
            }
            cur = self.vparent[c];
        }
        false
    }

    /// Gauss-Newton solve of the loop constraints over the passive
    /// coordinates of `q` (actuated entries are held fixed).
    pub fn loop_solve(&self, q: &[f64]) -> Result<LoopSolution> {
        let mut q = q.to_vec();
        if self.model.nl == 0 {
            return Ok(LoopSolution { q, residual: 0.0, iterations: 0 });
        }
        let mut res = self.loop_residual(&q);
        for it in 0..=tolerance::LOOP_MAX_ITERATIONS {
            let inf = res.c.amax();
            if inf < tolerance::LOOP_CLOSURE {
                // One polishing step, kept if it lowers the residual.
                if let Ok((trial, r)) = self.gauss_newton_step(&q, &res, 1.0) {
                    if r.c.amax() < inf {
                        return Ok(LoopSolution { q: trial, residual: r.c.amax(), iterations: it + 1 });
                    }
                }
                return Ok(LoopSolution { q, residual: inf, iterations: it });
            }
            if it == tolerance::LOOP_MAX_ITERATIONS || !inf.is_finite() {
                break;
            }
            let norm0 = res.c.norm();
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let (trial, r) = self.gauss_newton_step(&q, &res, alpha)?;
                if r.c.norm() < norm0 {
                    q = trial;
                    res = r;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Err(Error::OutOfWorkspace { residual: res.c.amax(), iterations: tolerance::LOOP_MAX_ITERATIONS })
    }

    /// Passive coordinates after a damped Gauss-Newton step, with their residual.
    fn gauss_newton_step(&self, q: &[f64], res: &LoopResidual, alpha: f64) -> Result<(Vec<f64>, LoopResidual)> {
        let svd = res.j_p.clone().svd(true, true);
        let step = svd
            .solve(&res.c, 1e-14 * svd.singular_values.max())
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut trial = q.to_vec();
        for (i, &k) in self.pas.iter().enumerate() {
            trial[k] -= alpha * step[i];
        }
        let r = self.loop_residual(&trial);
        Ok((trial, r))
    }

    /// Sensitivity `dq_p/dq_a = -J_p^+ J_a` and the condition number of `J_p`.
    pub fn sensitivity(&self, res: &LoopResidual) -> Result<(DMatrix<f64>, f64)> {
        let n_p = self.pas.len();
        if n_p == 0 {
            return Ok((DMatrix::zeros(0, self.act.len()), 1.0));
        }
        let svd = res.j_p.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = smax / smin;
        if !(smin > 0.0) || !cond.is_finite() || res.j_p.nrows() < n_p {
            return Err(Error::Singular { cond: f64::INFINITY });
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok((-(pinv * &res.j_a), cond))
    }

    /// Jacobian lines of every body from current axes and the passive
    /// sensitivity.
    pub fn jacobian_lines(&self, axes: &[Line], sens: &DMatrix<f64>) -> Vec<Vec<Line>> {
        let n_a = self.act.len();
        // dq_k / dq_a for every tree coordinate k.
        let nq = axes.len();
        let mut dq = DMatrix::zeros(nq, n_a);
        for (j, &k) in self.act.iter().enumerate() {
            dq[(k, j)] = 1.0;
        }
        for (i, &k) in self.pas.iter().enumerate() {
            for j in 0..n_a {
                dq[(k, j)] = sens[(i, j)];
            }
        }
        self.on_path
            .iter()
            .map(|path| {
                (0..n_a)
                    .map(|j| {
                        let mut l = Line::ZERO;
                        for k in 0..nq {
                            if path[k] && dq[(k, j)] != 0.0 {
                                l += axes[k] * dq[(k, j)];
                            }
                        }
                        l
                    })
                    .collect()
            })
            .collect()
    }

    /// Full coordinates from actuated values, with passive entries taken
    /// from `guess` (or `q0`).
    pub fn assemble(&self, q_a: &[f64], guess: Option<&[f64]>) -> Vec<f64> {
        let mut q = guess.map(|g| g.to_vec()).unwrap_or_else(|| self.model.q0.clone());
        for (j, &k) in self.act.iter().enumerate() {
            q[k] = q_a[j];
        }
        q
    }

    /// Passive coordinates closing the loops at `q_a`. When the direct
    /// solve from the guess fails, the actuated coordinates are moved from
    /// the guess to `q_a` in increments, each solve starting from the last.
    pub fn close(&self, q_a: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let direct = self.loop_solve(&self.assemble(q_a, guess));
        let err = match direct {
            Ok(sol) => return Ok(sol.q),
            Err(e) => e,
        };
        let mut q = guess.map(|g| g.to_vec()).unwrap_or_else(|| self.model.q0.clone());
        let start: Vec<f64> = self.act.iter().map(|&k| q[k]).collect();
        for step in 1..=CONTINUATION_STEPS {
            let t = step as f64 / CONTINUATION_STEPS as f64;
            let qa: Vec<f64> = start.iter().zip(q_a).map(|(a, b)| a + t * (b - a)).collect();
            q = match self.loop_solve(&self.assemble(&qa, Some(&q))) {
                Ok(sol) => sol.q,
                Err(_) => return Err(err),
            };
        }
        Ok(q)
    }

    /// Close the loops and evaluate every body's motor, twist, twist rate
    /// and Jacobian lines.
    pub fn body_states(&self, q_a: &[f64], qd_a: &[f64], qdd_a: &[f64], guess: Option<&[f64]>) -> Result<RobotState> {
        let n_a = self.act.len();
        if q_a.len() != n_a || qd_a.len() != n_a || qdd_a.len() != n_a {
            return Err(Error::Shape(format!("expected {n_a} actuated coordinates")));
        }
        let q = self.close(q_a, guess)?;
        let nq = q.len();
        let res = self.loop_residual(&q);
        let (sens, cond) = self.sensitivity(&res)?;

        let mut qd = vec![0.0; nq];
        let mut qdd = vec![0.0; nq];
        for (j, &k) in self.act.iter().enumerate() {
            qd[k] = qd_a[j];
            qdd[k] = qdd_a[j];
        }
        let qd_p = &sens * DVector::from_column_slice(qd_a);
        for (i, &k) in self.pas.iter().enumerate() {
            qd[k] = qd_p[i];
        }
        if !self.pas.is_empty() {
            // Second derivative of the constraints with zero passive
            // acceleration; the passive accelerations cancel it.
            let s0 = self.tree(&q, &qd, &qdd);
            let bias = DVector::from_vec(self.constraint_terms(&s0).iter().map(|t| t.d2).collect());
            let svd = res.j_p.clone().svd(true, true);
            let qdd_p = svd.solve(&bias, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for (i, &k) in self.pas.iter().enumerate() {
                qdd[k] = -qdd_p[i];
            }
        }
        let s = self.tree(&q, &qd, &qdd);
        let jv = self.jacobian_lines(&s.axes, &sens);
        let bodies = self
            .body_last
            .iter()
            .zip(jv)
            .map(|(&k, jv)| BodyState { m: s.d[k], v: s.v[k], vdot: s.vdot[k], jv })
            .collect();
        Ok(RobotState { q, qd, qdd, bodies, cond })
    }
}
