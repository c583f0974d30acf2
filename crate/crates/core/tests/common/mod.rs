//! Independent reference computations for the acceptance suite. Nothing here
//! goes through the geometric algebra code paths.

use nalgebra::{Matrix3, Matrix4, Matrix6, Rotation3, Vector3, Vector6};

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Classical rigid body: mass, centre of mass and inertia about the centre
/// of mass, all in the body frame.
#[derive(Clone, Copy, Debug)]
pub struct ClassicalBody {
    pub mass: f64,
    pub com: Vector3<f64>,
    pub inertia_com: Matrix3<f64>,
}

impl ClassicalBody {
    /// Inertia about the body frame origin (parallel axis theorem).
    pub fn inertia_origin(&self) -> Matrix3<f64> {
        let c = self.com;
        self.inertia_com + (Matrix3::identity() * c.dot(&c) - c * c.transpose()) * self.mass
    }

    /// `sum m p p^T` extended homogeneously: `[[Sigma, m c], [m c^T, m]]`.
    pub fn pseudo_inertia(&self) -> Matrix4<f64> {
        let j = self.inertia_origin();
        let sigma = Matrix3::identity() * (0.5 * j.trace()) - j;
        let mut n = Matrix4::zeros();
        n.fixed_view_mut::<3, 3>(0, 0).copy_from(&sigma);
        let h = self.com * self.mass;
        n.fixed_view_mut::<3, 1>(0, 3).copy_from(&h);
        n.fixed_view_mut::<1, 3>(3, 0).copy_from(&h.transpose());
        n[(3, 3)] = self.mass;
        n
    }

    /// 6x6 spatial inertia at the world origin for `(omega; v_O)` ordering,
    /// with the body placed at rotation `r` and origin `p`.
    pub fn spatial_inertia(&self, r: &Matrix3<f64>, p: &Vector3<f64>) -> Matrix6<f64> {
        let c = r * self.com + p;
        let ic = r * self.inertia_com * r.transpose();
        let cx = skew(&c);
        let m = self.mass;
        let mut i6 = Matrix6::zeros();
        i6.fixed_view_mut::<3, 3>(0, 0).copy_from(&(ic - cx * cx * m));
        i6.fixed_view_mut::<3, 3>(0, 3).copy_from(&(cx * m));
        i6.fixed_view_mut::<3, 3>(3, 0).copy_from(&(-cx * m));
        i6.fixed_view_mut::<3, 3>(3, 3).copy_from(&(Matrix3::identity() * m));
        i6
    }
}

/// Spatial force cross product `v x*` for `(omega; v_O)` motion vectors.
pub fn cross_force(v: &Vector6<f64>) -> Matrix6<f64> {
    let w = skew(&v.fixed_rows::<3>(0).into_owned());
    let u = skew(&v.fixed_rows::<3>(3).into_owned());
    let mut x = Matrix6::zeros();
    x.fixed_view_mut::<3, 3>(0, 0).copy_from(&w);
    x.fixed_view_mut::<3, 3>(0, 3).copy_from(&u);
    x.fixed_view_mut::<3, 3>(3, 3).copy_from(&w);
    x
}

/// Spatial Newton-Euler force `(n_O; f)` for velocity `v` and acceleration
/// `a` (gravity already folded into `a` as an upward base acceleration).
pub fn newton_euler(i6: &Matrix6<f64>, v: &Vector6<f64>, a: &Vector6<f64>) -> Vector6<f64> {
    i6 * a + cross_force(v) * (i6 * v)
}

/// Standard DH transform `Rz(theta) Tz(d) Tx(a) Rx(alpha)`, written out.
pub fn dh_matrix(theta: f64, d: f64, a: f64, alpha: f64) -> Matrix4<f64> {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    Matrix4::new(
        ct, -st * ca, st * sa, a * ct, //
        st, ct * ca, -ct * sa, a * st, //
        0.0, sa, ca, d, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// World poses of DH link frames `1..=n` at joint angles `q`.
pub fn dh_poses(dh: &[(f64, f64, f64)], q: &[f64]) -> Vec<Matrix4<f64>> {
    let mut t = Matrix4::identity();
    dh.iter()
        .zip(q)
        .map(|(&(d, a, alpha), &qi)| {
            t *= dh_matrix(qi, d, a, alpha);
            t
        })
        .collect()
}

/// Recursive Newton-Euler for a serial revolute chain in standard DH form,
/// computed in world coordinates. Link `i` carries `bodies[i]` expressed in
/// DH frame `i+1`. `base_acc` is the upward acceleration standing in for
/// gravity.
pub fn rnea_dh(
    dh: &[(f64, f64, f64)],
    bodies: &[ClassicalBody],
    q: &[f64],
    qd: &[f64],
    qdd: &[f64],
    base_acc: Vector3<f64>,
) -> Vec<f64> {
    let n = dh.len();
    let poses = dh_poses(dh, q);
    let origin = |k: usize| -> Vector3<f64> {
        if k == 0 {
            Vector3::zeros()
        } else {
            poses[k - 1].fixed_view::<3, 1>(0, 3).into_owned()
        }
    };
    let z_axis = |k: usize| -> Vector3<f64> {
        if k == 0 {
            Vector3::z()
        } else {
            poses[k - 1].fixed_view::<3, 1>(0, 2).into_owned()
        }
    };
    let (mut w, mut wd, mut a_o) = (Vector3::zeros(), Vector3::zeros(), base_acc);
    let mut ac = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    let mut wds = Vec::with_capacity(n);
    let mut coms = Vec::with_capacity(n);
    let mut ics = Vec::with_capacity(n);
    for i in 0..n {
        let z = z_axis(i);
        let wd_new = wd + z * qdd[i] + w.cross(&z) * qd[i];
        let w_new = w + z * qd[i];
        let r_i = poses[i].fixed_view::<3, 1>(0, 3).into_owned() - origin(i);
        a_o += wd_new.cross(&r_i) + w_new.cross(&w_new.cross(&r_i));
        w = w_new;
        wd = wd_new;
        let rot: Matrix3<f64> = poses[i].fixed_view::<3, 3>(0, 0).into_owned();
        let c = rot * bodies[i].com + origin(i + 1);
        let rc = c - origin(i + 1);
        ac.push(a_o + wd.cross(&rc) + w.cross(&w.cross(&rc)));
        ws.push(w);
        wds.push(wd);
        coms.push(c);
        ics.push(rot * bodies[i].inertia_com * rot.transpose());
    }
    let mut tau = vec![0.0; n];
    let (mut f_next, mut n_next) = (Vector3::zeros(), Vector3::zeros());
    for i in (0..n).rev() {
        let fi = ac[i] * bodies[i].mass + f_next;
        let o = origin(i);
        let ni = ics[i] * wds[i]
            + ws[i].cross(&(ics[i] * ws[i]))
            + (coms[i] - o).cross(&(ac[i] * bodies[i].mass))
            + n_next
            + (origin(i + 1) - o).cross(&f_next);
        tau[i] = ni.dot(&z_axis(i));
        f_next = fi;
        n_next = ni;
    }
    tau
}

/// Random physically consistent body from three uniforms per field.
pub fn random_body(rng: &mut impl rand::Rng) -> ClassicalBody {
    let mass = rng.gen_range(0.5..5.0);
    let com = Vector3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let s = Vector3::new(rng.gen_range(0.01..0.2), rng.gen_range(0.01..0.2), rng.gen_range(0.01..0.2)) * mass;
    let principal = Matrix3::from_diagonal(&Vector3::new(s.y + s.z, s.x + s.z, s.x + s.y));
    let r = random_rotation(rng);
    let inertia = r * principal * r.transpose();
    ClassicalBody { mass, com, inertia_com: (inertia + inertia.transpose()) * 0.5 }
}

pub fn random_rotation(rng: &mut impl rand::Rng) -> Matrix3<f64> {
    let axis = loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            break v;
        }
    };
    let angle = rng.gen_range(-3.0..3.0);
    *Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(1.0)
}
