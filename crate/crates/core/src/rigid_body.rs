//! Tetrahedral-point rigid body model.
//!
//! A body carries four trivectors: three directions and one Euclidean
//! origin. Its wrench is linear in the 4x4 pseudo-inertia `N`:
//! `w = sum_{m,n} N_mn (E_m v Edd_n)`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pga::{Line, Motor, Point};
use crate::tolerance;

/// Frame points `x, y, z, O` of the spatial frame.
pub const FRAME_POINTS: [Point; 4] = [
    Point { xyz: Vector3::new(1.0, 0.0, 0.0), w: 0.0 },
    Point { xyz: Vector3::new(0.0, 1.0, 0.0), w: 0.0 },
    Point { xyz: Vector3::new(0.0, 0.0, 1.0), w: 0.0 },
    Point { xyz: Vector3::new(0.0, 0.0, 0.0), w: 1.0 },
];

/// Positions, velocities and accelerations of a body's four tetrahedral
/// points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetrahedralPoints {
    pub pos: [Point; 4],
    pub vel: [Point; 4],
    pub acc: [Point; 4],
}

impl TetrahedralPoints {
    /// Points at rest at the columns of a rigid transform.
    pub fn initial(t0: &Matrix4<f64>) -> Result<Self> {
        // Validates rigidity.
        Motor::from_homogeneous(t0)?;
        let mut pos = [Point::default(); 4];
        for (k, p) in pos.iter_mut().enumerate() {
            *p = Point::from_coords(t0.column(k).into_owned());
        }
        let rest = [Point::default(); 4];
        Ok(TetrahedralPoints { pos, vel: rest, acc: rest })
    }

    /// The spatial frame points carried by a moving body.
    pub fn moving(m: &Motor, v: &Line, vdot: &Line, g: &Line) -> Self {
        let mut tp = TetrahedralPoints {
            pos: FRAME_POINTS,
            vel: FRAME_POINTS,
            acc: FRAME_POINTS,
        };
        for k in 0..4 {
            let (p, pd, pdd) = point_kinematics(&FRAME_POINTS[k], m, v, vdot, g);
            tp.pos[k] = p;
            tp.vel[k] = pd;
            tp.acc[k] = pdd;
        }
        tp
    }

    pub fn homogeneous(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&[
            self.pos[0].coords(),
            self.pos[1].coords(),
            self.pos[2].coords(),
            self.pos[3].coords(),
        ])
    }
}

/// Position, velocity and acceleration of a body point.
///
/// `G` is the apparent acceleration induced by gravity, folded into the
/// acceleration twist: `Pdd = P x (Vdot + G) + Pd x V`.
pub fn point_kinematics(p0: &Point, m: &Motor, v: &Line, vdot: &Line, g: &Line) -> (Point, Point, Point) {
    let p = m.apply_point(p0);
    let pd = p.cross_line(v);
    let pdd = p.cross_line(&(*vdot + *g)) + pd.cross_line(v);
    (p, pd, pdd)
}

/// The 4x4 symmetric pseudo-inertia `[[Sigma, h], [h^T, m]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoInertia(Matrix4<f64>);

impl PseudoInertia {
    pub fn new(n: Matrix4<f64>) -> Result<Self> {
        let asym = (n - n.transpose()).amax();
        if asym > tolerance::ALGEBRAIC * n.amax().max(1.0) {
            return Err(Error::AsymmetricInertia(asym));
        }
        Ok(PseudoInertia((n + n.transpose()) * 0.5))
    }

    /// From mass, centre of mass and rotational inertia about the frame
    /// origin: `Sigma = tr(J)/2 I - J`, `h = m c`.
    pub fn from_classical(mass: f64, com: Vector3<f64>, inertia: Matrix3<f64>) -> Result<Self> {
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::NonPositiveMass(mass));
        }
        let sigma = Matrix3::identity() * (0.5 * inertia.trace()) - inertia;
        let h = com * mass;
        let mut n = Matrix4::zeros();
        n.fixed_view_mut::<3, 3>(0, 0).copy_from(&sigma);
        n.fixed_view_mut::<3, 1>(0, 3).copy_from(&h);
        n.fixed_view_mut::<1, 3>(3, 0).copy_from(&h.transpose());
        n[(3, 3)] = mass;
        PseudoInertia::new(n)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn mass(&self) -> f64 {
        self.0[(3, 3)]
    }

    pub fn first_moment(&self) -> Vector3<f64> {
        self.0.fixed_view::<3, 1>(0, 3).into_owned()
    }

    /// Rotational inertia about the frame origin, `J = tr(Sigma) I - Sigma`.
    pub fn rotational_inertia(&self) -> Matrix3<f64> {
        let sigma: Matrix3<f64> = self.0.fixed_view::<3, 3>(0, 0).into_owned();
        Matrix3::identity() * sigma.trace() - sigma
    }

    /// Physical feasibility: positive definite.
    pub fn is_feasible(&self) -> bool {
        self.0.cholesky().is_some()
    }

    /// Inertia of the same body expressed in frame points moved by `m`
    /// (the body's own frame is carried along). Coordinates of a body
    /// point in the new frame are `T^-1 p`, so `N' = T^-1 N T^-T`.
    pub fn transformed(&self, m: &Motor) -> PseudoInertia {
        let t = m.to_homogeneous();
        let inv = t.try_inverse().expect("rigid transform is invertible");
        PseudoInertia((inv * self.0 * inv.transpose() + (inv * self.0 * inv.transpose()).transpose()) * 0.5)
    }

    pub fn hat(&self) -> InertiaVector {
        InertiaVector(hat(&self.0))
    }
}

/// Ten inertial parameters `(MXX, MXY, MXZ, MYY, MYZ, MZZ, MX, MY, MZ, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InertiaVector(pub [f64; 10]);

impl InertiaVector {
    pub fn unhat(&self) -> PseudoInertia {
        PseudoInertia(unhat(&self.0))
    }
}

/// Index pairs (row, col) in hat/bar order.
pub const HAT_ORDER: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (0, 3), (1, 3), (2, 3), (3, 3)];

/// `(N11, N12, N13, N22, N23, N33, N14, N24, N34, N44)` of a symmetric matrix.
pub fn hat(n: &Matrix4<f64>) -> [f64; 10] {
    HAT_ORDER.map(|(r, c)| n[(r, c)])
}

pub fn hat_checked(n: &Matrix4<f64>) -> Result<[f64; 10]> {
    PseudoInertia::new(*n).map(|p| hat(p.matrix()))
}

pub fn unhat(v: &[f64; 10]) -> Matrix4<f64> {
    let mut n = Matrix4::zeros();
    for (k, &(r, c)) in HAT_ORDER.iter().enumerate() {
        n[(r, c)] = v[k];
        n[(c, r)] = v[k];
    }
    n
}

/// Folds a 4x4 coefficient matrix onto the hat ordering so that
/// `bar(R) . hat(N) = sum_mn R_mn N_mn` for symmetric `N`.
pub fn bar(r: &Matrix4<f64>) -> [f64; 10] {
    HAT_ORDER.map(|(i, j)| if i == j { r[(i, i)] } else { r[(i, j)] + r[(j, i)] })
}

/// `hat(c c^T)`.
pub fn hat_outer(c: &nalgebra::Vector4<f64>) -> [f64; 10] {
    hat(&(c * c.transpose()))
}

/// `hat(c1 c2^T + c2 c1^T)`.
pub fn hat_sym_outer(c1: &nalgebra::Vector4<f64>, c2: &nalgebra::Vector4<f64>) -> [f64; 10] {
    hat(&(c1 * c2.transpose() + c2 * c1.transpose()))
}

/// Wrench of a body from its tetrahedral points: `sum N_mn (E_m v Edd_n)`.
pub fn tp_wrench(n: &PseudoInertia, tp: &TetrahedralPoints) -> Line {
    let mut w = Line::ZERO;
    for m in 0..4 {
        for k in 0..4 {
            let nmk = n.0[(m, k)];
            if nmk != 0.0 {
                w += tp.pos[m].vee(&tp.acc[k]) * nmk;
            }
        }
    }
    w
}

/// Dynamics regressor coefficient: the `e0123` part of `L ^ (E_m v Edd_n)`.
pub fn regressor_coeff(l: &Line, em: &Point, edd_n: &Point) -> f64 {
    l.pairing(&em.vee(edd_n))
}

/// Wrench bivector `(force; moment about origin)` as classical 6-vectors.
///
/// Bivector slots `(e23, e31, e12)` carry the force and `(e01, e02, e03)`
/// the moment about the spatial origin. Twists use the same slots for
/// `(omega; v)`, where `v` is the velocity of the body point at the origin.
pub mod classical {
    use nalgebra::{Vector3, Vector6};

    use crate::pga::Line;

    /// Featherstone force vector `(n_O; f)`.
    pub fn wrench_to_force(w: &Line) -> Vector6<f64> {
        Vector6::new(w.mom.x, w.mom.y, w.mom.z, w.dir.x, w.dir.y, w.dir.z)
    }

    pub fn force_to_wrench(f: &Vector6<f64>) -> Line {
        Line::new(Vector3::new(f[3], f[4], f[5]), Vector3::new(f[0], f[1], f[2]))
    }

    /// Featherstone motion vector `(omega; v_O)`.
    pub fn twist_to_motion(v: &Line) -> Vector6<f64> {
        Vector6::new(v.dir.x, v.dir.y, v.dir.z, v.mom.x, v.mom.y, v.mom.z)
    }

    pub fn motion_to_twist(m: &Vector6<f64>) -> Line {
        Line::new(Vector3::new(m[0], m[1], m[2]), Vector3::new(m[3], m[4], m[5]))
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::tolerance::ALGEBRAIC;
    use nalgebra::Vector4;
    use proptest::prelude::*;

    fn mat4() -> impl Strategy<Value = Matrix4<f64>> {
        prop::array::uniform16(-3.0f64..3.0).prop_map(|c| Matrix4::from_column_slice(&c))
    }

    fn sym4() -> impl Strategy<Value = Matrix4<f64>> {
        mat4().prop_map(|a| (a + a.transpose()) * 0.5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn hat_unhat_round_trip(n in sym4()) {
            prop_assert_eq!(unhat(&hat(&n)), n);
            let v = hat(&n);
            prop_assert_eq!(hat(&unhat(&v)), v);
        }

        #[test]
        fn bar_contracts_with_hat(r in mat4(), n in sym4()) {
            let lhs: f64 = bar(&r).iter().zip(hat(&n).iter()).map(|(a, b)| a * b).sum();
            let rhs = r.component_mul(&n).sum();
            prop_assert!((lhs - rhs).abs() <= ALGEBRAIC * (1.0 + rhs.abs()));
        }

        #[test]
        fn outer_forms_match_matrix_hat(c1 in prop::array::uniform4(-2.0f64..2.0), c2 in prop::array::uniform4(-2.0f64..2.0)) {
            let (a, b) = (Vector4::from(c1), Vector4::from(c2));
            prop_assert_eq!(hat_outer(&a), hat(&(a * a.transpose())));
            let s = hat_sym_outer(&a, &b);
            let m = hat(&(a * b.transpose() + b * a.transpose()));
            prop_assert!(s.iter().zip(m.iter()).all(|(x, y)| (x - y).abs() <= ALGEBRAIC));
        }
    }
}
