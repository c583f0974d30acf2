//! Demo robots: Puma560, a Go2-like quadruped, a 2RRU-1RRS PKM and a
//! 2PRS-1PSR PKM. Builders construct the models from geometry; the same
//! models ship as JSON files under `robots/`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Rotation3, Unit, Vector3};

use crate::error::Result;
use crate::model::{joint_axis, JointType, RobotDescription, RobotModel, SamplingBox};
use crate::pga::Motor;

pub const PUMA560_JSON: &str = include_str!("../../../robots/puma560.json");
pub const GO2_JSON: &str = include_str!("../../../robots/go2.json");
pub const RRU_RRS_JSON: &str = include_str!("../../../robots/2rru1rrs.json");
pub const PRS_PSR_JSON: &str = include_str!("../../../robots/2prs1psr.json");

/// Names of the bundled robots.
pub const NAMES: [&str; 4] = ["puma560", "go2", "2rru1rrs", "2prs1psr"];

/// A bundled robot by name, loaded from its shipped description.
pub fn bundled(name: &str) -> Option<Result<RobotModel>> {
    let text = match name {
        "puma560" => PUMA560_JSON,
        "go2" => GO2_JSON,
        "2rru1rrs" => RRU_RRS_JSON,
        "2prs1psr" => PRS_PSR_JSON,
        _ => return None,
    };
    Some(RobotModel::from_json(text, &format!("robots/{name}.json")))
}

/// Builder of a bundled robot by name.
pub fn build(name: &str) -> Option<RobotModel> {
    match name {
        "puma560" => Some(puma560()),
        "go2" => Some(go2()),
        "2rru1rrs" => Some(rru_rrs()),
        "2prs1psr" => Some(prs_psr()),
        _ => None,
    }
}

/// Motor of a frame with rotation `rot` and origin `origin`.
pub fn frame(rot: Rotation3<f64>, origin: Vector3<f64>) -> Motor {
    let mut t = Matrix4::identity();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(rot.matrix());
    t.fixed_view_mut::<3, 1>(0, 3).copy_from(&origin);
    Motor::from_homogeneous(&t).expect("rotation matrices are rigid")
}

/// Rotation taking the z axis onto `axis`.
pub fn z_onto(axis: Vector3<f64>) -> Rotation3<f64> {
    let a = axis.normalize();
    Rotation3::rotation_between(&Vector3::z(), &a)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), PI))
}

/// Incrementally assembled description.
struct Builder {
    desc: RobotDescription,
}

impl Builder {
    fn new(name: &str, g: Vector3<f64>, provenance: &str) -> Builder {
        Builder {
            desc: RobotDescription {
                name: name.into(),
                n: 0,
                joint_type: vec![],
                parent: vec![],
                nl: 0,
                ltype: vec![],
                lparent: vec![],
                lchild: vec![],
                q0: vec![],
                actuated: vec![],
                m0: vec![],
                ml: vec![],
                l0: vec![],
                is_pr: None,
                d_pr: None,
                g: [0.0, 0.0, 0.0, g.x, g.y, g.z],
                sampling: None,
                provenance: provenance.into(),
            },
        }
    }

    /// Adds a tree joint and returns the new body index.
    fn joint(&mut self, t: JointType, parent: usize, m0: Motor, q0: &[f64], actuated: bool) -> usize {
        assert_eq!(q0.len(), t.dof());
        let d = &mut self.desc;
        d.n += 1;
        d.joint_type.push(t);
        d.parent.push(parent);
        d.m0.push(m0.coeffs());
        d.l0.push(joint_axis(&m0, t).to_array());
        d.q0.extend_from_slice(q0);
        if actuated {
            d.actuated.push(d.n);
        }
        d.n
    }

    fn loop_joint(&mut self, t: JointType, parent: usize, child: usize, ml: Motor) {
        let d = &mut self.desc;
        d.nl += 1;
        d.ltype.push(t);
        d.lparent.push(parent);
        d.lchild.push(child);
        d.ml.push(ml.coeffs());
    }

    fn sampling(&mut self, min: Vec<f64>, max: Vec<f64>) {
        self.desc.sampling = Some(SamplingBox { min, max });
    }

    fn finish(self) -> RobotModel {
        RobotModel::from_description(self.desc).expect("demo robot is valid")
    }
}

/// Standard DH transform `Rz(theta) Tz(d) Tx(a) Rx(alpha)`.
fn dh(theta: f64, d: f64, a: f64, alpha: f64) -> Matrix4<f64> {
    let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), theta).to_homogeneous();
    let rx = Rotation3::from_axis_angle(&Vector3::x_axis(), alpha).to_homogeneous();
    let mut tz = Matrix4::identity();
    tz[(2, 3)] = d;
    let mut tx = Matrix4::identity();
    tx[(0, 3)] = a;
    rz * tz * tx * rx
}

/// Standard DH parameters `(d, a, alpha)` of the Puma560.
pub const PUMA560_DH: [(f64, f64, f64); 6] = [
    (0.0, 0.0, PI / 2.0),
    (0.0, 0.4318, 0.0),
    (0.15005, 0.0203, -PI / 2.0),
    (0.4318, 0.0, PI / 2.0),
    (0.0, 0.0, -PI / 2.0),
    (0.0, 0.0, 0.0),
];

/// Joint frames of the Puma560 at zero joint angles (frame `i-1` carries
/// joint `i`).
pub fn puma560_joint_frames() -> Vec<Matrix4<f64>> {
    let mut t = Matrix4::identity();
    let mut frames = Vec::new();
    for &(d, a, alpha) in &PUMA560_DH {
        frames.push(t);
        t *= dh(0.0, d, a, alpha);
    }
    frames
}

pub fn puma560() -> RobotModel {
    let mut b = Builder::new(
        "puma560",
        Vector3::new(0.0, 0.0, 9.81),
        "Six-axis arm with the standard DH parameters of the Puma560 \
         (d = [0, 0, 0.15005, 0.4318, 0, 0] m, a = [0, 0.4318, 0.0203, 0, 0, 0] m, \
         alpha = [pi/2, 0, -pi/2, pi/2, -pi/2, 0]); initial configuration at zero joint angles. \
         Actuated coordinates are sampled on (0, 1).",
    );
    for (k, t) in puma560_joint_frames().iter().enumerate() {
        b.joint(JointType::R, k, Motor::from_homogeneous(t).unwrap(), &[0.0], true);
    }
    b.finish()
}

pub fn go2() -> RobotModel {
    let mut b = Builder::new(
        "go2",
        Vector3::new(0.0, 0.0, 9.81),
        "Quadruped with a floating trunk and four hip-thigh-calf legs. Hip joints (axis x) at \
         (+-0.1934, +-0.0465, 0) m, thigh joints (axis y) offset 0.0955 m laterally, calf joints \
         (axis y) 0.213 m below the thigh joints, following the published Unitree Go2 kinematics. \
         Initial configuration: trunk at the origin, legs straight down. Coordinates sampled on (0, 1).",
    );
    let trunk = b.joint(JointType::F, 0, Motor::IDENTITY, &[0.0; 6], true);
    let x_axis = z_onto(Vector3::x());
    let y_axis = z_onto(Vector3::y());
    // FR, FL, RR, RL.
    for (sx, sy) in [(1.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (-1.0, 1.0)] {
        let hip_o = Vector3::new(0.1934 * sx, 0.0465 * sy, 0.0);
        let thigh_o = hip_o + Vector3::new(0.0, 0.0955 * sy, 0.0);
        let calf_o = thigh_o + Vector3::new(0.0, 0.0, -0.213);
        let hip = b.joint(JointType::R, trunk, frame(x_axis, hip_o), &[0.0], true);
        let thigh = b.joint(JointType::R, hip, frame(y_axis, thigh_o), &[0.0], true);
        b.joint(JointType::R, thigh, frame(y_axis, calf_o), &[0.0], true);
    }
    b.finish()
}

/// 2RRU-1RRS PKM. The RRS chain (axes along x, in the plane x = 0) carries
/// the platform through a tree S joint; the two RRU chains (axes along y, in
/// the plane y = 0) close on the platform through loop U joints whose
/// platform-side axis is the line joining the U centres.
pub fn rru_rrs() -> RobotModel {
    rru_rrs_with(0.6, 0.5, -0.5, 0.3, 0.8)
}

/// 2RRU-1RRS with base pivots at radius `base_r`, cranks of length `crank`
/// tilted outward by `phi` from vertical, and platform joints at radius
/// `top_r` and height `top_h`.
pub fn rru_rrs_with(base_r: f64, crank: f64, phi: f64, top_r: f64, top_h: f64) -> RobotModel {
    let mut b = Builder::new(
        "2rru1rrs",
        Vector3::new(0.0, 0.0, 9.81),
        &format!(
            "Geometry chosen for this library (link lengths do not change the nullspace dimension). \
             Chains at outward directions -y (RRS, axes along x) and +-x (RRU, axes along y). Base pivots \
             at radius {base_r} m; cranks of length {crank} m tilted {phi} rad outward from vertical; \
             platform joints at radius {top_r} m and height {top_h} m. U axes: platform x then link y. \
             Actuated: first R of each chain, sampled in boxes of width 5pi/18 rad centred on the \
             initial configuration."
        ),
    );
    let ax = z_onto(Vector3::x());
    let ay = z_onto(Vector3::y());
    let id = Rotation3::identity();
    // Pivot, knee and platform joint of a chain along outward direction `u`.
    let chain = |u: Vector3<f64>| {
        let a = u * base_r;
        let k = a + (u * phi.sin() + Vector3::z() * phi.cos()) * crank;
        let c = u * top_r + Vector3::z() * top_h;
        (a, k, c)
    };
    let (a3, k3, c3) = chain(-Vector3::y());
    let r3a = b.joint(JointType::R, 0, frame(ax, a3), &[0.0], true);
    let r3b = b.joint(JointType::R, r3a, frame(ax, k3), &[0.0], false);
    let platform = b.joint(JointType::S, r3b, frame(id, c3), &[0.0; 3], false);
    for sx in [1.0, -1.0] {
        let (a, k, c) = chain(Vector3::x() * sx);
        let ra = b.joint(JointType::R, 0, frame(ay, a), &[0.0], true);
        let rb = b.joint(JointType::R, ra, frame(ay, k), &[0.0], false);
        b.loop_joint(JointType::U, platform, rb, frame(id, c));
    }
    let half = 5.0 * PI / 36.0;
    b.sampling(vec![-half; 3], vec![half; 3]);
    b.finish()
}

/// 2PRS-1PSR PKM. Three vertical sliders at 120 degree spacing. The first
/// PRS chain carries the platform through a tree S joint; the second closes
/// through a loop S joint; the PSR chain closes through a loop R joint.
pub fn prs_psr() -> RobotModel {
    let mut b = Builder::new(
        "2prs1psr",
        Vector3::new(0.0, 0.0, 9.81),
        "Geometry chosen for this library. Sliders along z at radius 0.4 m and azimuths 0, 120, 240 \
         degrees; R joints and the PSR-side S joint 0.2 m above the slider base; platform joints at \
         radius 0.2 m and height 0.5 m. R axes are horizontal and tangential. Actuated: the three \
         sliders, sampled in boxes with widths (0.24, 0.10, 0.23) m centred on the initial configuration.",
    );
    let id = Rotation3::identity();
    let radial = |k: usize| {
        let t = 2.0 * PI * k as f64 / 3.0;
        Vector3::new(t.cos(), t.sin(), 0.0)
    };
    let tangent = |k: usize| Vector3::z().cross(&radial(k));
    let base = |k: usize| radial(k) * 0.4;
    let knee = |k: usize| radial(k) * 0.4 + Vector3::new(0.0, 0.0, 0.2);
    let top = |k: usize| radial(k) * 0.2 + Vector3::new(0.0, 0.0, 0.5);

    let p1 = b.joint(JointType::P, 0, frame(id, base(0)), &[0.0], true);
    let r1 = b.joint(JointType::R, p1, frame(z_onto(tangent(0)), knee(0)), &[0.0], false);
    let platform = b.joint(JointType::S, r1, frame(id, top(0)), &[0.0; 3], false);
    let p2 = b.joint(JointType::P, 0, frame(id, base(1)), &[0.0], true);
    let r2 = b.joint(JointType::R, p2, frame(z_onto(tangent(1)), knee(1)), &[0.0], false);
    let p3 = b.joint(JointType::P, 0, frame(id, base(2)), &[0.0], true);
    let link = b.joint(JointType::S, p3, frame(id, knee(2)), &[0.0; 3], false);
    b.loop_joint(JointType::S, platform, r2, frame(id, top(1)));
    b.loop_joint(JointType::R, platform, link, frame(z_onto(tangent(2)), top(2)));
    b.sampling(vec![-0.12, -0.05, -0.115], vec![0.12, 0.05, 0.115]);
    b.finish()
}

/// Serial chain of `n` R joints with alternating perpendicular axes, used
/// for scaling measurements.
pub fn serial_chain(n: usize) -> RobotModel {
    let mut b = Builder::new("serial", Vector3::new(0.0, 0.0, 9.81), "Synthetic serial chain.");
    let axes = [Vector3::z(), Vector3::y(), Vector3::x()];
    let mut parent = 0;
    for k in 0..n {
        let axis = axes[k % 3];
        let o = Vector3::new(0.1 * k as f64, 0.05 * (k % 2) as f64, 0.2 * k as f64);
        let m = frame(z_onto(axis), o);
        parent = b.joint(JointType::R, parent, m, &[0.0], true);
    }
    b.finish()
}

/// Rotation about a unit axis, for callers building custom frames.
pub fn axis_angle(axis: Vector3<f64>, angle: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle)
}
