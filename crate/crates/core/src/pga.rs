//! The projective geometric algebra G(3,0,1).
//!
//! Multivectors are stored as 16 coefficients over the blade basis
//!
//! ```text
//! 1, e0, e1, e2, e3, e01, e02, e03, e23, e31, e12, e021, e013, e032, e123, e0123
//! ```
//!
//! Planes are grade-1, lines (and twists, wrenches) grade-2, points grade-3.
//! Every product is generated from a single Cayley table computed at compile
//! time from the bitmask form of each blade, so sign conventions live in one
//! place: [`BLADES`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Rotation3, UnitQuaternion, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::tolerance;

/// Blade index constants into [`Multivector::0`].
pub mod blade {
    pub const S: usize = 0;
    pub const E0: usize = 1;
    pub const E1: usize = 2;
    pub const E2: usize = 3;
    pub const E3: usize = 4;
    pub const E01: usize = 5;
    pub const E02: usize = 6;
    pub const E03: usize = 7;
    pub const E23: usize = 8;
    pub const E31: usize = 9;
    pub const E12: usize = 10;
    pub const E021: usize = 11;
    pub const E013: usize = 12;
    pub const E032: usize = 13;
    pub const E123: usize = 14;
    pub const E0123: usize = 15;
}

/// Named blades as (bitmask over e0..e3, sign relative to the ascending
/// canonical product). `e31 = -e13`, `e021 = -e012`, `e032 = -e023`.
pub const BLADES: [(u8, i8); 16] = [
    (0b0000, 1),
    (0b0001, 1),
    (0b0010, 1),
    (0b0100, 1),
    (0b1000, 1),
    (0b0011, 1),
    (0b0101, 1),
    (0b1001, 1),
    (0b1100, 1),
    (0b1010, -1),
    (0b0110, 1),
    (0b0111, -1),
    (0b1011, 1),
    (0b1101, -1),
    (0b1110, 1),
    (0b1111, 1),
];

pub const BLADE_NAMES: [&str; 16] = [
    "1", "e0", "e1", "e2", "e3", "e01", "e02", "e03", "e23", "e31", "e12", "e021", "e013", "e032",
    "e123", "e0123",
];

const GRADES: [u8; 16] = [0, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4];

/// Dual pairs: 1<->e0123, e0<->e123, e1<->e032, e2<->e013, e3<->e021,
/// e01<->e23, e02<->e31, e03<->e12.
const DUAL: [usize; 16] = [15, 14, 13, 12, 11, 8, 9, 10, 5, 6, 7, 4, 3, 2, 1, 0];

const fn blade_index(mask: u8) -> usize {
    let mut i = 0;
    while i < 16 {
        if BLADES[i].0 == mask {
            return i;
        }
        i += 1;
    }
    panic!("unknown blade mask");
}

/// Sign of reordering the concatenation of two ascending blades.
const fn reorder_sign(a: u8, b: u8) -> i8 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// (result index, sign) for every ordered pair of named blades. Sign 0
/// marks a vanishing product.
const fn build_table(outer: bool) -> [[(u8, i8); 16]; 16] {
    let mut table = [[(0u8, 0i8); 16]; 16];
    let mut i = 0;
    while i < 16 {
        let mut j = 0;
        while j < 16 {
            let (ma, sa) = BLADES[i];
            let (mb, sb) = BLADES[j];
            let common = ma & mb;
            // e0 squares to zero; outer products vanish on any shared factor.
            let vanishes = if outer { common != 0 } else { common & 1 != 0 };
            if !vanishes {
                let m = ma ^ mb;
                let k = blade_index(m);
                let s = sa * sb * reorder_sign(ma, mb) * BLADES[k].1;
                table[i][j] = (k as u8, s);
            }
            j += 1;
        }
        i += 1;
    }
    table
}

const GEOMETRIC_TABLE: [[(u8, i8); 16]; 16] = build_table(false);
const OUTER_TABLE: [[(u8, i8); 16]; 16] = build_table(true);

/// A general element of G(3,0,1).
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Multivector(pub [f64; 16]);

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "Multivector(")?;
        for (c, name) in self.0.iter().zip(BLADE_NAMES) {
            if *c != 0.0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{c}*{name}")?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Multivector {
    pub const ZERO: Multivector = Multivector([0.0; 16]);

    pub fn scalar(s: f64) -> Self {
        Self::basis(blade::S) * s
    }

    /// The basis blade with the given index and unit coefficient.
    pub fn basis(index: usize) -> Self {
        let mut c = [0.0; 16];
        c[index] = 1.0;
        Multivector(c)
    }

    fn product_with(&self, other: &Self, table: &[[(u8, i8); 16]; 16]) -> Self {
        let mut out = [0.0; 16];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let (k, s) = table[i][j];
                if s != 0 {
                    out[k as usize] += f64::from(s) * a * b;
                }
            }
        }
        Multivector(out)
    }

    pub fn geometric(&self, other: &Self) -> Self {
        self.product_with(other, &GEOMETRIC_TABLE)
    }

    /// Outer product (meet).
    pub fn wedge(&self, other: &Self) -> Self {
        self.product_with(other, &OUTER_TABLE)
    }

    /// Regressive product (join), `(a* ^ b*)*`.
    pub fn vee(&self, other: &Self) -> Self {
        self.dual().wedge(&other.dual()).dual()
    }

    pub fn dual(&self) -> Self {
        let mut out = [0.0; 16];
        for (i, &c) in self.0.iter().enumerate() {
            out[DUAL[i]] = c;
        }
        Multivector(out)
    }

    pub fn reverse(&self) -> Self {
        let mut out = self.0;
        for (c, g) in out.iter_mut().zip(GRADES) {
            if g == 2 || g == 3 {
                *c = -*c;
            }
        }
        Multivector(out)
    }

    pub fn grade(&self, k: u8) -> Self {
        let mut out = [0.0; 16];
        for (i, g) in GRADES.iter().enumerate() {
            if *g == k {
                out[i] = self.0[i];
            }
        }
        Multivector(out)
    }

    /// Commutator product `(X V - V X) / 2`.
    pub fn commutator(&self, other: &Self) -> Self {
        (self.geometric(other) - other.geometric(self)) * 0.5
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Self) -> Self {
        self.geometric(&rhs)
    }
}

/// A plane `a x + b y + c z + d = 0`, stored over `(e1, e2, e3, e0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Plane {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Plane { a, b, c, d }
    }

    pub fn to_mv(self) -> Multivector {
        let mut c = [0.0; 16];
        c[blade::E1] = self.a;
        c[blade::E2] = self.b;
        c[blade::E3] = self.c;
        c[blade::E0] = self.d;
        Multivector(c)
    }

    pub fn from_mv(mv: &Multivector) -> Self {
        Plane::new(mv.0[blade::E1], mv.0[blade::E2], mv.0[blade::E3], mv.0[blade::E0])
    }
}

/// A bivector in Plücker coordinates `(dir; mom)` over
/// `(e23, e31, e12; e01, e02, e03)`.
///
/// As a geometric line `dir` is the direction and `mom` the moment. As a
/// twist the parts are `(omega; v)`; as a wrench `(force; torque)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Line {
    pub dir: Vector3<f64>,
    pub mom: Vector3<f64>,
}

impl Line {
    pub const ZERO: Line = Line {
        dir: Vector3::new(0.0, 0.0, 0.0),
        mom: Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn new(dir: Vector3<f64>, mom: Vector3<f64>) -> Self {
        Line { dir, mom }
    }

    pub fn from_array(c: [f64; 6]) -> Self {
        Line::new(Vector3::new(c[0], c[1], c[2]), Vector3::new(c[3], c[4], c[5]))
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.dir.x, self.dir.y, self.dir.z, self.mom.x, self.mom.y, self.mom.z]
    }

    /// Unit-speed rotation about the axis with direction `dir` through `point`.
    pub fn rotation_axis(dir: Vector3<f64>, point: Vector3<f64>) -> Self {
        let d = dir.normalize();
        Point::euclidean(point).vee(&Point::direction(d))
    }

    /// Unit-speed translation along `dir` (an infinite line).
    pub fn translation(dir: Vector3<f64>) -> Self {
        Line::new(Vector3::zeros(), dir.normalize())
    }

    /// Pure translational bivector with the given ideal part.
    pub fn ideal(mom: Vector3<f64>) -> Self {
        Line::new(Vector3::zeros(), mom)
    }

    pub fn to_mv(self) -> Multivector {
        let mut c = [0.0; 16];
        c[blade::E23] = self.dir.x;
        c[blade::E31] = self.dir.y;
        c[blade::E12] = self.dir.z;
        c[blade::E01] = self.mom.x;
        c[blade::E02] = self.mom.y;
        c[blade::E03] = self.mom.z;
        Multivector(c)
    }

    pub fn from_mv(mv: &Multivector) -> Self {
        Line::new(
            Vector3::new(mv.0[blade::E23], mv.0[blade::E31], mv.0[blade::E12]),
            Vector3::new(mv.0[blade::E01], mv.0[blade::E02], mv.0[blade::E03]),
        )
    }

    /// The `e0123` coefficient of `self ^ other`: the power of a wrench on
    /// a twist, or the reciprocal product of two lines.
    pub fn pairing(&self, other: &Line) -> f64 {
        self.dir.dot(&other.mom) + self.mom.dot(&other.dir)
    }

    /// Line-line commutator `(A B - B A) / 2` restricted to its bivector part.
    pub fn commutator(&self, other: &Line) -> Line {
        // Equivalent to Line::from_mv(&self.to_mv().commutator(&other.to_mv())),
        // expanded by hand for the hot loops.
        Line::new(
            -self.dir.cross(&other.dir),
            -(self.dir.cross(&other.mom) + self.mom.cross(&other.dir)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.dir == Vector3::zeros() && self.mom == Vector3::zeros()
    }

    pub fn max_abs(&self) -> f64 {
        self.dir.amax().max(self.mom.amax())
    }

    /// Plücker condition `dir . mom`, zero for geometric lines.
    pub fn plucker_residual(&self) -> f64 {
        self.dir.dot(&self.mom)
    }
}

impl Add for Line {
    type Output = Line;
    fn add(self, rhs: Line) -> Line {
        Line::new(self.dir + rhs.dir, self.mom + rhs.mom)
    }
}

impl AddAssign for Line {
    fn add_assign(&mut self, rhs: Line) {
        self.dir += rhs.dir;
        self.mom += rhs.mom;
    }
}

impl Sub for Line {
    type Output = Line;
    fn sub(self, rhs: Line) -> Line {
        Line::new(self.dir - rhs.dir, self.mom - rhs.mom)
    }
}

impl Neg for Line {
    type Output = Line;
    fn neg(self) -> Line {
        Line::new(-self.dir, -self.mom)
    }
}

impl Mul<f64> for Line {
    type Output = Line;
    fn mul(self, rhs: f64) -> Line {
        Line::new(self.dir * rhs, self.mom * rhs)
    }
}

/// A point in homogeneous coordinates `(x, y, z, w)` over
/// `(e032, e013, e021, e123)`. `w = 1` is Euclidean, `w = 0` a direction.
/// The homogeneous weight is stored as given and never rescaled.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub xyz: Vector3<f64>,
    pub w: f64,
}

impl Point {
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Point { xyz: Vector3::new(x, y, z), w }
    }

    pub fn euclidean(p: Vector3<f64>) -> Self {
        Point { xyz: p, w: 1.0 }
    }

    pub fn direction(d: Vector3<f64>) -> Self {
        Point { xyz: d, w: 0.0 }
    }

    pub fn from_coords(c: Vector4<f64>) -> Self {
        Point::new(c.x, c.y, c.z, c.w)
    }

    pub fn coords(&self) -> Vector4<f64> {
        Vector4::new(self.xyz.x, self.xyz.y, self.xyz.z, self.w)
    }

    pub fn is_infinite(&self) -> bool {
        self.w == 0.0
    }

    pub fn to_mv(self) -> Multivector {
        let mut c = [0.0; 16];
        c[blade::E032] = self.xyz.x;
        c[blade::E013] = self.xyz.y;
        c[blade::E021] = self.xyz.z;
        c[blade::E123] = self.w;
        Multivector(c)
    }

    pub fn from_mv(mv: &Multivector) -> Self {
        Point::new(mv.0[blade::E032], mv.0[blade::E013], mv.0[blade::E021], mv.0[blade::E123])
    }

    /// Join of two points: `[w1 p2 - w2 p1 ; p1 x p2]`.
    pub fn vee(&self, other: &Point) -> Line {
        Line::new(self.w * other.xyz - other.w * self.xyz, self.xyz.cross(&other.xyz))
    }

    /// Velocity of this point under twist `v`: the commutator `P x V`.
    pub fn cross_line(&self, v: &Line) -> Point {
        // Equal to Point::from_mv(&self.to_mv().commutator(&v.to_mv())).
        Point {
            xyz: v.dir.cross(&self.xyz) + self.w * v.mom,
            w: 0.0,
        }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point { xyz: self.xyz + rhs.xyz, w: self.w + rhs.w }
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point { xyz: self.xyz - rhs.xyz, w: self.w - rhs.w }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point { xyz: self.xyz * rhs, w: self.w * rhs }
    }
}

/// A unit even-grade element acting on geometry by `reverse(M) X M`.
///
/// Coefficients are over `{1, e23, e31, e12, e01, e02, e03, e0123}`.
/// Composition `a.then(b)` applies `a` first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motor(pub(crate) [f64; 8]);

const MOTOR_BLADES: [usize; 8] = [
    blade::S,
    blade::E23,
    blade::E31,
    blade::E12,
    blade::E01,
    blade::E02,
    blade::E03,
    blade::E0123,
];

impl Default for Motor {
    fn default() -> Self {
        Motor::IDENTITY
    }
}

impl Motor {
    pub const IDENTITY: Motor = Motor([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// Accepts coefficients that already satisfy the unit condition within
    /// `tol`, then renormalizes them to round-off.
    pub fn from_coeffs(c: [f64; 8], tol: f64) -> Result<Self> {
        let m = Motor(c);
        let (s, t) = m.unit_defect();
        if (s - 1.0).abs() > tol || t.abs() > tol {
            return Err(Error::NonUnitMotor { scalar: s, pseudo: t });
        }
        Ok(m.normalized_unchecked())
    }

    pub fn coeffs(&self) -> [f64; 8] {
        self.0
    }

    pub fn to_mv(self) -> Multivector {
        let mut c = [0.0; 16];
        for (k, &idx) in MOTOR_BLADES.iter().enumerate() {
            c[idx] = self.0[k];
        }
        Multivector(c)
    }

    fn from_mv_unchecked(mv: &Multivector) -> Self {
        let mut c = [0.0; 8];
        for (k, &idx) in MOTOR_BLADES.iter().enumerate() {
            c[k] = mv.0[idx];
        }
        Motor(c)
    }

    /// `reverse(M) M = s + t e0123`; a unit motor has `s = 1, t = 0`.
    pub fn unit_defect(&self) -> (f64, f64) {
        let mv = self.to_mv();
        let p = mv.reverse().geometric(&mv);
        (p.0[blade::S], p.0[blade::E0123])
    }

    fn normalized_unchecked(&self) -> Self {
        let (s, t) = self.unit_defect();
        // (s + t I)^(-1/2) = s^(-1/2) (1 - t / (2 s) I), since I^2 = 0.
        let k = 1.0 / s.sqrt();
        let corr = Multivector::scalar(k) + Multivector::basis(blade::E0123) * (-k * t / (2.0 * s));
        Motor::from_mv_unchecked(&self.to_mv().geometric(&corr))
    }

    pub fn reverse(&self) -> Self {
        let c = self.0;
        Motor([c[0], -c[1], -c[2], -c[3], -c[4], -c[5], -c[6], c[7]])
    }

    /// Apply `self`, then `next`.
    pub fn then(&self, next: &Motor) -> Motor {
        Motor::from_mv_unchecked(&self.to_mv().geometric(&next.to_mv()))
    }

    pub fn sandwich(&self, x: &Multivector) -> Multivector {
        let m = self.to_mv();
        m.reverse().geometric(x).geometric(&m)
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        Point::from_mv(&self.sandwich(&p.to_mv()))
    }

    pub fn apply_line(&self, l: &Line) -> Line {
        Line::from_mv(&self.sandwich(&l.to_mv()))
    }

    /// Motor of a rotation by `angle` about the line through `point` with
    /// direction `axis` (right-handed).
    pub fn rotation(axis: Vector3<f64>, point: Vector3<f64>, angle: f64) -> Motor {
        motor_exp(&(Line::rotation_axis(axis, point) * (angle / 2.0)))
    }

    pub fn translation(t: Vector3<f64>) -> Motor {
        motor_exp(&(Line::ideal(t) * 0.5))
    }

    /// Equivalent homogeneous transform; column k holds the image of the
    /// k-th frame point `(e032, e013, e021, e123)`.
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut t = Matrix4::zeros();
        let frame = [
            Point::new(1.0, 0.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0, 0.0),
            Point::new(0.0, 0.0, 1.0, 0.0),
            Point::new(0.0, 0.0, 0.0, 1.0),
        ];
        for (k, p) in frame.iter().enumerate() {
            t.set_column(k, &self.apply_point(p).coords());
        }
        t
    }

    pub fn from_homogeneous(t: &Matrix4<f64>) -> Result<Motor> {
        let rot: Matrix3<f64> = t.fixed_view::<3, 3>(0, 0).into_owned();
        let ortho = (rot.transpose() * rot - Matrix3::identity()).amax();
        let bottom = (t[(3, 0)].abs() + t[(3, 1)].abs() + t[(3, 2)].abs() + (t[(3, 3)] - 1.0).abs())
            .max(0.0);
        if ortho > tolerance::GEOMETRIC || bottom > tolerance::GEOMETRIC || rot.determinant() < 0.0 {
            return Err(Error::NonRigidTransform { orthogonality: ortho, bottom_row: bottom });
        }
        let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(rot));
        let (angle, axis) = match q.axis_angle() {
            Some((axis, angle)) => (angle, axis.into_inner()),
            None => (0.0, Vector3::z()),
        };
        let translation = Vector3::new(t[(0, 3)], t[(1, 3)], t[(2, 3)]);
        let m = Motor::rotation(axis, Vector3::zeros(), angle).then(&Motor::translation(translation));
        Ok(m.normalized_unchecked())
    }
}

/// Exponential of a bivector, in closed form.
///
/// The bivector is split into a simple rotation line and a commuting
/// translation along its direction; each factor exponentiates exactly.
pub fn motor_exp(b: &Line) -> Motor {
    let u2 = b.dir.norm_squared();
    if u2 == 0.0 {
        return Motor([1.0, 0.0, 0.0, 0.0, b.mom.x, b.mom.y, b.mom.z, 0.0]);
    }
    let u = u2.sqrt();
    let pitch = b.dir.dot(&b.mom) / u2;
    let trans = Line::ideal(b.dir * pitch);
    let rot = *b - trans;
    let (s, c) = u.sin_cos();
    let r = Motor::from_mv_unchecked(&(Multivector::scalar(c) + rot.to_mv() * (s / u)));
    let t = Motor::from_mv_unchecked(&(Multivector::scalar(1.0) + trans.to_mv()));
    r.then(&t)
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::tolerance::{ALGEBRAIC, GEOMETRIC};
    use proptest::prelude::*;

    fn vec3() -> impl Strategy<Value = Vector3<f64>> {
        prop::array::uniform3(-2.0f64..2.0).prop_map(Vector3::from)
    }

    fn unit3() -> impl Strategy<Value = Vector3<f64>> {
        vec3().prop_filter("nonzero", |v| v.norm() > 0.1).prop_map(|v| v.normalize())
    }

    fn plane() -> impl Strategy<Value = Plane> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(|c| Plane::new(c[0], c[1], c[2], c[3]))
    }

    fn motor() -> impl Strategy<Value = Motor> {
        (unit3(), vec3(), -3.0f64..3.0, vec3())
            .prop_map(|(axis, p, angle, t)| Motor::rotation(axis, p, angle).then(&Motor::translation(t)))
    }

    fn euclidean() -> impl Strategy<Value = Point> {
        vec3().prop_map(Point::euclidean)
    }

    fn direction() -> impl Strategy<Value = Point> {
        unit3().prop_map(Point::direction)
    }

    fn e0123(x: &Multivector) -> f64 {
        x.0[blade::E0123]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn wedge_is_antisymmetric_on_vectors(a in plane(), b in plane()) {
            let ab = a.to_mv().wedge(&b.to_mv());
            let ba = b.to_mv().wedge(&a.to_mv());
            prop_assert!((ab + ba).max_abs() <= ALGEBRAIC);
            prop_assert!(a.to_mv().wedge(&a.to_mv()).max_abs() == 0.0);
        }

        #[test]
        fn coplanar_lines_have_zero_wedge(a in plane(), b1 in plane(), b2 in plane()) {
            let l1 = a.to_mv().wedge(&b1.to_mv());
            let l2 = a.to_mv().wedge(&b2.to_mv());
            prop_assert!(e0123(&l1.wedge(&l2)).abs() <= ALGEBRAIC * 64.0);
        }

        #[test]
        fn skew_lines_have_nonzero_wedge(p in vec3(), d in unit3(), q in vec3(), e in unit3()) {
            let l1 = Line::rotation_axis(d, p);
            let l2 = Line::rotation_axis(e, q);
            // Distance-times-sine of the two lines.
            let n = d.cross(&e);
            let gap = (q - p).dot(&n);
            prop_assume!(gap.abs() > 1e-3);
            let w = e0123(&l1.to_mv().wedge(&l2.to_mv()));
            prop_assert!((w.abs() - gap.abs()).abs() <= ALGEBRAIC * 16.0);
        }

        #[test]
        fn point_on_line_annihilates_coefficient(p in euclidean(), r in euclidean(), q in euclidean(), s in -3.0f64..3.0) {
            prop_assume!((p.coords() - r.coords()).norm() > 1e-2);
            let l = p.vee(&r);
            let on = p * (1.0 - s) + r * s;
            let w = e0123(&l.to_mv().wedge(&on.vee(&q).to_mv()));
            prop_assert!(w.abs() <= ALGEBRAIC * 64.0);
        }

        #[test]
        fn infinite_elements_annihilate_coefficient(a in direction(), b in direction(), p in direction(), q in direction()) {
            let l = a.vee(&b);
            let w = e0123(&l.to_mv().wedge(&p.vee(&q).to_mv()));
            prop_assert!(w.abs() <= ALGEBRAIC);
        }

        #[test]
        fn compositions_stay_unit(m1 in motor(), m2 in motor(), m3 in motor()) {
            let m = m1.then(&m2).then(&m3);
            let (s, t) = m.unit_defect();
            prop_assert!((s - 1.0).abs() < GEOMETRIC && t.abs() < GEOMETRIC);
        }

        #[test]
        fn sandwich_preserves_distances(m in motor(), a in vec3(), b in vec3()) {
            let pa = m.apply_point(&Point::euclidean(a)).coords();
            let pb = m.apply_point(&Point::euclidean(b)).coords();
            let d = (pa.xyz() / pa.w - pb.xyz() / pb.w).norm();
            prop_assert!((d - (a - b).norm()).abs() < GEOMETRIC);
        }

        #[test]
        fn homogeneous_round_trip(m in motor()) {
            let t = m.to_homogeneous();
            let back = Motor::from_homogeneous(&t).unwrap().to_homogeneous();
            prop_assert!((t - back).amax() < GEOMETRIC);
        }

        #[test]
        fn exp_agrees_with_homogeneous_screw(axis in unit3(), p in vec3(), angle in -3.0f64..3.0, pitch in -1.0f64..1.0) {
            let m = motor_exp(&(Line::rotation_axis(axis, p) * (angle / 2.0) + Line::ideal(axis * (pitch * angle / 2.0))));
            let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let mut t = Matrix4::identity();
            t.fixed_view_mut::<3, 3>(0, 0).copy_from(r.matrix());
            let trans = p - r * p + axis * (pitch * angle);
            t.fixed_view_mut::<3, 1>(0, 3).copy_from(&trans);
            prop_assert!((m.to_homogeneous() - t).amax() < GEOMETRIC);
        }
    }
}
