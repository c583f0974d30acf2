//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by library code or by the acceptance suite lives
//! here so the numbers can be audited in one place.

/// Algebraic identities (products, duals, hat/bar contractions).
pub const ALGEBRAIC: f64 = 1e-12;

/// Geometric round trips (motor <-> homogeneous matrix, sandwich isometry).
pub const GEOMETRIC: f64 = 1e-10;

/// Unit condition `reverse(M) M = 1` checked when a motor is accepted from
/// outside the crate.
pub const MOTOR_UNIT: f64 = 1e-12;

/// Unit condition for motors read from files, where coefficients are
/// printed with finite precision.
pub const MOTOR_UNIT_FILE: f64 = 1e-9;

/// Loop-closure residual accepted by the Newton solver (infinity norm).
pub const LOOP_CLOSURE: f64 = 1e-10;

/// Maximum Newton iterations for loop closure.
pub const LOOP_MAX_ITERATIONS: usize = 50;

/// Default condition-number gate on the passive constraint Jacobian.
pub const DEFAULT_COND_GATE: f64 = 30.0;

/// Default rank tolerance, relative to the largest pivot.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Rank tolerance for checking independence of nullspace columns,
/// relative to the Frobenius norm of the nullspace matrix.
pub const NULLSPACE_RANK_TOL: f64 = 1e-10;

/// Accepted relative Frobenius residual of `Y B_null`.
pub const MEMBERSHIP_RESIDUAL: f64 = 1e-8;

/// Pivots within this factor (above or below) of the rank threshold are
/// reported as near-threshold.
pub const NEAR_THRESHOLD_BAND: f64 = 1e4;

/// Zero test for geometric predicates on declared model data (parallel
/// axes, gravity alignment). Model files carry printed decimals, so an
/// exact comparison would be brittle for rotated frames.
pub const MODEL_ZERO: f64 = 1e-9;
