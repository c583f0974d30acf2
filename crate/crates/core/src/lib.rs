pub mod analysis;
pub mod cli;
pub mod error;
pub mod kinematics;
pub mod model;
pub mod nullspace;
pub mod pga;
pub mod regressor;
pub mod rigid_body;
pub mod robots;
pub mod tolerance;
pub mod validation;

pub use error::{Error, Result};
