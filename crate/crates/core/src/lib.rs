//! Plane-to-plane map-germs: A-type recognition by jet criteria, bifurcation strata of
//! the corank-two unfoldings (sharksfin, odd-shaped sharksfin, I2,3), apparent contours,
//! and the parabolic/flecnodal curves of projected crosscaps and D5 caustic sections.

pub mod contour;
pub mod export;
pub mod geometry;
pub mod jets;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod recognition;
pub mod scalar;
pub mod strata;
pub mod validate;

pub use jets::{Jet, JetPoint, Var, DEFAULT_ORDER};
pub use poly::MPoly;
pub use scalar::{Scalar, ScalarKind, Q};
