//! Exact linear algebra: characteristic polynomials, Newton polygons and
//! slope data, Smith normal forms (integer and local-ring), purification,
//! and slope projectors built from Hensel factorizations over the tower.

pub mod charpoly;
pub mod matrix;
pub mod newton;
pub mod projector;
pub mod snf;
pub mod tpoly;

pub use charpoly::{char_poly, CharPolyLedger};
pub use matrix::{FieldScalar, Mat, Scalar};
pub use newton::{newton_polygon, NewtonPolygon, SlopeProfile};
pub use projector::{slope_projector, SlopeProjector};
pub use snf::{kernel_index_check, purify, snf_bigint, snf_tower, KernelIndexReport};
pub use tpoly::TPoly;
