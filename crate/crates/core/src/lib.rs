//! Exact and capped-precision p-adic kernels for slope decompositions of
//! Hecke operators on spaces of modular forms, quasi-idempotents, trace
//! congruences, and construction/verification of p-adic families of Hecke
//! eigensystems.
//!
//! Layering, bottom to top:
//!
//! - [`padic`]: exact rationals and cyclotomic numbers, Dirichlet characters,
//!   Teichmuller lifts, and the capped-precision two-step extension ring
//!   (unramified layer tensor an Eisenstein layer y^e = p).
//! - [`linalg`]: exact characteristic polynomials, Newton polygons and slope
//!   profiles, slope projectors via Hensel factorization, Smith normal form
//!   over local precision rings and over the integers.
//! - [`weight`]: the weight-k homogeneous polynomial module, its twisted
//!   GL_2 action, high-Y-degree submodules and the mod p^r weight comparison.
//! - [`msym`]: Manin-symbol models of modular forms, Hecke matrices via
//!   Heilbronn matrices, boundary/cuspidal split, level projections.
//! - [`hecke`]: the symbolic Hecke algebra (operator words, coset labels,
//!   level-projection decomposition).
//! - [`quasi`]: quasi-idempotents attached to the slope decomposition.
//! - [`trace`]: trace-term evaluation and weight-congruence checks.
//! - [`families`]: eigensystem extraction, transfer matching, families with
//!   congruence certificates, root matching at ramified places.

pub mod error;
pub mod families;
pub mod hecke;
pub mod linalg;
pub mod msym;
pub mod padic;
pub mod quasi;
pub mod trace;
pub mod weight;

// modules are brought up bottom-to-top; see each file's header

pub use error::{CoreError, Result};
