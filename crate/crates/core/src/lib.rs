//! Numerical differential geometry engine for Godel-type spacetimes.
//!
//! The metric family `[dt + H(r) dphi]^2 - dr^2 - D(r)^2 dphi^2 - dz^2` is
//! represented by its radial profile pair (H, D). The crate evaluates the
//! metric, pseudo-orthonormal frame, Levi-Civita connection and curvature
//! both in closed form and through independent finite-difference oracles,
//! computes fundamental forms of arbitrary immersed hypersurfaces, and
//! constructs and certifies the catalog of totally geodesic, parallel and
//! Codazzi hypersurface families, including numerical adjudication of the
//! transcription conflicts in the source classification.
//!
//! ```
//! use godel_geo::catalog;
//! use godel_geo::hypersurfaces::{Engine, Tolerances};
//! use godel_geo::profiles::ProfilePair;
//!
//! // the alpha = 0 rotating profile; r = 1 slice is proper parallel
//! let p = ProfilePair::class2(1.0).unwrap();
//! let entry = catalog::par_1(&p, 1.0).unwrap();
//! let imm = entry.immersion().unwrap();
//! let verdict = Engine::new(&p, imm)
//!     .classify(&imm.ubox.grid(3), &Tolerances::default())
//!     .unwrap();
//! assert!(verdict.parallel && !verdict.totally_geodesic && verdict.cmc);
//! assert!((verdict.mean_curvature - 1.0).abs() < 1e-6); // D'(1)/D(1)
//! ```

// indexed loops over small fixed tensors are the house style here; the
// iterator rewrites clippy suggests read worse for this kind of code
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::should_implement_trait)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::large_enum_variant)]

pub mod catalog;
pub mod commands;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hypersurfaces;
pub mod profiles;
pub mod report;
pub mod rk;

pub use error::{GeoError, Result};
