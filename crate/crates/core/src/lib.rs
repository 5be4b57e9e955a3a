//! Skeletal spherical fusion category data, modular (braided, ribbon) data,
//! and a sliced diagram evaluation engine working in fusion-tree bases.
//!
//! The crate provides:
//!
//! - [`fusion`]: simple objects, fusion multiplicities, F-symbol tables,
//!   category validation (unit/duality laws, associativity, pentagon), and
//!   Hom-space dimension counting / fusion-tree basis enumeration.
//! - [`modular`]: R-symbols, twists, S-matrices, hexagon verification, the
//!   Verlinde reconstruction check, and paired data linking a category with
//!   a modular presentation of its center (forgetful images, injection
//!   tensors, half-braidings).
//! - [`diagram`]: a sparse evaluator for sliced (Morse-word) diagrams over a
//!   loaded category: cups, caps, crossings, twists, coupons, rotations and
//!   encircling loops, all expressed in left-combed tree coordinates.
//! - [`format`]: the line-based text formats `tqft-cat/1` and `tqft-mod/1`.

pub mod diagram;
pub mod error;
pub mod format;
pub mod fusion;
pub mod linalg;
pub mod modular;
pub mod scalar;

pub use error::CoreError;
pub use fusion::{CategoryData, FusionRules, Simple, SimpleObject};
pub use modular::{ModularData, PairedData};
pub use scalar::{Complex64, Tol};
