//! Real Hessenberg orthogonal matrices from `n − 1` parameters in `[0, 1]`.
//!
//! * [`construct`] builds family members from a [`ParamVector`].
//! * [`radical`] and [`poly`] provide the exact arithmetic behind
//!   [`verify`]'s exact and symbolic orthogonality checks.
//! * [`inverse`] recovers parameters from a matrix and synthesizes members
//!   with a prescribed first row or last column.

pub mod construct;
pub mod inverse;
pub mod params;
pub mod poly;
pub mod radical;
pub mod verify;

pub use construct::{
    build, entry_sign, sparsity_profile, squared_entry, vertex_matrix, HessenbergUnitary, Matrix,
    SparsityProfile,
};
pub use inverse::{recover, EquivalenceTransform, RecoveryResult, Synthesis};
pub use params::{Mode, ParamVector};
pub use poly::MultiPoly;
pub use radical::{Radical, RadicalSum};
pub use verify::{verify_exact, verify_float, verify_symbolic, VerifyReport};
