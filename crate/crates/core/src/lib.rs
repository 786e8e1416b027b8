//! Quaternionic free probability for non-hermitian random matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`quat`]: quaternion arithmetic and block-quaternionic resolvents
//! - [`linalg`]: dense complex eigenvalues, polynomial roots
//! - [`laws`]: elliptic R transforms, addition and scaling, hermitian series
//! - [`greens`]: quaternionic Green's function solver and density fields
//! - [`contour`]: boundary curves traced in polar form, support regions
//! - [`product`]: the multiplication law and its worked reductions
//! - [`ensembles`]: random matrix sampling and empirical comparison
//! - [`io`]: CSV encoders shared by the command line front end

pub mod contour;
pub mod ensembles;
pub mod error;
pub mod greens;
pub mod io;
pub mod laws;
pub mod linalg;
pub mod newton;
pub mod product;
pub mod quat;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use quat::{block_resolvent, BlockQuaternionMatrix, Quaternion, Side};
