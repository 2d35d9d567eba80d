//! Relative Rota-Baxter operators of weight 1 on Lie algebras and matrix Lie
//! groups: verification, descendent structures, cohomology, deformations,
//! differentiation and local integration, the Van Est map, and factorization.

pub mod applications;
pub mod cohomology;
pub mod correspondence;
pub mod error;
pub mod group;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod rbo;
pub mod report;

pub use error::{Error, Result};
pub use linalg::{Matrix, Tolerance, Vector};
pub use report::{Check, Report};
