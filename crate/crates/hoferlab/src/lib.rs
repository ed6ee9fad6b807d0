//! Invariants of exact loops of Lagrangian submanifolds: Hofer lengths,
//! relative K-area of Hamiltonian connections, non-symplectic interval
//! bounds, Maslov indices, embedded-disc loops on the flat torus, and a
//! pseudoholomorphic-section verifier.
//!
//! The crate is organized around five subsystems:
//!
//! - [`symplin`]: symplectic linear algebra and the Maslov index engine;
//! - [`cpn`]: Fubini-Study geometry of CP^n and the explicit loop families;
//! - [`connection`]: Hamiltonian connection 2-forms on D x M, curvature
//!   quadrature, cohomology pairings, and interval certificates;
//! - [`sections`]: Cauchy-Riemann residuals, energies, and taming checks
//!   for sections of D x M;
//! - [`torus`]: disc loops on T^2, serpentine width minimization, the
//!   spectral Moser solver, and explicit disc diffeomorphisms.
//!
//! Everything is deterministic for fixed seeds and configuration;
//! parallel reductions are ordered so worker counts never change results.

pub mod connection;
pub mod cpn;
pub mod error;
pub mod quad;
pub mod report;
pub mod sections;
pub mod symplin;
pub mod torus;

pub use error::{Error, Result};
