//! Numerical toolkit for 2D Lamé eigenfunctions and their boundary behaviour.
//!
//! The crate is organised around a single object of study: solutions of the
//! eigenvalue problem −L(u) = κu for the Lamé operator
//! L(u) = μΔu + (λ+μ)∇(∇·u) on a plane sector, expanded in Fourier–Bessel
//! radial wave modes. On top of that expansion it provides
//!
//! * [`specfun`] — a self-contained cylinder-function engine (J, Y, H⁽¹⁾),
//! * [`lame`] — evaluation of the eigenfunction, its gradient, and the
//!   traction/impedance boundary series on the two sector arms,
//! * [`cgo`] — complex-geometrical-optics test fields, weighted integrals,
//!   the boundary integral identity and its remainder bounds,
//! * [`holmgren`] — linear-algebra certificates showing that boundary
//!   conditions on singular or intersecting lines force all expansion
//!   coefficients to vanish,
//! * [`scattering`] — a method-of-fundamental-solutions forward solver for
//!   polygonal elastic obstacles, far-field patterns, and the uniqueness
//!   experiment harness.
//!
//! All numerics are deterministic: there is no internal randomness, and the
//! few stochastic test utilities take explicit 64-bit seeds.

pub mod cgo;
pub mod holmgren;
pub mod lame;
pub mod quad;
pub mod scattering;
pub mod specfun;

pub use cgo::{CgoField, SectorGeom};
pub use holmgren::{HolmgrenConfig, LineCondition, VanishingCertificate, Verdict, VertexConditions};
pub use lame::{CoeffSeq, LameParams, PolarPoint};
pub use scattering::{Boundary, FarField, IncidentWave, Obstacle, Solution};
