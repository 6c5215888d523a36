//! Position-dependent-mass (PDM) quantum mechanics on the radial line.
//!
//! The crate builds von Roos kinetic operators for arbitrary ambiguity
//! parameters, the Hermitian pseudo-momentum operator `Π = -i(F∂ + F'/2)` with
//! `F = 1/√m`, and the two radial eigenvalue solvers used to cross-check the
//! point canonical transformation (PCT) that maps a PDM radial problem onto a
//! constant-mass reference problem.
//!
//! Units throughout are `ħ = 2m∘ = 1`, so a constant unit mass gives the
//! kinetic operator `-d²/dx²`.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration and the
//! command line live in the `pdm-cli` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod expr;
pub mod grid;
pub mod math;
pub mod operator;
pub mod ordering;
pub mod pct;
pub mod profiles;
pub mod quadrature;
pub mod radial;
pub mod rational;
pub mod tridiag;

pub use grid::GridFunction;
pub use operator::ScalingPair;
pub use ordering::{KineticCoefficients, LaplacianMode, OrderingParameters};

pub use pct::{PctMapping, ReferenceModel};
pub use profiles::{MassProfile, PotentialProfile, Profile};
pub use radial::{AngularIndex, Parity, RadialProblem, Spectrum};

pub use rational::Rational;
