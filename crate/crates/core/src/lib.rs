//! Singular points, hyperbolic-regular fibres and bifurcation data for the
//! four-parameter family `(J, H_t)` on the octagon toric manifold.
//!
//! Modules build on each other bottom-up: [`numerics`] supplies jets,
//! polynomials, root isolation and contouring; [`geometry`] the charts;
//! [`energies`] the integrals; [`singular`] locates and types singular points;
//! [`fibres`] turns reduced level sets into bouquet graphs; [`bifurcation`]
//! sweeps parameters. [`verify`] bundles the numerical property suite.

pub mod bifurcation;
pub mod energies;
pub mod fibres;
pub mod geometry;
pub mod numerics;
pub mod singular;
pub mod verify;

pub use energies::ParamT;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("angle undefined: radius is zero")]
    AngleUndefined,
    #[error("{0}")]
    DegenerateFamily(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("point is not singular (|grad| = {0:e})")]
    NotSingular(f64),
    #[error("inconsistent fibre graph: {0}")]
    GraphInconsistent(String),
    #[error("component leaves the chart; k >= {lower_bound}")]
    OpenComponent { lower_bound: usize },
    #[error("no transition found on the sampled range")]
    NoTransition,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
