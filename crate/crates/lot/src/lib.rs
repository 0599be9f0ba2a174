//! Optimal transport for action-induced costs on complete Riemannian
//! manifolds.
//!
//! The crate builds the full pipeline from geometry to transport:
//!
//! * [`manifold`] — chart-based models (flat space, flat torus, round
//!   sphere, hyperbolic plane) with metric, exponential, logarithm and
//!   distance.
//! * [`lagrangian`] — fiberwise-convex Lagrangians (power-of-metric
//!   family plus user callbacks), Legendre transform, Hamiltonian and
//!   both induced flows.
//! * [`minimizer`] — action-minimizing curves between endpoint pairs by
//!   shooting with collocation-seeded fallback; induced two-point costs.
//! * [`semiconcave`] — semi-concavity certificates with linear modulus,
//!   closed under sums and infima, and a touching criterion extracting
//!   derivatives at contact points.
//! * [`kantorovich`] — exact discrete plans between weighted point
//!   clouds, dual potentials, calibration and support checks.
//! * [`monge`] — single-valued transport maps from the twist property,
//!   gradient-based map formulas and graph certificates.
//! * [`interpolation`] — displacement interpolation along minimizing
//!   curves with restriction-identity and midpoint-optimality checks.
//! * [`cli`] — the `lot` command line: `cost`, `solve`, `interp`,
//!   `verify` over JSON configs and CSV/JSON measures.
//!
//! Determinism is a hard requirement throughout: fixed seeds, ordered
//! containers and a fixed-format serializer make repeat runs
//! byte-identical.

pub mod assignment;
pub mod cli;
pub mod error;
pub mod interpolation;
pub mod kantorovich;
pub mod lagrangian;
pub mod linalg;
pub mod manifold;
pub mod minimizer;
pub mod monge;
pub mod netflow;
pub mod report;
pub mod semiconcave;
pub mod sinkhorn;
pub mod suites;
pub mod tol;

pub use error::LotError;
