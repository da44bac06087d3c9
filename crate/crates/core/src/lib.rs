//! Operator frames, dual frames, and quasiprobability representations of
//! finite-dimensional quantum theory.
//!
//! The crate builds representations of the form `mu(lambda) = Tr[rho F(lambda)]`
//! for states and `xi(lambda) = Tr[sigma(lambda) E]` for measurement effects,
//! where `{F(lambda)}` is an operator frame summing to the identity and
//! `{sigma(lambda)}` is a dual family of unit-trace operators. When the two
//! families are exact duals, these representations reproduce the Born rule.
//! The crate then quantifies how far any such representation is from a
//! classical probabilistic model and provides executable checks showing that
//! frame positivity, dual positivity, and exact duality can never hold
//! simultaneously.
//!
//! Modules:
//! - [`opalg`]: Hermitian operator algebra, vectorization, random sampling.
//! - [`frames`]: ontic spaces, frames, dual frames, canonical duals, and
//!   built-in frame families.
//! - [`repr`]: quasiprobability distributions, response functions, Born-rule
//!   and mixture checks, negativity reports.
//! - [`extend`]: convex-linear extension of functionals and operator
//!   recovery from sampled values.
//! - [`nogo`]: positivity audits, the rank-1 proportionality contradiction,
//!   and a negativity-minimizing search over frame and dual pairs.
//! - [`io`]: JSON and CSV interchange for all of the above.

pub mod error;
pub mod extend;
pub mod frames;
pub mod io;
pub mod nogo;
pub mod opalg;
pub mod repr;
pub mod tol;

pub use error::{Error, Result};
pub use extend::{ConvexSample, LinearFunctionalOperator};
pub use frames::{DualFrame, Frame, FrameOperator, OnticSpace};
pub use nogo::{
    ContradictionWitness, OptimizerConfig, PositivityAudit, PremiseFailure, SearchResult,
    TrichotomyAudit, TwoBasisOutcome, WitnessConfig,
};
pub use opalg::{DensityOperator, Effect, HermBasis, HermitianOperator, MixtureWeights, Povm};
pub use repr::{FragmentReport, NegativityReport, QuasiDistribution, ResponseFunctions};
